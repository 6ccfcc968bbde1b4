#include <catch2/catch_amalgamated.hpp>
#include <fbc/fibered.hpp>
#include <fbc/oracle.hpp>

using namespace fbc;

static const FiberSpec mu2 = FiberSpec::finite(2);
static const FiberSpec mu4 = FiberSpec::finite(4);

TEST_CASE("canonical form of simple pairs") {
    FiberedPair diag(8, 8, mu4, {{1, 1, 0}});
    CHECK(diag.a() == 1);
    CHECK(diag.b() == 1);
    CHECK(diag.c() == 8);
    CHECK(diag.phi1() == 0);
    CHECK(diag.subgroup_size() == 8);

    FiberedPair ind(8, 2, mu4, {{4, 1, 0}});
    CHECK(ind.a() == 4);
    CHECK(ind.b() == 1);
    CHECK(ind.c() == 2);

    // generator order and redundancy do not matter
    FiberedPair p1(8, 4, mu4, {{2, 1, 1}, {0, 2, 2}});
    FiberedPair p2(8, 4, mu4, {{0, 2, 2}, {2, 1, 1}, {2, 3, 3}});
    CHECK(p1 == p2);
}

TEST_CASE("ill-defined fiber maps are rejected") {
    CHECK_THROWS_AS(FiberedPair(1, 1, mu4, {{0, 0, 1}}), std::invalid_argument);
    // phi(1,0) = 1 in mu_4 but 2*(1,0) = (0,0) forces 2*1 = 0 mod 4
    CHECK_THROWS_AS(FiberedPair(2, 1, mu4, {{1, 0, 1}}), std::invalid_argument);
    // same on the right leg
    CHECK_THROWS_AS(FiberedPair(1, 2, mu4, {{0, 1, 1}}), std::invalid_argument);
    // valid at level 2
    CHECK_NOTHROW(FiberedPair(2, 1, mu2, {{1, 0, 1}}));
}

TEST_CASE("contains and phi_eval define a subgroup homomorphism") {
    for (const auto& u : oracle::all_transitive_pairs(8, 4, mu4)) {
        long count = 0;
        for (long x = 0; x < 8; ++x)
            for (long y = 0; y < 4; ++y) count += u.contains(x, y);
        CHECK(count == u.subgroup_size());
        for (long x1 = 0; x1 < 8; ++x1)
            for (long y1 = 0; y1 < 4; ++y1) {
                if (!u.contains(x1, y1)) continue;
                for (long x2 = 0; x2 < 8; ++x2)
                    for (long y2 = 0; y2 < 4; ++y2) {
                        if (!u.contains(x2, y2)) continue;
                        REQUIRE(u.contains(x1 + x2, y1 + y2));
                        REQUIRE(u.phi_eval(x1 + x2, y1 + y2) ==
                                mod_norm(u.phi_eval(x1, y1) + u.phi_eval(x2, y2), 4));
                    }
            }
    }
}

TEST_CASE("invariants match a brute-force computation") {
    for (const auto& u : oracle::all_transitive_pairs(8, 4, mu4)) {
        long n = 8, m = 4;
        long p1 = n, k1 = n, p2 = m, k2 = m;  // index divisors via gcd of members
        for (long x = 0; x < n; ++x)
            for (long y = 0; y < m; ++y) {
                if (!u.contains(x, y)) continue;
                p1 = std::gcd(p1, x);
                p2 = std::gcd(p2, y);
                if (y == 0) k1 = std::gcd(k1, x);
                if (x == 0) k2 = std::gcd(k2, y);
            }
        auto li = u.left_invariants();
        auto ri = u.right_invariants();
        CHECK(li.p.index_divisor == (p1 == 0 ? n : p1));
        CHECK(li.k.index_divisor == (k1 == 0 ? n : k1));
        CHECK(ri.p.index_divisor == (p2 == 0 ? m : p2));
        CHECK(ri.k.index_divisor == (k2 == 0 ? m : k2));
        if (li.k.order() > 1)
            CHECK(li.phi_restriction(1) == u.phi_eval(li.k.generator(), 0));
        if (ri.k.order() > 1)
            CHECK(ri.phi_restriction(1) == mod_norm(-u.phi_eval(0, ri.k.generator()), 4));
    }
}

TEST_CASE("opposite is an involution and swaps invariants") {
    for (const auto& u : oracle::all_transitive_pairs(4, 8, mu4)) {
        auto op = u.opposite();
        CHECK(op.opposite() == u);
        CHECK(op.left_invariants().p == u.right_invariants().p);
        CHECK(op.right_invariants().k == u.left_invariants().k);
        for (long x = 0; x < 4; ++x)
            for (long y = 0; y < 8; ++y) {
                CHECK(u.contains(x, y) == op.contains(y, x));
                if (u.contains(x, y))
                    CHECK(op.phi_eval(y, x) == mod_norm(-u.phi_eval(x, y), 4));
            }
    }
}

TEST_CASE("goursat round trip") {
    for (const auto& u : oracle::all_transitive_pairs(8, 4, mu4)) {
        auto q = goursat(u);
        CHECK(q.P.order() / q.K.order() == q.Q.order() / q.L.order());
        long phik = q.K.order() == 1 ? 0 : u.phi_eval(q.K.generator(), 0);
        long phil = q.L.order() == 1 ? 0 : u.phi_eval(0, q.L.generator());
        long g = mod_norm(q.eta * q.P.index_divisor, 8);
        long phig = u.phi_eval(g, q.Q.index_divisor % 4);
        CHECK(from_quintuple(q, mu4, phik, phil, phig) == u);
    }
}

TEST_CASE("BisetElement algebra") {
    auto x = BisetElement::identity(4, mu2);
    CHECK((x - x).is_zero());
    CHECK(x + x == x.scaled(CycNumber(2)));
    auto p = FiberedPair(4, 2, mu2, {{2, 1, 0}});
    auto y = BisetElement::transitive(p, CycNumber(3));
    CHECK(y.terms().begin()->second == CycNumber(3));
    CHECK(y.opposite().opposite() == y);
    // adding a cancelling coefficient prunes the term
    auto z = y - BisetElement::transitive(p, CycNumber(3));
    CHECK(z.is_zero());
}

TEST_CASE("mackey identity laws") {
    for (long n : {1L, 2L, 4L, 8L})
        for (long m : {1L, 2L, 4L})
            for (const auto& u : oracle::all_transitive_pairs(n, m, mu4)) {
                auto x = BisetElement::transitive(u);
                CHECK(mackey_product(BisetElement::identity(n, mu4), x) == x);
                CHECK(mackey_product(x, BisetElement::identity(m, mu4)) == x);
            }
}

TEST_CASE("mackey respects opposite as an anti-homomorphism") {
    for (const auto& u : oracle::all_transitive_pairs(4, 4, mu4))
        for (const auto& v : oracle::all_transitive_pairs(4, 2, mu4)) {
            auto xy = mackey_product(BisetElement::transitive(u), BisetElement::transitive(v));
            auto yx = mackey_product(BisetElement::transitive(v).opposite(),
                                     BisetElement::transitive(u).opposite());
            CHECK(xy.opposite() == yx);
        }
}

TEST_CASE("mackey associativity on a desk-size sweep") {
    auto xs = oracle::all_transitive_pairs(4, 2, mu2);
    auto ys = oracle::all_transitive_pairs(2, 4, mu2);
    auto zs = oracle::all_transitive_pairs(4, 4, mu2);
    for (const auto& u : xs)
        for (const auto& v : ys)
            for (const auto& w : zs) {
                auto a = mackey_product(
                    mackey_product(BisetElement::transitive(u), BisetElement::transitive(v)),
                    BisetElement::transitive(w));
                auto b = mackey_product(
                    BisetElement::transitive(u),
                    mackey_product(BisetElement::transitive(v), BisetElement::transitive(w)));
                CHECK(a == b);
            }
}

TEST_CASE("mackey agrees with the orbit-counting oracle on a sample") {
    for (const auto& u : oracle::all_transitive_pairs(4, 4, mu4))
        for (const auto& v : oracle::all_transitive_pairs(4, 2, mu4)) {
            auto fast = mackey_product(BisetElement::transitive(u), BisetElement::transitive(v));
            auto slow = oracle::enumerate_tensor_product(u, v);
            REQUIRE(fast == slow);
        }
}

TEST_CASE("induction and restriction compose classically") {
    for (long n : {4L, 8L})
        for (long m : divisors(n)) {
            auto resind = mackey_product(basic_res(n, m, mu4), basic_ind(n, m, mu4));
            CHECK(resind == BisetElement::identity(m, mu4).scaled(CycNumber(n / m)));
            auto definf = mackey_product(basic_def(n, m, mu4), basic_inf(n, m, mu4));
            CHECK(definf == BisetElement::identity(m, mu4));
        }
}

TEST_CASE("iso and tw are invertible") {
    long n = 8;
    for (long u : units_mod(n)) {
        auto a = mackey_product(basic_iso(n, u, mu4), basic_iso(n, inv_mod(u, n), mu4));
        CHECK(a == BisetElement::identity(n, mu4));
    }
    for (const auto& h : hom_set(n, mu4)) {
        CyclicHom hinv(n, 4, -h.generator_image);
        CHECK(mackey_product(basic_tw(h, mu4), basic_tw(hinv, mu4)) ==
              BisetElement::identity(n, mu4));
    }
}

TEST_CASE("e idempotents multiply by the intersection rule") {
    CyclicGroup G(8);
    for (const auto& K : subgroups(G))
        for (const auto& kappa : hom_set(K.order(), mu4))
            for (const auto& L : subgroups(G))
                for (const auto& lambda : hom_set(L.order(), mu4)) {
                    auto prod = mackey_product(basic_e(K, kappa, mu4), basic_e(L, lambda, mu4));
                    // intersection of K and L inside Z/8
                    long di = std::lcm(K.index_divisor, L.index_divisor);
                    di = std::gcd(di, 8L);
                    Subgroup I(G, di);
                    long kv = I.order() == 1 ? 0 : kappa((di / K.index_divisor));
                    long lv = I.order() == 1 ? 0 : lambda((di / L.index_divisor));
                    if (kv != lv) {
                        CHECK(prod.is_zero());
                    } else {
                        // a single transitive e over the product subgroup KL
                        long dp = std::gcd(K.index_divisor, L.index_divisor);
                        CHECK(prod.terms().size() == 1);
                        CHECK(prod.terms().begin()->second == CycNumber::one());
                        CHECK(prod.terms().begin()->first.left_invariants().k.index_divisor == dp);
                    }
                }
}

TEST_CASE("f idempotents are orthogonal and sum to the identity") {
    for (long n : {4L, 8L})
        for (const FiberSpec& A : {mu2, mu4}) {
            CyclicGroup G(n);
            std::vector<BisetElement> fs;
            for (const auto& K : subgroups(G))
                for (const auto& kappa : hom_set(K.order(), A))
                    fs.push_back(basic_f(K, kappa, A));
            BisetElement sum = BisetElement::zero(n, n, A);
            for (const auto& f : fs) sum = sum + f;
            CHECK(sum == BisetElement::identity(n, A));
            for (size_t i = 0; i < fs.size(); ++i)
                for (size_t j = 0; j < fs.size(); ++j) {
                    auto prod = mackey_product(fs[i], fs[j]);
                    if (i == j)
                        CHECK(prod == fs[i]);
                    else
                        CHECK(prod.is_zero());
                }
        }
}

TEST_CASE("is_reduced on the worked examples") {
    CyclicGroup G4(4);
    // G = Z/4, A = mu_2, K = Z/2
    CHECK(is_reduced(Subgroup(G4, 2), CyclicHom(2, 2, 1), mu2));   // faithful kappa
    CHECK_FALSE(is_reduced(Subgroup(G4, 2), CyclicHom(2, 2, 0), mu2));  // trivial kappa
    // |A| >= |G|: only the trivial pair is reduced
    CHECK(is_reduced(Subgroup(G4, 4), CyclicHom(1, 4, 0), mu4));
    CHECK_FALSE(is_reduced(Subgroup(G4, 2), CyclicHom(2, 4, 2), mu4));
    // composite order handled per prime
    CyclicGroup G12(12);
    CHECK(is_reduced(Subgroup(G12, 12), CyclicHom(1, 2, 0), mu2));
    CHECK_FALSE(is_reduced(Subgroup(G12, 4), CyclicHom(3, 2, 0), mu2));  // 3-part nontrivial, A_3 = 1 < 3 and kappa trivial there
}

TEST_CASE("split_non_reduced reassembles the idempotent") {
    for (long n : {4L, 8L})
        for (const FiberSpec& A : {mu2, mu4}) {
            CyclicGroup G(n);
            for (const auto& K : subgroups(G))
                for (const auto& kappa : hom_set(K.order(), A)) {
                    long k = K.order();
                    long o = kappa.generator_image == 0
                                 ? 1
                                 : A.N / std::gcd(kappa.generator_image, A.N);
                    if (o == k) {
                        CHECK_THROWS_AS(split_non_reduced(K, kappa, A), std::invalid_argument);
                        continue;
                    }
                    auto s = split_non_reduced(K, kappa, A);
                    auto back = mackey_product(s.inf, mackey_product(s.reduced, s.def));
                    CHECK(back == basic_e(K, kappa, A));
                    CHECK(s.quotient_order < n);
                }
        }
}

TEST_CASE("coprime combine and project round trip") {
    for (const auto& u : oracle::all_transitive_pairs(12, 6, mu2)) {
        auto u2 = p_component(u, 2);
        auto u3 = p_component(u, 3);
        CHECK(combine_coprime(u2, u3) == u);
    }
}

TEST_CASE("factorization round trip on samples") {
    auto roundtrip = [](const FiberedPair& u) {
        auto factors = factorize(u);
        REQUIRE(!factors.empty());
        BisetElement prod = factors.front();
        for (size_t i = 1; i < factors.size(); ++i) prod = mackey_product(prod, factors[i]);
        CHECK(prod == BisetElement::transitive(u));
    };
    for (const auto& u : oracle::all_transitive_pairs(8, 4, mu2)) roundtrip(u);
    for (const auto& u : oracle::all_transitive_pairs(4, 8, mu4)) roundtrip(u);
    for (const auto& u : oracle::all_transitive_pairs(9, 3, FiberSpec::finite(3))) roundtrip(u);
    for (const auto& u : oracle::all_transitive_pairs(12, 6, mu2)) roundtrip(u);
}

TEST_CASE("factor lists use only basic shapes") {
    for (const auto& u : oracle::all_transitive_pairs(8, 8, mu4))
        for (const auto& f : factorize(u)) CHECK(f.terms().size() <= 4);
}

TEST_CASE("linkage class counts") {
    // number of classes = number of subgroups of order <= |A|
    CHECK(linkage_classes(CyclicGroup(8), mu4).size() == 3);
    CHECK(linkage_classes(CyclicGroup(8), mu2).size() == 2);
    CHECK(linkage_classes(CyclicGroup(4), mu2).size() == 2);
    CHECK(linkage_classes(CyclicGroup(16), mu4).size() == 3);
}

TEST_CASE("gamma group at (Z/8, K of order 4, faithful kappa, mu_4)") {
    CyclicGroup G(8);
    Subgroup K(G, 2);
    CyclicHom kappa(4, 4, 1);
    auto gg = gamma_group(G, K, kappa, mu4);
    CHECK(gg.elements.size() == 8);
    // identity behaves
    for (size_t i = 0; i < gg.elements.size(); ++i) {
        CHECK(gg.table[gg.identity_index][i] == i);
        CHECK(gg.table[i][gg.identity_index] == i);
    }
    // associativity
    size_t sz = gg.elements.size();
    for (size_t i = 0; i < sz; ++i)
        for (size_t j = 0; j < sz; ++j)
            for (size_t k = 0; k < sz; ++k)
                CHECK(gg.table[gg.table[i][j]][k] == gg.table[i][gg.table[j][k]]);
    // rows and columns are permutations
    for (size_t i = 0; i < sz; ++i) {
        std::vector<char> seen(sz, 0);
        for (size_t j = 0; j < sz; ++j) seen[gg.table[i][j]] = 1;
        for (char s : seen) CHECK(s == 1);
    }
}

TEST_CASE("gamma group rejects non-reduced pairs") {
    CyclicGroup G(8);
    CHECK_THROWS_AS(gamma_group(G, Subgroup(G, 2), CyclicHom(4, 4, 0), mu4),
                    std::invalid_argument);
}
