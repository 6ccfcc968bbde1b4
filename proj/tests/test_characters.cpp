#include <catch2/catch_amalgamated.hpp>
#include <fbc/characters.hpp>
#include <fbc/oracle.hpp>

using namespace fbc;

static const FiberSpec mu2 = FiberSpec::finite(2);
static const FiberSpec mu4 = FiberSpec::finite(4);

TEST_CASE("value/coefficient round trip and orthonormality") {
    for (long n : {1L, 4L, 6L}) {
        for (long j = 0; j < n; ++j) {
            auto chi = VirtualCharacter::irreducible(n, j);
            CHECK(VirtualCharacter::from_values(n, chi.values()) == chi);
            for (long x = 0; x < n; ++x) CHECK(chi.value(x) == root_of_unity(n, j * x));
            for (long k = 0; k < n; ++k) {
                auto other = VirtualCharacter::irreducible(n, k);
                CHECK(inner_product(chi, other) == (j == k ? CycNumber::one() : CycNumber::zero()));
            }
        }
    }
}

TEST_CASE("linearize picks the characters extending phi") {
    // U = <2> x 1 <= Z/4 x 1 with trivial phi: chi^0 + chi^2
    auto x = BisetElement::transitive(FiberedPair(4, 1, mu4, {{2, 0, 0}}));
    auto lin = linearize(x);
    CHECK(lin.coeff(0) == CycNumber::one());
    CHECK(lin.coeff(2) == CycNumber::one());
    CHECK(lin.coeff(1).is_zero());
    // faithful phi on all of Z/4: exactly chi^1
    auto y = BisetElement::transitive(FiberedPair(4, 1, mu4, {{1, 0, 1}}));
    CHECK(linearize(y) == VirtualCharacter::irreducible(4, 1));
}

TEST_CASE("linearize equals the action on the point character") {
    auto pt = VirtualCharacter::irreducible(1, 0);
    for (long n : {2L, 4L, 8L})
        for (const auto& u : oracle::all_transitive_pairs(n, 1, mu4)) {
            auto x = BisetElement::transitive(u);
            CHECK(linearize(x) == act_generic(x, pt));
        }
}

TEST_CASE("act_generic matches the bimodule trace oracle") {
    for (long n : {1L, 2L, 4L})
        for (long m : {1L, 2L, 4L})
            for (const auto& u : oracle::all_transitive_pairs(n, m, mu4))
                for (long j = 0; j < m; ++j) {
                    auto chi = VirtualCharacter::irreducible(m, j);
                    CHECK(act_generic(BisetElement::transitive(u), chi) ==
                          oracle::bimodule_action_trace(u, chi));
                }
}

static void check_fast(const BasicBiset& b, long source_order) {
    for (long j = 0; j < source_order; ++j) {
        auto chi = VirtualCharacter::irreducible(source_order, j);
        REQUIRE(act_fast(b, chi) == act_generic(b.element(), chi));
    }
}

TEST_CASE("act_fast agrees with act_generic for every basic biset") {
    for (long n : {1L, 2L, 4L, 8L, 6L, 12L}) {
        for (const FiberSpec& A : {mu2, mu4}) {
            for (long m : divisors(n)) {
                check_fast({BasicBiset::Kind::ind, n, m, 1, {1, 1, 0}, 1, A}, m);
                check_fast({BasicBiset::Kind::res, n, m, 1, {1, 1, 0}, 1, A}, n);
                check_fast({BasicBiset::Kind::inf, n, m, 1, {1, 1, 0}, 1, A}, m);
                check_fast({BasicBiset::Kind::def_, n, m, 1, {1, 1, 0}, 1, A}, n);
            }
            for (long u : units_mod(n))
                check_fast({BasicBiset::Kind::iso, n, 1, u, {1, 1, 0}, 1, A}, n);
            for (const auto& h : hom_set(n, A))
                check_fast({BasicBiset::Kind::tw, n, 1, 1, h, 1, A}, n);
            for (const auto& K : subgroups(CyclicGroup(n)))
                for (const auto& kappa : hom_set(K.order(), A)) {
                    check_fast({BasicBiset::Kind::e, n, 1, 1, kappa, K.index_divisor, A}, n);
                    check_fast({BasicBiset::Kind::f, n, 1, 1, kappa, K.index_divisor, A}, n);
                }
        }
    }
}

TEST_CASE("deflation of the regular character keeps coefficient one") {
    // regular character of Z/4 deflated to Z/2 is the regular character of
    // Z/2, not a multiple of it; act_generic is the authority here
    VirtualCharacter reg(4);
    for (long j = 0; j < 4; ++j) reg.set_coeff(j, CycNumber::one());
    auto out = act_generic(basic_def(4, 2, mu2), reg);
    VirtualCharacter reg2(2);
    for (long j = 0; j < 2; ++j) reg2.set_coeff(j, CycNumber::one());
    CHECK(out == reg2);
}

TEST_CASE("dirichlet characters enumerate and multiply") {
    for (long m : {1L, 3L, 4L, 8L, 12L, 16L}) {
        auto all = all_dirichlet_characters(m);
        CHECK(static_cast<long>(all.size()) == euler_phi(m));
        for (const auto& nu : all)
            for (long x : units_mod(m))
                for (long y : units_mod(m))
                    CHECK(nu.value(x * y) == nu.value(x) * nu.value(y));
    }
    CHECK_THROWS_AS(DirichletCharacter::trivial(8).value(2), std::invalid_argument);
}

TEST_CASE("conductors and primitivity") {
    CHECK(conductor(DirichletCharacter::trivial(12)) == 1);
    CHECK(primitive_characters(1).size() == 1);
    CHECK(primitive_characters(2).empty());
    CHECK(primitive_characters(3).size() == 1);
    CHECK(primitive_characters(4).size() == 1);
    CHECK(primitive_characters(6).empty());
    CHECK(primitive_characters(8).size() == 2);
    CHECK(primitive_characters(12).size() == 1);
    CHECK(primitive_characters(16).size() == 4);
    // conductor counts telescope: sum over d | m of #primitive(d) = phi(m)
    for (long m : {8L, 12L, 16L, 24L}) {
        long total = 0;
        for (long d : divisors(m)) total += static_cast<long>(primitive_characters(d).size());
        CHECK(total == euler_phi(m));
    }
}

TEST_CASE("pi components multiply back to the character") {
    for (const auto& nu : all_dirichlet_characters(24)) {
        auto n2 = nu.p_component(2);
        auto n3 = nu.pi_complement({2});
        CHECK(n3.modulus() == 3);
        for (long x : units_mod(24)) CHECK(nu.value(x) == n2.value(x) * n3.value(x));
    }
}

TEST_CASE("dirichlet_extend and the gauss coefficient") {
    for (long m : {5L, 8L, 12L})
        for (const auto& nu : primitive_characters(m)) {
            auto t = dirichlet_extend(nu);
            for (long x = 0; x < m; ++x) {
                if (std::gcd(x, m) == 1)
                    CHECK(t.value(x) == nu.value(x));
                else
                    CHECK(t.value(x).is_zero());
            }
            auto tau = gauss_coefficient(t);
            CHECK(tau * tau.conjugate() == CycNumber(Rational(1, m)));
        }
}

TEST_CASE("nu_alpha partitions the extension by support") {
    auto nus = primitive_characters(8);
    for (const auto& nu : nus) {
        auto t = dirichlet_extend(nu);
        VirtualCharacter sum(8);
        for (long j : units_mod(4)) {
            auto part = nu_alpha(t, CyclicHom(4, 4, j));
            for (long k = 0; k < 8; ++k)
                if (mod_norm(k, 4) != j) CHECK(part.coeff(k).is_zero());
            sum = sum + part;
        }
        CHECK(sum == t);
    }
    CHECK_THROWS_AS(nu_alpha(dirichlet_extend(nus[0]), CyclicHom(4, 4, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(nu_alpha(dirichlet_extend(nus[0]), CyclicHom(8, 8, 1)),
                    std::invalid_argument);
}

TEST_CASE("iso closed form matches the action") {
    long m = 8, na = 4;
    for (const auto& nu : primitive_characters(m)) {
        auto t = dirichlet_extend(nu);
        for (long ja : units_mod(na))
            for (long sigma : units_mod(m)) {
                CyclicHom alpha(na, na, ja);
                auto r = iso_on_nu_alpha(sigma, nu, alpha);
                auto lhs = act_generic(basic_iso(m, sigma, mu4), nu_alpha(t, alpha));
                auto rhs = nu_alpha(t, r.target).scaled(r.scalar);
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("tw closed form matches the action") {
    long m = 8, na = 4;
    for (const auto& nu : primitive_characters(m)) {
        auto t = dirichlet_extend(nu);
        for (long ja : units_mod(na))
            for (const auto& phi : hom_set(m, mu4)) {
                CyclicHom alpha(na, na, ja);
                long s = (phi.generator_image * m) / na;
                auto r = tw_on_nu_alpha(s, nu, alpha);
                auto lhs = act_generic(basic_tw(phi, mu4), nu_alpha(t, alpha));
                auto rhs = nu_alpha(t, r.target).scaled(r.scalar);
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("coprime_act agrees with act_generic on composite orders") {
    for (const auto& u : oracle::all_transitive_pairs(6, 12, mu2)) {
        auto x = BisetElement::transitive(u);
        for (long j = 0; j < 12; ++j) {
            auto chi = VirtualCharacter::irreducible(12, j);
            CHECK(coprime_act(x, chi) == act_generic(x, chi));
        }
    }
}
