#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "characters.hpp"

namespace fbc {

/// A pair (m, zeta) with zeta primitive modulo m; the labels of the simple
/// summands of the character functor.
struct PairMZ {
    long m;
    DirichletCharacter zeta;

    PairMZ(long modulus, DirichletCharacter z) : m(modulus), zeta(std::move(z)) {
        if (zeta.modulus() != m) throw std::invalid_argument("PairMZ: modulus mismatch");
        if (conductor(zeta) != m) throw std::invalid_argument("PairMZ: zeta must be primitive");
    }

    friend bool operator==(const PairMZ& a, const PairMZ& b) {
        return a.m == b.m && a.zeta == b.zeta;
    }
    friend bool operator<(const PairMZ& a, const PairMZ& b) {
        if (a.m != b.m) return a.m < b.m;
        return a.zeta < b.zeta;
    }
};

/// All primitive pairs with modulus <= bound.
inline std::vector<PairMZ> all_primitive_pairs(long bound) {
    std::vector<PairMZ> out;
    for (long m = 1; m <= bound; ++m)
        for (const auto& z : primitive_characters(m)) out.emplace_back(m, z);
    return out;
}

/// pi-equivalence: the pi'-parts of the moduli and of the characters agree.
inline bool pi_equivalent(const PairMZ& a, const PairMZ& b, const std::vector<long>& pi) {
    return a.zeta.pi_complement(pi) == b.zeta.pi_complement(pi);
}

namespace detail {

/// The prime p with |A| = p^k, k >= 1; rejects other fibers.
inline long fiber_prime(const FiberSpec& A) {
    if (A.mode != FiberSpec::Mode::finite)
        throw std::invalid_argument("fiber relation: A must be a finite cyclic p-group");
    auto ps = factorize(A.N);
    if (ps.size() != 1)
        throw std::invalid_argument("fiber relation: A must be a finite cyclic p-group");
    return ps.front().first;
}

}  // namespace detail

/// Outcome of the A-equivalence test; in the large case the scalars list holds
/// (j_alpha, c_alpha) with proj_alpha(b-tilde_p) = c_alpha * proj_alpha(a-tilde_p)
/// for each faithful alpha.
struct AEquivResult {
    bool equivalent = false;
    std::vector<std::pair<long, CycNumber>> scalars;
};

/// A-equivalence for a finite cyclic p-group fiber: condition (1) is
/// p-equivalence of the pairs; condition (2) holds outright when both p-parts
/// are at most |A|, and otherwise requires equal p-parts and proportional
/// faithful projections. Proportionality for one faithful alpha implies it for
/// all; the implementation checks every alpha and treats disagreement as an
/// internal error.
inline AEquivResult a_equivalent(const PairMZ& a, const PairMZ& b, const FiberSpec& A) {
    long p = detail::fiber_prime(A);
    AEquivResult res;
    if (!pi_equivalent(a, b, {p})) return res;
    long np = p_part(a.m, p), mp = p_part(b.m, p);
    long na = A.N;
    if (np <= na && mp <= na) {
        res.equivalent = true;
        return res;
    }
    if (np != mp) return res;
    VirtualCharacter at = dirichlet_extend(a.zeta.p_component(p));
    VirtualCharacter bt = dirichlet_extend(b.zeta.p_component(p));
    size_t hits = 0, misses = 0;
    for (long j : units_mod(na)) {
        CyclicHom alpha(na, na, j);
        auto u = nu_alpha(bt, alpha).coeffs();
        auto v = nu_alpha(at, alpha).coeffs();
        if (auto c = is_proportional(u, v)) {
            res.scalars.emplace_back(j, *c);
            ++hits;
        } else {
            ++misses;
        }
    }
    if (hits != 0 && misses != 0)
        throw std::logic_error("a_equivalent: proportionality differs across faithful alpha");
    res.equivalent = misses == 0;
    if (!res.equivalent) res.scalars.clear();
    return res;
}

/// Which equivalence partitions the pairs: a prime set pi, or a finite cyclic
/// p-group fiber A.
struct Relation {
    enum class Kind { pi, fiber };
    Kind kind = Kind::pi;
    std::vector<long> pi;
    FiberSpec A = FiberSpec::finite(1);

    static Relation pi_relation(std::vector<long> primes) {
        Relation r;
        r.kind = Kind::pi;
        r.pi = std::move(primes);
        return r;
    }
    static Relation fiber_relation(FiberSpec fiber) {
        Relation r;
        r.kind = Kind::fiber;
        r.A = std::move(fiber);
        detail::fiber_prime(r.A);
        return r;
    }
};

inline bool equivalent(const PairMZ& a, const PairMZ& b, const Relation& rel) {
    if (rel.kind == Relation::Kind::pi) return pi_equivalent(a, b, rel.pi);
    return a_equivalent(a, b, rel.A).equivalent;
}

enum class SummandKind { small, large };

/// One equivalence class of pairs: the label of a simple summand. Members are
/// complete up to the stated bound; evaluation_dims maps each n <= bound to
/// the dimension of the summand's evaluation at Z/nZ.
struct SummandDescriptor {
    SummandKind kind = SummandKind::small;
    PairMZ representative;
    std::vector<PairMZ> members;
    long bound = 0;
    std::map<long, long> evaluation_dims;
};

/// Dimension of the summand's evaluation at Z/nZ: a member (m, zeta) with
/// m | n contributes one line for each modulus d with m | d | n (the character
/// of conductor m seen mod d), so tau(n/m) in total. Summing over all classes
/// recovers sum over d | n of phi(d) = n. Members must be enumerated at least
/// up to n.
inline long evaluation_dimension(const SummandDescriptor& d, long n) {
    if (n > d.bound) throw std::invalid_argument("evaluation_dimension: bound too small");
    long dim = 0;
    for (const auto& mem : d.members)
        if (n % mem.m == 0) dim += static_cast<long>(divisors(n / mem.m).size());
    return dim;
}

/// Partition of all primitive pairs with modulus <= bound into equivalence
/// classes, with representatives and evaluation dimensions.
inline std::vector<SummandDescriptor> enum_classes(long bound, const Relation& rel) {
    std::vector<std::vector<PairMZ>> classes;
    for (const auto& pr : all_primitive_pairs(bound)) {
        bool placed = false;
        for (auto& cls : classes)
            if (equivalent(cls.front(), pr, rel)) {
                cls.push_back(pr);
                placed = true;
                break;
            }
        if (!placed) classes.push_back({pr});
    }
    std::vector<SummandDescriptor> out;
    for (auto& cls : classes) {
        std::sort(cls.begin(), cls.end());
        size_t rep = 0;
        if (rel.kind == Relation::Kind::pi) {
            // the unique member with pi'-number modulus
            for (size_t i = 0; i < cls.size(); ++i)
                if (pi_part(cls[i].m, rel.pi) == 1) { rep = i; break; }
        }
        // fiber relation: minimal modulus, then least images: the sort order
        SummandDescriptor d{SummandKind::small, cls[rep], {}, bound, {}};
        d.members = cls;
        if (rel.kind == Relation::Kind::fiber &&
            p_part(d.representative.m, detail::fiber_prime(rel.A)) > rel.A.N)
            d.kind = SummandKind::large;
        for (long n = 1; n <= bound; ++n) d.evaluation_dims[n] = evaluation_dimension(d, n);
        out.push_back(std::move(d));
    }
    return out;
}

/// A witness element together with the outcome of the act_generic check.
struct WitnessResult {
    BisetElement element;
    bool verified = false;
};

/// An explicit element X with act(X, source-tilde) = target-tilde, built from
/// the generation arguments: twisted inflation upward to the target, averaged
/// twisted deflation downward from the source (through the common pi'-part),
/// and in the large-fiber case a scalar combination of the f-idempotents
/// crossed with the identity.
inline WitnessResult witness_generation(const PairMZ& source, const PairMZ& target,
                                        const Relation& rel) {
    if (!equivalent(source, target, rel))
        throw std::invalid_argument("witness_generation: pairs not equivalent");
    std::vector<long> pi =
        rel.kind == Relation::Kind::pi ? rel.pi : std::vector<long>{detail::fiber_prime(rel.A)};
    long n1 = source.m, n2 = target.m;
    long s1 = pi_part(n1, pi), s2 = pi_part(n2, pi);
    FiberSpec F = rel.kind == Relation::Kind::fiber ? rel.A : FiberSpec::finite(std::lcm(s1, s2));
    auto verify = [&](BisetElement X) {
        bool ok = act_generic(X, dirichlet_extend(source.zeta)) == dirichlet_extend(target.zeta);
        return WitnessResult{std::move(X), ok};
    };
    if (source == target) return verify(BisetElement::identity(n1, F));

    if (rel.kind == Relation::Kind::fiber && s1 > rel.A.N) {
        // large kind: equal moduli; sum of c_beta f_{(A,beta)} on the p-part
        long p = pi.front();
        long q = s1, rest = n1 / q, na = rel.A.N;
        VirtualCharacter srcp = dirichlet_extend(source.zeta.p_component(p));
        VirtualCharacter tgtp = dirichlet_extend(target.zeta.p_component(p));
        BisetElement xp = BisetElement::zero(q, q, F);
        Subgroup K(CyclicGroup(q), q / na);
        for (long j : units_mod(na)) {
            CyclicHom beta(na, na, j);
            auto u = nu_alpha(tgtp, beta).coeffs();
            auto v = nu_alpha(srcp, beta).coeffs();
            auto c = is_proportional(u, v);
            if (!c) throw std::logic_error("witness_generation: certificate scalar missing");
            xp = xp + basic_f(K, beta, F).scaled(*c);
        }
        return verify(detail::cross_with_identity(xp, rest, rest));
    }

    // small / pi kind: route through the common pi'-representative
    DirichletCharacter zrep = source.zeta.pi_complement(pi);
    long mrep = zrep.modulus();
    long N = F.working_level;
    auto up = [&](long n, const DirichletCharacter& nu) {
        long s = n / mrep;
        if (s == 1) return BisetElement::identity(mrep, F);
        VirtualCharacter nupi = dirichlet_extend(nu.pi_component(pi));
        BisetElement infE = basic_inf(n, mrep, F);
        BisetElement acc = BisetElement::zero(n, mrep, F);
        for (long j = 0; j < s; ++j) {
            if (nupi.coeff(j).is_zero()) continue;
            acc = acc + mackey_product(basic_tw(CyclicHom(n, N, (N / s) * j), F), infE)
                            .scaled(nupi.coeff(j));
        }
        return acc;
    };
    auto down = [&](long n, const DirichletCharacter& nu) {
        long s = n / mrep;
        if (s == 1) return BisetElement::identity(mrep, F);
        VirtualCharacter nupi = dirichlet_extend(nu.pi_component(pi));
        BisetElement defE = basic_def(n, mrep, F);
        BisetElement acc = BisetElement::zero(mrep, n, F);
        // sum_t d_t Def Tw^{chi^t} with d_t = (s/phi(s)) conj(c_{-t}) inverts
        // the upward twist: sum_t d_t c_{-t} = (s/phi(s)) <nu~, nu~> = 1
        Rational corr(s, euler_phi(s));
        for (long t = 0; t < s; ++t) {
            CycNumber c = nupi.coeff(mod_norm(-t, s)).conjugate().scaled(corr);
            if (c.is_zero()) continue;
            acc = acc + mackey_product(defE, basic_tw(CyclicHom(n, N, (N / s) * t), F)).scaled(c);
        }
        return acc;
    };
    return verify(mackey_product(up(n2, target.zeta), down(n1, source.zeta)));
}

/// The scalar by which Tw^phi Iso^sigma e_{(A,alpha)} acts on the line of the
/// alpha-projection of zeta-tilde. Computed in closed form from the Iso and Tw
/// lemmas and cross-checked by the generic action.
inline CycNumber gamma_module_scalar(const PairMZ& z, const CyclicHom& alpha,
                                     const CyclicHom& phi, long sigma, const FiberSpec& A) {
    long m = z.m;
    long na = A.working_level;
    if (A.mode != FiberSpec::Mode::finite)
        throw std::invalid_argument("gamma_module_scalar: finite fiber required");
    if (alpha.source_order != na || alpha.target_order != na)
        throw std::invalid_argument("gamma_module_scalar: alpha must be A -> A");
    if (na > 1 && std::gcd(alpha.generator_image, na) != 1)
        throw std::invalid_argument("gamma_module_scalar: alpha must be faithful");
    if (phi.source_order != m || phi.target_order != na)
        throw std::invalid_argument("gamma_module_scalar: phi must be G -> A");
    if (m % na != 0 || na >= m)
        throw std::invalid_argument("gamma_module_scalar: need A < G");
    auto r1 = iso_on_nu_alpha(sigma, z.zeta, alpha);
    long s_exp = (phi.generator_image * m) / na;  // phi as the character chi^s
    auto r2 = tw_on_nu_alpha(s_exp, z.zeta, r1.target);
    if (!(r2.target == alpha))
        throw std::invalid_argument("gamma_module_scalar: element does not stabilize alpha");
    CycNumber closed = r1.scalar * r2.scalar;
    // cross-check against the literal action
    Subgroup K(CyclicGroup(m), m / na);
    BisetElement X = mackey_product(
        mackey_product(basic_tw(phi, A), basic_iso(m, sigma, A)), basic_e(K, alpha, A));
    VirtualCharacter ztilde = dirichlet_extend(z.zeta);
    VirtualCharacter line = nu_alpha(ztilde, alpha);
    VirtualCharacter res = act_generic(X, ztilde);
    auto c = is_proportional(std::span(res.coeffs()), std::span(line.coeffs()));
    if (!c || !(*c == closed))
        throw std::logic_error("gamma_module_scalar: closed form disagrees with the action");
    return closed;
}

/// Composition-factor labels for the p-permutation functor: the pairs with
/// p'-modulus up to the bound.
inline std::vector<PairMZ> p_perm_factors(long p, long bound) {
    std::vector<PairMZ> out;
    for (const auto& pr : all_primitive_pairs(bound))
        if (std::gcd(pr.m, p) == 1) out.push_back(pr);
    return out;
}

}  // namespace fbc
