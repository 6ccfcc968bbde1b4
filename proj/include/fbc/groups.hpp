#pragma once

#include <stdexcept>
#include <vector>

#include "numtheory.hpp"

namespace fbc {

/// The cyclic group Z/nZ, written additively; elements are residues 0..n-1.
struct CyclicGroup {
    long order = 1;

    explicit CyclicGroup(long n) : order(n) {
        if (n < 1) throw std::invalid_argument("CyclicGroup: order >= 1 required");
    }
    friend bool operator==(const CyclicGroup&, const CyclicGroup&) = default;
};

/// The unique subgroup of Z/nZ of order n/d, namely dZ/nZ, identified by the
/// index divisor d.
struct Subgroup {
    CyclicGroup ambient;
    long index_divisor;  // d | n; the subgroup is <d> of order n/d

    Subgroup(CyclicGroup g, long d) : ambient(g), index_divisor(d) {
        if (d < 1 || g.order % d != 0)
            throw std::invalid_argument("Subgroup: index divisor must divide the order");
    }
    long order() const { return ambient.order / index_divisor; }
    long generator() const { return index_divisor % ambient.order; }
    bool contains(long x) const { return mod_norm(x, ambient.order) % index_divisor == 0; }
    friend bool operator==(const Subgroup&, const Subgroup&) = default;
};

/// The fiber group A: either mu_N (N-th roots of unity) or the truncation of
/// pi^infinity at a finite working level. Elements of A are represented
/// additively as residues in Z/working_level.
struct FiberSpec {
    enum class Mode { finite, pi_infinity };
    Mode mode = Mode::finite;
    long N = 1;                   // finite mode: |A|
    std::vector<long> pi;         // pi_infinity mode: the prime set (sorted)
    long working_level = 1;       // finite mode: = N; pi mode: the truncation order

    static FiberSpec finite(long N) {
        FiberSpec f;
        f.mode = Mode::finite;
        f.N = N;
        f.working_level = N;
        return f;
    }

    /// pi^infinity truncated so that every homomorphism from groups of the
    /// given exponents into pi^infinity factors through the working level.
    static FiberSpec pi_infinity(std::vector<long> primes, const std::vector<long>& group_exponents) {
        std::sort(primes.begin(), primes.end());
        primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
        long l = 1;
        for (long e : group_exponents) l = lcm_l(l, e);
        FiberSpec f;
        f.mode = Mode::pi_infinity;
        f.pi = std::move(primes);
        f.working_level = pi_part(l, f.pi);
        f.N = f.working_level;
        return f;
    }

    friend bool operator==(const FiberSpec&, const FiberSpec&) = default;
};

/// A homomorphism Z/nZ -> Z/NZ determined by the image of the generator 1.
struct CyclicHom {
    long source_order;
    long target_order;
    long generator_image;  // a with n*a = 0 (mod N)

    CyclicHom(long n, long N, long a)
        : source_order(n), target_order(N), generator_image(mod_norm(a, N)) {
        if ((Integer(n) * generator_image) % N != 0)
            throw std::invalid_argument("CyclicHom: n*a != 0 (mod N), not well-defined");
    }
    long operator()(long x) const {
        return mod_norm((mod_norm(x, source_order) * generator_image) % target_order,
                        target_order);
    }
    bool is_trivial() const { return generator_image == 0; }
    friend bool operator==(const CyclicHom&, const CyclicHom&) = default;
    friend auto operator<=>(const CyclicHom&, const CyclicHom&) = default;
};

/// One Subgroup per divisor of |G|, sorted by order.
inline std::vector<Subgroup> subgroups(const CyclicGroup& g) {
    std::vector<Subgroup> out;
    auto ds = divisors(g.order);
    for (auto it = ds.rbegin(); it != ds.rend(); ++it) out.emplace_back(g, *it);
    return out;
}

/// All homomorphisms Z/nZ -> A; the set has gcd(n, |A|) elements and is a
/// group under pointwise product.
inline std::vector<CyclicHom> hom_set(long n, const FiberSpec& A) {
    long N = A.working_level;
    std::vector<CyclicHom> out;
    long step = N / std::gcd(n, N);
    for (long a = 0; a < N; a += step) out.emplace_back(n, N, a);
    return out;
}

/// True iff h restricted to the subgroup has trivial kernel there.
inline bool is_faithful(const CyclicHom& h, const Subgroup& on) {
    if (on.ambient.order != h.source_order)
        throw std::invalid_argument("is_faithful: subgroup/hom mismatch");
    // kernel on the subgroup <d> of order k = n/d is trivial iff h(d) has order k
    long k = on.order();
    if (k == 1) return true;
    long img = h(on.generator());
    if (img == 0) return false;
    long ord = h.target_order / std::gcd(img, h.target_order);
    return ord == k;
}

/// Restriction of h: Z/nZ -> A to a subgroup, as a homomorphism from the
/// abstract cyclic group of the subgroup's order.
inline CyclicHom restrict_hom(const CyclicHom& h, const Subgroup& to) {
    if (to.ambient.order != h.source_order)
        throw std::invalid_argument("restrict_hom: subgroup/hom mismatch");
    return CyclicHom(to.order(), h.target_order, h(to.generator()));
}

/// All homomorphisms G -> A restricting to h on the subgroup; empty when no
/// extension exists.
inline std::vector<CyclicHom> extensions(const CyclicHom& h, const Subgroup& on,
                                         const FiberSpec& A) {
    if (on.order() != h.source_order)
        throw std::invalid_argument("extensions: hom must live on the subgroup");
    if (h.target_order != A.working_level)
        throw std::invalid_argument("extensions: hom target must be the fiber level");
    std::vector<CyclicHom> out;
    for (const auto& cand : hom_set(on.ambient.order, A))
        if (restrict_hom(cand, on) == h) out.push_back(cand);
    return out;
}

/// Prime-power decomposition of n ("G = prod_p G_p").
inline std::vector<long> coprime_split(long n) { return prime_power_factors(n); }

}  // namespace fbc
