#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "characters.hpp"
#include "fibered.hpp"

namespace fbc {
namespace oracle {

/// Explicit element-level model of the transitive fibered biset of a pair
/// (U, phi): the set (A x (G x H)) / U with U acting by
/// (a, w) -> (a + phi(u), w - u). Elements are normalized to (fiber value,
/// canonical coset representative); the left G x H action is translation on
/// the representative and A acts on the fiber value.
class ExplicitFiberedSet {
public:
    explicit ExplicitFiberedSet(const FiberedPair& p)
        : n_(p.left_order()), m_(p.right_order()), N_(p.fiber_level()) {
        long total = n_ * m_;
        rep_of_.assign(static_cast<size_t>(total), -1);
        shift_of_.assign(static_cast<size_t>(total), 0);
        // elements of U
        std::vector<std::pair<long, long>> uelems;
        for (long u = 0; u < n_; ++u)
            for (long v = 0; v < m_; ++v)
                if (p.contains(u, v)) uelems.emplace_back(u, v);
        for (long w = 0; w < total; ++w) {
            long u = w / m_, v = w % m_;
            long best = w;
            for (auto [du, dv] : uelems) {
                long cand = mod_norm(u + du, n_) * m_ + mod_norm(v + dv, m_);
                if (cand < best) best = cand;
            }
            rep_of_[static_cast<size_t>(w)] = best;
            // shift = phi(w - rep)
            long ru = best / m_, rv = best % m_;
            shift_of_[static_cast<size_t>(w)] = p.phi_eval(u - ru, v - rv);
            if (best == w) rep_index_.emplace_back(w);
        }
        index_of_.assign(static_cast<size_t>(total), -1);
        for (size_t i = 0; i < rep_index_.size(); ++i)
            index_of_[static_cast<size_t>(rep_index_[i])] = static_cast<long>(i);
    }

    long left_order() const { return n_; }
    long right_order() const { return m_; }
    long fiber_order() const { return N_; }
    long orbit_count() const { return static_cast<long>(rep_index_.size()); }
    long size() const { return N_ * orbit_count(); }

    /// Normalized element after translating representative r by (du, dv):
    /// returns (new representative index, fiber shift to add).
    std::pair<long, long> translate(long rep_idx, long du, long dv) const {
        long w = rep_index_[static_cast<size_t>(rep_idx)];
        long u = mod_norm(w / m_ + du, n_), v = mod_norm(w % m_ + dv, m_);
        long w2 = u * m_ + v;
        return {index_of_[static_cast<size_t>(rep_of_[static_cast<size_t>(w2)])],
                shift_of_[static_cast<size_t>(w2)]};
    }

private:
    long n_, m_, N_;
    std::vector<long> rep_of_, shift_of_, index_of_;
    std::vector<long> rep_index_;
};

namespace detail {

struct UnionFind {
    std::vector<long> parent;
    explicit UnionFind(long n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0L);
    }
    long find(long x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(long a, long b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<size_t>(a)] = b;
    }
};

}  // namespace detail

/// Reference tensor product: enumerate the elements of X x Y, glue along the
/// AH-relation (x*alpha, y) ~ (x, alpha*y), form G x L x A orbits, discard the
/// non-A-free ones and read off a stabilizing pair for each of the rest.
inline BisetElement enumerate_tensor_product(const FiberedPair& x, const FiberedPair& y,
                                             long cap = 1L << 20) {
    if (x.right_order() != y.left_order() || !(x.fiber() == y.fiber()))
        throw std::invalid_argument("enumerate_tensor_product: shape mismatch");
    long n = x.left_order(), m = x.right_order(), l = y.right_order();
    long N = x.fiber_level();
    ExplicitFiberedSet X(x), Y(y);
    long cx = X.orbit_count(), cy = Y.orbit_count();
    long nodes = (N * cx) * (N * cy);
    if (nodes > cap) throw std::invalid_argument("enumerate_tensor_product: cap exceeded");

    auto encode = [&](long ax, long rx, long ay, long ry) {
        return ((ax * cx + rx) * N + ay) * cy + ry;
    };
    auto decode = [&](long z, long& ax, long& rx, long& ay, long& ry) {
        ry = z % cy;
        z /= cy;
        ay = z % N;
        z /= N;
        rx = z % cx;
        ax = z / cx;
    };

    // orbit of (x, y) under the gluing: {(x*alpha^{-1}, alpha*y)} for alpha in AH
    detail::UnionFind glue(nodes);
    detail::UnionFind full(nodes);
    for (long z = 0; z < nodes; ++z) {
        long ax, rx, ay, ry;
        decode(z, ax, rx, ay, ry);
        // alpha = generator of H: x*h^{-1} = (1, h) on x, h*y = (h, 1) on y
        {
            auto [rx2, sx] = X.translate(rx, 0, 1);
            auto [ry2, sy] = Y.translate(ry, 1, 0);
            long z2 = encode(mod_norm(ax + sx, N), rx2, mod_norm(ay + sy, N), ry2);
            glue.unite(z, z2);
            full.unite(z, z2);
        }
        // alpha = generator of A
        {
            long z2 = encode(mod_norm(ax - 1, N), rx, mod_norm(ay + 1, N), ry);
            glue.unite(z, z2);
            full.unite(z, z2);
        }
        // left G on x
        {
            auto [rx2, sx] = X.translate(rx, 1, 0);
            full.unite(z, encode(mod_norm(ax + sx, N), rx2, ay, ry));
        }
        // right L on y: y*l = (1, l^{-1}) on y
        {
            auto [ry2, sy] = Y.translate(ry, 0, -1);
            full.unite(z, encode(ax, rx, mod_norm(ay + sy, N), ry2));
        }
        // A on the tensor
        full.unite(z, encode(mod_norm(ax + 1, N), rx, ay, ry));
    }

    // helper: the node reached from base z by acting with (g, lam, a) as
    // g * z * lam^{-1} plus an extra fiber translate a on the x side
    auto acted = [&](long z, long g, long lam, long a) {
        long ax, rx, ay, ry;
        decode(z, ax, rx, ay, ry);
        auto [rx2, sx] = X.translate(rx, g, 0);
        auto [ry2, sy] = Y.translate(ry, 0, lam);
        return encode(mod_norm(ax + sx + a, N), rx2, mod_norm(ay + sy, N), ry2);
    };

    BisetElement result(n, l, x.fiber());
    std::vector<char> seen(static_cast<size_t>(nodes), 0);
    for (long z = 0; z < nodes; ++z) {
        long root = full.find(z);
        if (seen[static_cast<size_t>(root)]) continue;
        seen[static_cast<size_t>(root)] = 1;
        long base = z;
        long base_glue = glue.find(base);
        // A-freeness of the orbit, tested at the base point
        bool free = true;
        for (long a = 1; a < N && free; ++a)
            if (glue.find(acted(base, 0, 0, a)) == base_glue) free = false;
        if (!free) continue;
        // stabilizing pair at the base point: all (g, lam) with
        // g * base * lam^{-1} = a * base for some a
        std::vector<PairGen> gens;
        for (long g = 0; g < n; ++g)
            for (long lam = 0; lam < l; ++lam) {
                // acted applies an extra a on top of g * base * lam^{-1}, so a
                // match at a means g * base * lam^{-1} = (-a) * base
                for (long a = 0; a < N; ++a)
                    if (glue.find(acted(base, g, lam, a)) == base_glue) {
                        gens.push_back({g, lam, mod_norm(-a, N)});
                        break;
                    }
            }
        result.add(FiberedPair(n, l, x.fiber(), std::move(gens)), CycNumber::one());
    }
    return result;
}

/// Reference action on characters via the monomial bimodule trace: theta(h,g)
/// is the trace of y -> h*y*g on the A-orbit basis of the model, and
/// (Y chi)(h) = (1/|G|) sum_g theta(h, g) chi(g^{-1}).
inline VirtualCharacter bimodule_action_trace(const FiberedPair& y, const VirtualCharacter& chi) {
    if (y.right_order() != chi.group_order())
        throw std::invalid_argument("bimodule_action_trace: order mismatch");
    long hsize = y.left_order(), gsize = y.right_order();
    long N = y.fiber_level();
    ExplicitFiberedSet Y(y);
    auto chivals = chi.values();
    std::vector<CycNumber> vals(static_cast<size_t>(hsize), CycNumber::zero());
    for (long h = 0; h < hsize; ++h) {
        CycNumber acc = CycNumber::zero();
        for (long g = 0; g < gsize; ++g) {
            // theta(h, g): y*g = (1, g^{-1}) y, so translate by (h, -g)
            CycNumber theta = CycNumber::zero();
            for (long r = 0; r < Y.orbit_count(); ++r) {
                auto [r2, s] = Y.translate(r, h, -g);
                if (r2 == r) theta += root_of_unity(N, s);
            }
            if (!theta.is_zero())
                acc += theta * chivals[static_cast<size_t>(mod_norm(-g, gsize))];
        }
        vals[static_cast<size_t>(h)] = acc.scaled(Rational(1, gsize));
    }
    return VirtualCharacter::from_values(hsize, vals);
}

/// Every transitive pair over (Z/n, Z/m): Hermite data (a | n, c | m,
/// 0 <= b < c) with all well-defined fiber maps.
inline std::vector<FiberedPair> all_transitive_pairs(long n, long m, const FiberSpec& fiber) {
    long N = fiber.working_level;
    std::vector<FiberedPair> out;
    for (long a : divisors(n))
        for (long c : divisors(m))
            for (long b = 0; b < c; ++b)
                for (long f1 = 0; f1 < N; ++f1)
                    for (long f2 = 0; f2 < N; ++f2) {
                        try {
                            FiberedPair p(n, m, fiber, {{a, b, f1}, {0, c, f2}});
                            if (p.a() == a && p.b() == b && p.c() == c && p.phi1() == f1 &&
                                p.phi2() == f2)
                                out.push_back(std::move(p));
                        } catch (const std::invalid_argument&) {
                            // phi not well-defined on this lattice; skip
                        }
                    }
    return out;
}

/// Brute-force reducedness: search for a factorization of the idempotent
/// through a strictly smaller cyclic group, one transitive element on each
/// side (sufficient per the structure of such factorizations). Returns true
/// iff no factorization exists.
inline bool exhaustive_reducedness(const FiberedPair& e_pair, const FiberSpec& A, long cap = 8) {
    long n = e_pair.left_order();
    if (e_pair.right_order() != n)
        throw std::invalid_argument("exhaustive_reducedness: need a (G, G)-pair");
    if (n > cap) throw std::invalid_argument("exhaustive_reducedness: cap exceeded");
    BisetElement target = BisetElement::transitive(e_pair);
    for (long h = 1; h < n; ++h) {
        auto lefts = all_transitive_pairs(n, h, A);
        auto rights = all_transitive_pairs(h, n, A);
        for (const auto& xl : lefts) {
            if (xl.a() != 1) continue;  // p1 must be all of G
            for (const auto& yr : rights) {
                if (std::gcd(yr.b(), yr.c()) != 1) continue;  // p2 must be all of G
                // the double-coset count must be 1 for a single-class product
                if (std::gcd(std::gcd(xl.b(), xl.c()), yr.a()) != 1) continue;
                if (enumerate_tensor_product(xl, yr) == target) return false;
            }
        }
    }
    return true;
}

}  // namespace oracle
}  // namespace fbc
