#pragma once

#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "groups.hpp"

namespace fbc {

/// Generator row for a subgroup of Z/n x Z/m with a fiber value: the element
/// (x, y) with phi(x, y) = f in Z/N.
struct PairGen {
    long x, y, f;
};

/// Goursat data (P, K, eta, L, Q) of a subgroup U <= G x H: P = p1(U),
/// K = k1(U), L = k2(U), Q = p2(U), and eta the induced isomorphism
/// Q/L -> P/K recorded as multiplication by a unit of Z/(|P|/|K|).
struct GoursatQuintuple {
    Subgroup P, K, L, Q;
    long eta;  // unit of Z/(|P|/|K|)
};

/// Left or right invariant triple (projection, kernel subgroup, fiber
/// restriction) of a stabilizing pair.
struct InvariantTriple {
    Subgroup p;
    Subgroup k;
    CyclicHom phi_restriction;  // on the abstract cyclic group of |k|
    friend bool operator==(const InvariantTriple&, const InvariantTriple&) = default;
};

/// A stabilizing pair (U, phi) for U <= Z/n x Z/m and phi: U -> A, in
/// canonical form: U is stored by its Hermite-basis columns v1 = (a, b),
/// v2 = (0, c) (a | n, c | m, 0 <= b < c) and phi by its images on v1, v2.
/// Structural equality of the fields is equality of pairs.
class FiberedPair {
public:
    FiberedPair(long n, long m, FiberSpec fiber, std::vector<PairGen> gens)
        : n_(n), m_(m), fiber_(std::move(fiber)) {
        if (n < 1 || m < 1) throw std::invalid_argument("FiberedPair: orders >= 1");
        canonicalize(std::move(gens));
    }

    long left_order() const { return n_; }
    long right_order() const { return m_; }
    const FiberSpec& fiber() const { return fiber_; }
    long fiber_level() const { return fiber_.working_level; }
    long a() const { return a_; }
    long b() const { return b_; }
    long c() const { return c_; }
    long phi1() const { return f1_; }
    long phi2() const { return f2_; }

    long subgroup_size() const { return (n_ / a_) * (m_ / c_); }

    bool contains(long x, long y) const {
        x = mod_norm(x, n_);
        y = mod_norm(y, m_);
        if (x % a_ != 0) return false;
        return mod_norm(y - (x / a_) * b_, m_) % c_ == 0;
    }

    /// phi(x, y) for (x, y) in U, as a residue in Z/N.
    long phi_eval(long x, long y) const {
        x = mod_norm(x, n_);
        y = mod_norm(y, m_);
        if (!contains(x, y)) throw std::invalid_argument("phi_eval: element not in U");
        long i = x / a_;
        long j = mod_norm(y - i * b_, m_) / c_;
        long N = fiber_level();
        return mod_norm((i % N) * f1_ + (j % N) * f2_, N);
    }

    InvariantTriple left_invariants() const {
        CyclicGroup G(n_);
        Subgroup P(G, a_);
        long t = c_ / std::gcd(b_, c_);
        long dk = std::gcd(a_ * t, n_);
        Subgroup K(G, dk);
        // phi1(x) = phi(x, 0) on K
        long gi = K.order() == 1 ? 0 : phi_eval(dk, 0);
        return {P, K, CyclicHom(K.order(), fiber_level(), gi)};
    }

    InvariantTriple right_invariants() const {
        CyclicGroup H(m_);
        Subgroup Q(H, std::gcd(b_, c_));
        long dl = std::gcd((n_ / a_) * b_, c_);
        Subgroup L(H, dl);
        // convention phi|_{KxL} = phi1 x phi2^{-1}: phi2(y) = -phi(0, y)
        long gi = L.order() == 1 ? 0 : mod_norm(-phi_eval(0, dl), fiber_level());
        return {Q, L, CyclicHom(L.order(), fiber_level(), gi)};
    }

    /// phi restricted to 1 x L, without the inversion convention.
    CyclicHom phi_on_right_kernel() const {
        long dl = std::gcd((n_ / a_) * b_, c_);
        long order = m_ / dl;
        long gi = order == 1 ? 0 : phi_eval(0, dl);
        return CyclicHom(order, fiber_level(), gi);
    }

    /// phi restricted to K x 1.
    CyclicHom phi_on_left_kernel() const {
        long t = c_ / std::gcd(b_, c_);
        long dk = std::gcd(a_ * t, n_);
        long order = n_ / dk;
        long gi = order == 1 ? 0 : phi_eval(dk, 0);
        return CyclicHom(order, fiber_level(), gi);
    }

    /// Swap coordinates of U and invert phi.
    FiberedPair opposite() const {
        long N = fiber_level();
        return FiberedPair(m_, n_, fiber_,
                           {{b_, a_, mod_norm(-f1_, N)}, {c_, 0, mod_norm(-f2_, N)}});
    }

    auto key() const { return std::tie(n_, m_, a_, b_, c_, f1_, f2_); }

    friend bool operator==(const FiberedPair& x, const FiberedPair& y) {
        return x.key() == y.key() && x.fiber_ == y.fiber_;
    }
    friend bool operator<(const FiberedPair& x, const FiberedPair& y) {
        return x.key() < y.key();
    }

    std::string str() const {
        std::ostringstream os;
        os << "[U(" << n_ << "x" << m_ << "); v1=(" << a_ << "," << b_ << ") v2=(0," << c_
           << "); phi=(" << f1_ << "," << f2_ << ")/" << fiber_level() << "]";
        return os.str();
    }

private:
    void canonicalize(std::vector<PairGen> gens) {
        long N = fiber_level();
        for (auto& g : gens) {
            g.x = mod_norm(g.x, n_);
            g.y = mod_norm(g.y, m_);
            g.f = mod_norm(g.f, N);
        }
        // ambient relations join unreduced so the gcd elimination sees them
        gens.push_back({n_, 0, 0});
        gens.push_back({0, m_, 0});
        // eliminate first coordinates into a single row (a, b, f1)
        PairGen v1{0, 0, 0};
        for (auto& g : gens) {
            if (g.x == 0) continue;
            if (v1.x == 0) {
                v1 = g;
                g = {0, 0, 0};
                continue;
            }
            long s, t;
            long d = ext_gcd(v1.x, g.x, s, t);
            PairGen comb{d, mod_norm(s * v1.y + t * g.y, m_), mod_norm(s * v1.f + t * g.f, N)};
            long q1 = v1.x / d, q2 = g.x / d;
            // replace g by the eliminated combination q2*v1 - q1*g (x -> 0)
            PairGen elim{0, mod_norm(q2 * v1.y - q1 * g.y, m_),
                         mod_norm(q2 * v1.f - q1 * g.f, N)};
            v1 = comb;
            g = elim;
        }
        // second coordinate lattice from the x = 0 rows
        PairGen v2{0, 0, 0};
        for (auto& g : gens) {
            if (g.x != 0 || g.y == 0) continue;
            if (v2.y == 0) {
                v2 = g;
                g = {0, 0, 0};
                continue;
            }
            long s, t;
            long d = ext_gcd(v2.y, g.y, s, t);
            PairGen comb{0, d, mod_norm(s * v2.f + t * g.f, N)};
            long q1 = v2.y / d, q2 = g.y / d;
            PairGen elim{0, 0, mod_norm(q2 * v2.f - q1 * g.f, N)};
            v2 = comb;
            g = elim;
        }
        // leftover rows must carry trivial fiber values, else phi ill-defined
        for (auto& g : gens)
            if (g.x == 0 && g.y == 0 && mod_norm(g.f, N) != 0)
                throw std::invalid_argument(
                    "FiberedPair: phi not well-defined (relation " + std::to_string(g.f) +
                    " != 0 on a trivial element)");
        if (v1.x == 0) v1 = {n_, 0, 0};  // n_ == contributed row was consumed; restore
        if (v2.y == 0) v2 = {0, m_, 0};
        a_ = v1.x;
        c_ = v2.y;
        // reduce b into [0, c)
        long q = (v1.y - mod_norm(v1.y, c_)) / c_;
        b_ = mod_norm(v1.y, c_);
        f1_ = mod_norm(v1.f - q * v2.f, N);
        f2_ = mod_norm(v2.f, N);
        // well-definedness on the relation lattice
        long i = n_ / a_;
        if (mod_norm(i * b_, m_) % c_ != 0)
            throw std::logic_error("FiberedPair: relation (n,0) not representable");
        long t = mod_norm(i * b_, m_) / c_;
        // i*v1 - t*v2 = (n, 0) modulo multiples of (0, m); both relations must
        // carry value 0 for phi to descend to U
        if (mod_norm((m_ / c_) * f2_, N) != 0)
            throw std::invalid_argument("FiberedPair: phi does not annihilate (0, m)");
        if (mod_norm(i * f1_ - t * f2_, N) != 0)
            throw std::invalid_argument("FiberedPair: phi does not annihilate (n, 0)");
    }

    long n_, m_;
    FiberSpec fiber_;
    long a_ = 1, b_ = 0, c_ = 1;
    long f1_ = 0, f2_ = 0;
};

/// Goursat correspondence of a stabilizing pair's subgroup.
inline GoursatQuintuple goursat(const FiberedPair& u) {
    auto l = u.left_invariants();
    auto r = u.right_invariants();
    long rindex = l.p.order() / l.k.order();
    long eta = 1;
    if (rindex > 1) {
        // eta(q*L) = g*K for (g, q) in U with q the generator of Q
        long qgen = r.p.generator();
        long n = u.left_order();
        for (long g = 0; g < n; ++g) {
            if (u.contains(g, qgen)) {
                // g in coordinates of P/K: P = <a>, g = a*s, class s mod rindex
                long s = (g / l.p.index_divisor) % rindex;
                if (std::gcd(s, rindex) == 1) { eta = s; break; }
            }
        }
    }
    return {l.p, l.k, r.k, r.p, eta};
}

/// Inverse Goursat: rebuild the canonical pair from a quintuple plus phi
/// images on the subgroup generators K x 1, 1 x L and the graph generator.
inline FiberedPair from_quintuple(const GoursatQuintuple& q, const FiberSpec& fiber,
                                  long phi_on_k_gen, long phi_on_l_gen, long phi_on_graph_gen) {
    long n = q.P.ambient.order, m = q.Q.ambient.order;
    long rindex = q.P.order() / q.K.order();
    if (rindex != q.Q.order() / q.L.order())
        throw std::invalid_argument("from_quintuple: |P:K| != |Q:L|");
    if (std::gcd(q.eta, std::max(rindex, 1L)) != 1)
        throw std::invalid_argument("from_quintuple: eta not a unit");
    // graph generator: (eta * aP, qQ) where aP, qQ generate P and Q
    long g = mod_norm(q.eta * q.P.index_divisor, n);
    std::vector<PairGen> gens = {{q.K.generator(), 0, phi_on_k_gen},
                                 {0, q.L.generator(), phi_on_l_gen},
                                 {g, q.Q.index_divisor, phi_on_graph_gen}};
    return FiberedPair(n, m, fiber, std::move(gens));
}

/// A formal linear combination of stabilizing-pair classes: an element of
/// B^A(G, H) (integer coefficients) or CB^A(G, H) (cyclotomic coefficients).
class BisetElement {
public:
    enum class Ring { integral, cyclotomic };

    BisetElement(long left, long right, FiberSpec fiber, Ring ring = Ring::integral)
        : left_(left), right_(right), fiber_(std::move(fiber)), ring_(ring) {}

    static BisetElement transitive(FiberedPair p, CycNumber coeff = CycNumber::one(),
                                   Ring ring = Ring::integral) {
        BisetElement e(p.left_order(), p.right_order(), p.fiber(), ring);
        e.add(std::move(p), std::move(coeff));
        return e;
    }

    /// The identity element [Delta(G), 1] of B^A(G, G).
    static BisetElement identity(long n, const FiberSpec& fiber) {
        return transitive(FiberedPair(n, n, fiber, {{1, 1, 0}}));
    }

    static BisetElement zero(long left, long right, const FiberSpec& fiber) {
        return BisetElement(left, right, fiber);
    }

    long left_order() const { return left_; }
    long right_order() const { return right_; }
    const FiberSpec& fiber() const { return fiber_; }
    Ring ring() const { return ring_; }
    const std::map<FiberedPair, CycNumber>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(FiberedPair p, CycNumber coeff) {
        if (p.left_order() != left_ || p.right_order() != right_ || !(p.fiber() == fiber_))
            throw std::invalid_argument("BisetElement: pair shape mismatch");
        auto [it, inserted] = terms_.emplace(std::move(p), coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        } else if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }

    friend BisetElement operator+(const BisetElement& x, const BisetElement& y) {
        BisetElement r = x;
        for (const auto& [p, co] : y.terms_) r.add(p, co);
        return r;
    }
    friend BisetElement operator-(const BisetElement& x, const BisetElement& y) {
        BisetElement r = x;
        for (const auto& [p, co] : y.terms_) r.add(p, -co);
        return r;
    }

    BisetElement scaled(const CycNumber& s) const {
        BisetElement r(left_, right_, fiber_, Ring::cyclotomic);
        if (s.is_zero()) return r;
        for (const auto& [p, co] : terms_) r.add(p, co * s);
        return r;
    }

    BisetElement opposite() const {
        BisetElement r(right_, left_, fiber_, ring_);
        for (const auto& [p, co] : terms_) r.add(p.opposite(), co);
        return r;
    }

    friend bool operator==(const BisetElement& x, const BisetElement& y) {
        return x.left_ == y.left_ && x.right_ == y.right_ && x.fiber_ == y.fiber_ &&
               x.terms_ == y.terms_;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [p, co] : terms_) {
            if (!first) os << " + ";
            os << co.str() << "*" << p.str();
            first = false;
        }
        return os.str();
    }

private:
    long left_, right_;
    FiberSpec fiber_;
    Ring ring_;
    std::map<FiberedPair, CycNumber> terms_;
};

/// Mackey product of two transitive pairs over abelian groups: double cosets
/// are cosets of p2(U)*p1(V), conjugation is trivial, and every coset either
/// contributes the same class [U*V, phi*psi] or the product is zero.
inline std::optional<std::pair<FiberedPair, long>> mackey_transitive(const FiberedPair& u,
                                                                     const FiberedPair& v) {
    if (u.right_order() != v.left_order() || !(u.fiber() == v.fiber()))
        throw std::invalid_argument("mackey: middle order / fiber mismatch");
    long m = u.right_order();
    long N = u.fiber_level();
    // H_x = k2(U) cap k1(V) = <lcm of the two kernel generators>; the product
    // survives iff phi2 and psi1 agree there, checked on the generator
    long k2u = u.right_invariants().k.index_divisor;
    long k1v = v.left_invariants().k.index_divisor;
    long lc = std::lcm(k2u, k1v);  // divides m; lc = m means trivial intersection
    if (lc < m) {
        long lhs = mod_norm(-u.phi_eval(0, lc), N);
        long rhs = v.phi_eval(lc, 0);
        if (lhs != rhs) return std::nullopt;
    }
    // coefficient: [H : p2(U) * p1(V)]
    long q2 = std::gcd(u.b(), u.c());
    long q1 = v.a();
    long coset_count = std::gcd(q1, q2);
    // fiber-product generators
    long n = u.left_order(), l = v.right_order();
    long aU = u.a(), bU = u.b(), cU = u.c();
    long aV = v.a(), bV = v.b(), cV = v.c();
    // kernel of (i, j) -> i*bU + j*cU (mod aV)
    long g1 = std::gcd(cU, aV);
    long i0 = g1 / std::gcd(bU, g1);
    // solve cU * j0 = -bU * i0 (mod aV)
    long j0 = 0;
    {
        long rhs = mod_norm(-bU * i0, aV);
        long g = std::gcd(cU, aV);
        if (rhs % g != 0) throw std::logic_error("mackey: congruence unsolvable");
        if (aV / g > 1) j0 = mod_norm((rhs / g) * inv_mod(cU / g, aV / g), aV / g);
    }
    long j1 = aV / std::gcd(cU, aV);
    std::vector<PairGen> gens;
    auto push_composed = [&](long i, long j, long fval_u) {
        long g = mod_norm(i * aU, n);
        long h = i * bU + j * cU;  // divisible by aV as integer mod m... use exact
        long hmod = mod_norm(h, m);
        if (hmod % aV != 0) throw std::logic_error("mackey: h not in p1(V)");
        long k = mod_norm((hmod / aV) * bV, l);
        long fv = mod_norm(fval_u + (hmod / aV) * v.phi1(), N);
        gens.push_back({g, k, fv});
    };
    push_composed(i0, j0, mod_norm(i0 * u.phi1() + j0 * u.phi2(), N));
    push_composed(0, j1, mod_norm(j1 * u.phi2(), N));
    gens.push_back({0, cV, v.phi2()});
    FiberedPair uv(n, l, u.fiber(), std::move(gens));
    return std::make_pair(std::move(uv), coset_count);
}

/// Bilinear Mackey product of fibered biset elements.
inline BisetElement mackey_product(const BisetElement& x, const BisetElement& y) {
    if (x.right_order() != y.left_order() || !(x.fiber() == y.fiber()))
        throw std::invalid_argument("mackey_product: order/fiber mismatch");
    BisetElement r(x.left_order(), y.right_order(), x.fiber(),
                   x.ring() == BisetElement::Ring::cyclotomic ||
                           y.ring() == BisetElement::Ring::cyclotomic
                       ? BisetElement::Ring::cyclotomic
                       : BisetElement::Ring::integral);
    for (const auto& [u, cu] : x.terms())
        for (const auto& [v, cv] : y.terms())
            if (auto t = mackey_transitive(u, v))
                r.add(t->first, cu * cv * CycNumber(t->second));
    return r;
}

// ---------------------------------------------------------------------------
// basic bisets

/// Ind_H^G for the subgroup H of order m | n, as a (Z/n, Z/m)-element.
inline BisetElement basic_ind(long n, long m, const FiberSpec& fiber) {
    if (n % m != 0) throw std::invalid_argument("basic_ind: m must divide n");
    return BisetElement::transitive(FiberedPair(n, m, fiber, {{n / m, 1, 0}}));
}

inline BisetElement basic_res(long n, long m, const FiberSpec& fiber) {
    return basic_ind(n, m, fiber).opposite();
}

/// Inf_{G/N}^G for the quotient of order q | n, as a (Z/n, Z/q)-element.
inline BisetElement basic_inf(long n, long q, const FiberSpec& fiber) {
    if (n % q != 0) throw std::invalid_argument("basic_inf: q must divide n");
    return BisetElement::transitive(FiberedPair(n, q, fiber, {{1, 1, 0}}));
}

inline BisetElement basic_def(long n, long q, const FiberSpec& fiber) {
    return basic_inf(n, q, fiber).opposite();
}

/// Iso^u: transport of structure along multiplication by the unit u.
inline BisetElement basic_iso(long n, long u, const FiberSpec& fiber) {
    if (std::gcd(mod_norm(u, n) == 0 ? n : mod_norm(u, n), n) != 1)
        throw std::invalid_argument("basic_iso: u must be a unit mod n");
    return BisetElement::transitive(FiberedPair(n, n, fiber, {{u, 1, 0}}));
}

/// Tw^phi: twist at G by phi in G^A.
inline BisetElement basic_tw(const CyclicHom& phi, const FiberSpec& fiber) {
    long n = phi.source_order;
    return BisetElement::transitive(FiberedPair(n, n, fiber, {{1, 1, phi.generator_image}}));
}

/// e_{(K,kappa)} = [Delta_K(G), phi_kappa] with phi_kappa(g, h) = kappa(g - h).
inline BisetElement basic_e(const Subgroup& K, const CyclicHom& kappa, const FiberSpec& fiber) {
    if (kappa.source_order != K.order())
        throw std::invalid_argument("basic_e: kappa must live on K");
    long n = K.ambient.order;
    long d = K.index_divisor;
    return BisetElement::transitive(
        FiberedPair(n, n, fiber, {{1, 1, 0}, {d % n, 0, kappa.generator_image}}));
}

/// f_{(K,kappa)} = sum over (L,lambda) >= (K,kappa) of mu(|L:K|) e_{(L,lambda)};
/// for cyclic G the poset Mobius coefficient is the arithmetic mu(|L:K|).
inline BisetElement basic_f(const Subgroup& K, const CyclicHom& kappa, const FiberSpec& fiber) {
    long n = K.ambient.order;
    long d = K.index_divisor;
    BisetElement r = BisetElement::zero(n, n, fiber);
    for (long dl : divisors(d)) {
        long index = d / dl;  // |L : K|
        int mu = mobius(index);
        if (mu == 0) continue;
        Subgroup L(CyclicGroup(n), dl);
        // lambda on L restricting to kappa on K: K's generator is index*1_L
        for (const auto& lambda : hom_set(L.order(), fiber))
            if (lambda(mod_norm(index, L.order())) == kappa.generator_image)
                r = r + basic_e(L, lambda, fiber).scaled(CycNumber(mu));
    }
    return r;
}

// ---------------------------------------------------------------------------
// reducedness and idempotent splitting

/// Reducedness of e_{(K,kappa)}: per prime component, if |A|_p >= |G|_p the
/// pair must be trivial, otherwise kappa must be faithful on the component.
inline bool is_reduced(const Subgroup& K, const CyclicHom& kappa, const FiberSpec& A) {
    long n = K.ambient.order;
    long k = K.order();
    long N = A.working_level;
    if (kappa.source_order != k) throw std::invalid_argument("is_reduced: kappa not on K");
    for (auto [p, e] : factorize(n)) {
        long np = p_part(n, p);
        long kp = p_part(k, p);
        long Ap = p_part(N, p);
        if (Ap >= np) {
            if (kp != 1) return false;
        } else {
            // kappa restricted to the p-part of K must be faithful
            if (kp == 1) continue;
            long gi = kappa(k / kp);  // generator of the p-part of K
            if (gi == 0) return false;
            long ord = N / std::gcd(gi, N);
            if (ord != kp) return false;
        }
    }
    return true;
}

/// Split a non-reduced idempotent through G/ker(kappa):
/// e_{(K,kappa)} = Inf * e_{(K/Khat, kappahat)} * Def. Returns the three
/// factors; the middle one lives over the quotient group.
struct NonReducedSplit {
    BisetElement inf, reduced, def;
    long quotient_order;
};

inline NonReducedSplit split_non_reduced(const Subgroup& K, const CyclicHom& kappa,
                                         const FiberSpec& A) {
    long n = K.ambient.order;
    long k = K.order();
    long N = A.working_level;
    long o = kappa.generator_image == 0 ? 1 : N / std::gcd(kappa.generator_image, N);
    if (o == k) throw std::invalid_argument("split_non_reduced: kappa is faithful");
    long q = n * o / k;  // |G / Khat| where Khat = ker(kappa) of order k/o
    // K/Khat has order o, hence index divisor q/o = n/k in G/Khat
    Subgroup Kbar(CyclicGroup(q), n / k);
    CyclicHom kbar(o, N, o == 1 ? 0 : kappa.generator_image);
    return {basic_inf(n, q, A), basic_e(Kbar, kbar, A), basic_def(n, q, A), q};
}

// ---------------------------------------------------------------------------
// coprime splitting and recombination

/// Cartesian (coprime) product of two pairs, via the CRT identification of
/// Z/n1n2 with Z/n1 x Z/n2.
inline FiberedPair combine_coprime(const FiberedPair& x, const FiberedPair& y) {
    long n1 = x.left_order(), m1 = x.right_order();
    long n2 = y.left_order(), m2 = y.right_order();
    if (std::gcd(n1, n2) != 1 || std::gcd(m1, m2) != 1)
        throw std::invalid_argument("combine_coprime: orders not coprime");
    if (!(x.fiber() == y.fiber()))
        throw std::invalid_argument("combine_coprime: fiber mismatch");
    long n = n1 * n2, m = m1 * m2;
    auto liftL = [&](long v, bool first) {
        return first ? (n1 == 1 ? 0 : crt(v, n1, 0, n2)) : (n2 == 1 ? 0 : crt(0, n1, v, n2));
    };
    auto liftR = [&](long v, bool first) {
        return first ? (m1 == 1 ? 0 : crt(v, m1, 0, m2)) : (m2 == 1 ? 0 : crt(0, m1, v, m2));
    };
    std::vector<PairGen> gens = {
        {liftL(x.a(), true), liftR(x.b(), true), x.phi1()},
        {0, liftR(x.c(), true), x.phi2()},
        {liftL(y.a(), false), liftR(y.b(), false), y.phi1()},
        {0, liftR(y.c(), false), y.phi2()},
    };
    return FiberedPair(n, m, x.fiber(), std::move(gens));
}

/// The p-component of a pair: the Sylow p-subgroup of U with the restricted
/// fiber map, in coordinates of Z/n_p x Z/m_p.
inline FiberedPair p_component(const FiberedPair& u, long p) {
    long n = u.left_order(), m = u.right_order();
    long np = p_part(n, p), mp = p_part(m, p);
    long L = std::lcm(n, m);
    long Lp = p_part(L, p), Lq = L / Lp;
    // E = 1 (mod Lp), 0 (mod Lq): multiplication by E projects onto p-parts
    long E = (Lq == 1) ? 1 : crt(1, Lp, 0, Lq);
    long N = u.fiber_level();
    std::vector<PairGen> gens;
    auto proj = [&](long x, long order, long orderp) {
        long ex = mod_norm(E % order * (x % order), order);
        long step = order / orderp;  // Sylow_p = <step>
        if (ex % step != 0) throw std::logic_error("p_component: projection not in Sylow");
        // identify Sylow_p with Z/orderp by reduction mod orderp, the inverse
        // of the CRT lift used by combine_coprime
        return mod_norm(ex, std::max(orderp, 1L));
    };
    for (auto [x, y, f] :
         std::vector<PairGen>{{u.a(), u.b(), u.phi1()}, {0, u.c(), u.phi2()}}) {
        gens.push_back({proj(x, n, np), proj(y, m, mp), mod_norm(E % N * (f % N), N)});
    }
    return FiberedPair(np, mp, u.fiber(), std::move(gens));
}

// ---------------------------------------------------------------------------
// factorization (declared here, defined after the helpers it needs)

std::vector<BisetElement> factorize(const FiberedPair& pair);

namespace detail {

/// Lift a factor acting on the p-components to the full groups, crossing with
/// the identity on the given coprime complement orders.
inline BisetElement cross_with_identity(const BisetElement& f, long left_rest, long right_rest) {
    if (left_rest != right_rest)
        throw std::invalid_argument("cross_with_identity: complement must be shared");
    BisetElement r(f.left_order() * left_rest, f.right_order() * right_rest, f.fiber(),
                   f.ring());
    FiberedPair id_rest(left_rest, right_rest, f.fiber(), {{1, 1, 0}});
    for (const auto& [pr, co] : f.terms()) r.add(combine_coprime(pr, id_rest), co);
    return r;
}

/// Factor a pair with p-power orders, p1(U) = G, p2(U) = H, faithful phi_1 and
/// phi_2, and |G| >= |H|, per the two-case decomposition.
inline std::vector<BisetElement> factorize_core(const FiberedPair& u) {
    long n = u.left_order(), m = u.right_order();
    const FiberSpec& A = u.fiber();
    long N = u.fiber_level();
    if (n == 1 && m == 1) return {BisetElement::transitive(u)};
    // lexicographically smallest unit g with (g, 1) in U
    long g = -1;
    for (long cand = 1; cand < n; ++cand)
        if (std::gcd(cand, n) == 1 && u.contains(cand, 1 % m)) { g = cand; break; }
    if (g < 0) throw std::logic_error("factorize_core: no unit generator found");
    auto linv = u.left_invariants();
    auto rinv = u.right_invariants();
    const Subgroup& K = linv.k;
    const Subgroup& L = rinv.k;
    long Ap = 1;
    {
        auto fs = factorize(n == 1 ? m : n);
        Ap = fs.empty() ? N : p_part(N, fs.front().first);
    }
    if (Ap >= m) {
        // case (i): Tw_G^{psi_G} Inf_{G/K}^G Iso^eta Def_{H/L}^H Tw_H^{phi_H}
        // extension phi_H of phi(0,.)|_L to H, smallest generator image
        std::optional<CyclicHom> phi_H;
        for (const auto& cand : hom_set(m, A)) {
            if (L.order() == 1 || cand(L.generator()) == u.phi_eval(0, L.generator())) {
                phi_H = cand;
                break;
            }
        }
        if (!phi_H) throw std::logic_error("factorize_core: extension must exist in case (i)");
        // psi_G(x) = phi(x, x~) + phi_H(-x~) with x~ = x * g^{-1} mod m
        long ginv = inv_mod(g, n);
        long xt = mod_norm(ginv, m);  // tilde of x = 1
        long psi_gi = mod_norm(u.phi_eval(1, xt) + (*phi_H)(mod_norm(-xt, m)), N);
        CyclicHom psi_G(n, N, psi_gi);
        long r = K.index_divisor;  // |G/K| = |H/L|
        auto q5 = goursat(u);
        long eta_unit = q5.eta;
        return {basic_tw(psi_G, A), basic_inf(n, r, A), basic_iso(r, eta_unit, A),
                basic_def(m, r, A), basic_tw(*phi_H, A)};
    }
    // case (ii): Tw_G^{phi~} Inf_{G/K_eta}^G Iso^{eta~} E_{(L, phi_L)}^H
    // Delta_eta(G) = <(g, 1)>, K_eta = <m * g> of index m in G
    long ginv = inv_mod(g, n);
    long f0 = u.phi_eval(g, 1 % m);
    CyclicHom phi_tilde(n, N, mod_norm(ginv % N * (f0 % N), N));
    std::vector<BisetElement> out;
    out.push_back(basic_tw(phi_tilde, A));
    if (m != n) out.push_back(basic_inf(n, m, A));
    out.push_back(basic_iso(m, mod_norm(g, m), A));
    // basic_e takes the r-invariant character, which carries the phi_2^{-1}
    // convention; phi_L is the raw restriction, so hand over its inverse
    out.push_back(basic_e(L, rinv.phi_restriction, A));
    return out;
}

/// Peel a p-power pair per the partial decomposition, then factor the core.
inline std::vector<BisetElement> factorize_prime_power(const FiberedPair& u0) {
    long n = u0.left_order(), m = u0.right_order();
    const FiberSpec& A = u0.fiber();
    std::vector<BisetElement> pre, post;
    FiberedPair u = u0;
    // Ind / Res peeling to full projections
    auto linv = u.left_invariants();
    if (linv.p.index_divisor != 1) {
        long np = linv.p.order();
        pre.push_back(basic_ind(n, np, A));
        long aa = linv.p.index_divisor;
        u = FiberedPair(np, m, A,
                        {{u.a() / aa, u.b(), u.phi1()}, {0, u.c(), u.phi2()}});
        n = np;
    }
    auto rinv = u.right_invariants();
    if (rinv.p.index_divisor != 1) {
        long mq = rinv.p.order();
        post.insert(post.begin(), basic_res(m, mq, A));
        long q = rinv.p.index_divisor;
        u = FiberedPair(n, mq, A, {{u.a(), u.b() / q, u.phi1()}, {0, u.c() / q, u.phi2()}});
        m = mq;
    }
    // Inf / Def peeling through the kernels of phi_1, phi_2
    auto khat_order = [&](const CyclicHom& h) {
        return h.generator_image == 0
                   ? h.source_order
                   : h.source_order / std::min<long>(h.source_order,
                                                     h.target_order /
                                                         std::gcd(h.generator_image,
                                                                  h.target_order));
    };
    CyclicHom phi1 = u.phi_on_left_kernel();
    long khat = khat_order(phi1);
    if (khat > 1) {
        long nq = n / khat;
        pre.push_back(basic_inf(n, nq, A));
        u = FiberedPair(nq, m, A, {{u.a() % nq, u.b(), u.phi1()}, {0, u.c(), u.phi2()}});
        n = nq;
    }
    CyclicHom phi2 = u.phi_on_right_kernel();
    long lhat = khat_order(phi2);
    if (lhat > 1) {
        long mq = m / lhat;
        post.insert(post.begin(), basic_def(m, mq, A));
        u = FiberedPair(n, mq, A, {{u.a(), u.b() % mq, u.phi1()}, {0, u.c() % mq, u.phi2()}});
        m = mq;
    }
    std::vector<BisetElement> core;
    if (n >= m) {
        core = factorize_core(u);
    } else {
        auto opp = factorize_core(u.opposite());
        for (auto it = opp.rbegin(); it != opp.rend(); ++it) core.push_back(it->opposite());
    }
    std::vector<BisetElement> out = std::move(pre);
    out.insert(out.end(), core.begin(), core.end());
    out.insert(out.end(), post.begin(), post.end());
    return out;
}

}  // namespace detail

/// Ordered factor list whose Mackey product equals [U, phi]. Composite orders
/// are split into prime components first; each component's factors are lifted
/// back by crossing with the identity on the untouched components.
inline std::vector<BisetElement> factorize(const FiberedPair& pair) {
    long n = pair.left_order(), m = pair.right_order();
    long nm = std::lcm(n, m);
    auto primes = factorize(nm);
    if (primes.size() <= 1) return detail::factorize_prime_power(pair);
    // process one prime at a time; components for already-processed primes sit
    // at their target order, unprocessed ones at their source order
    std::vector<BisetElement> out;
    std::vector<std::pair<long, FiberedPair>> comps;
    for (auto [p, e] : primes) comps.emplace_back(p, p_component(pair, p));
    for (size_t idx = 0; idx < comps.size(); ++idx) {
        auto& [p, comp] = comps[idx];
        // factors earlier in the list act later in the product, so components
        // listed after idx have already reached their target (left) order and
        // the ones before idx still sit at their source (right) order
        long rest_left = 1;
        for (size_t j = 0; j < comps.size(); ++j) {
            if (j == idx) continue;
            rest_left *= (j < idx) ? comps[j].second.right_order()
                                   : comps[j].second.left_order();
        }
        for (const auto& f : detail::factorize_prime_power(comp))
            out.push_back(detail::cross_with_identity(f, rest_left, rest_left));
    }
    return out;
}

// ---------------------------------------------------------------------------
// linkage and Gamma groups

/// A reduced pair (K, kappa) over G.
struct ReducedPair {
    Subgroup K;
    CyclicHom kappa;
    friend bool operator==(const ReducedPair&, const ReducedPair&) = default;
};

/// All pairs (K, kappa) in M_G (kappa any hom K -> A).
inline std::vector<ReducedPair> all_pairs(const CyclicGroup& G, const FiberSpec& A) {
    std::vector<ReducedPair> out;
    for (const auto& K : subgroups(G))
        for (const auto& kappa : hom_set(K.order(), A)) out.push_back({K, kappa});
    return out;
}

/// Partition of the reduced pairs of G into linkage classes, computed
/// constructively: (K, kappa) ~ (K, lambda) iff lambda = psi|_K * ^sigma kappa
/// for some psi in G^A and sigma in Aut(G).
inline std::vector<std::vector<ReducedPair>> linkage_classes(const CyclicGroup& G,
                                                             const FiberSpec& A) {
    long n = G.order;
    long N = A.working_level;
    std::vector<ReducedPair> reduced;
    for (const auto& rp : all_pairs(G, A))
        if (is_reduced(rp.K, rp.kappa, A)) reduced.push_back(rp);
    auto linked = [&](const ReducedPair& x, const ReducedPair& y) {
        if (!(x.K == y.K)) return false;
        long k = x.K.order();
        for (const auto& psi : hom_set(n, A))
            for (long sigma : units_mod(n)) {
                long lhs = mod_norm(psi(x.K.generator()) + (sigma % std::max(k, 1L)) *
                                                               x.kappa.generator_image,
                                    N);
                if (lhs == y.kappa.generator_image) return true;
            }
        return false;
    };
    std::vector<std::vector<ReducedPair>> classes;
    for (const auto& rp : reduced) {
        bool placed = false;
        for (auto& cls : classes)
            if (linked(cls.front(), rp)) {
                cls.push_back(rp);
                placed = true;
                break;
            }
        if (!placed) classes.push_back({rp});
    }
    return classes;
}

/// The group Gamma_{(G,K,kappa)} of transitive (G,G)-elements with both
/// invariants (G, K, kappa), together with its multiplication table.
struct GammaGroup {
    std::vector<BisetElement> elements;          // transitive, coefficient 1
    std::vector<std::pair<long, long>> params;   // (psi generator image, sigma)
    std::vector<std::vector<size_t>> table;      // table[i][j] = index of e_i * e_j
    size_t identity_index = 0;
};

inline GammaGroup gamma_group(const CyclicGroup& G, const Subgroup& K, const CyclicHom& kappa,
                              const FiberSpec& A) {
    if (!is_reduced(K, kappa, A))
        throw std::invalid_argument("gamma_group: pair must be reduced");
    long n = G.order;
    long N = A.working_level;
    long k = K.order();
    GammaGroup gg;
    BisetElement e = basic_e(K, kappa, A);
    // stabilizer of kappa inside G^A x| Aut(G): psi|_K + ^{sigma^{-1}}kappa = kappa
    for (const auto& psi : hom_set(n, A))
        for (long sigma : units_mod(n)) {
            long sinv = n == 1 ? 1 : inv_mod(sigma, n);
            long lhs = mod_norm(psi(K.generator()) +
                                    (sinv % std::max(k, 1L)) * kappa.generator_image,
                                N);
            if (lhs != mod_norm(kappa.generator_image, N)) continue;
            BisetElement el =
                mackey_product(mackey_product(basic_tw(psi, A), basic_iso(n, sigma, A)), e);
            if (el.terms().size() != 1 || !(el.terms().begin()->second == CycNumber::one()))
                throw std::logic_error("gamma_group: element not transitive");
            gg.elements.push_back(el);
            gg.params.emplace_back(psi.generator_image, sigma);
        }
    auto index_of = [&](long psi_gi, long sigma) {
        for (size_t t = 0; t < gg.params.size(); ++t)
            if (gg.params[t] == std::pair<long, long>{psi_gi, sigma}) return t;
        throw std::logic_error("gamma_group: not closed under product");
    };
    gg.identity_index = index_of(0, n == 1 ? 0 : 1);
    // (psi1, s1)(psi2, s2) = (psi1 + psi2 o s1^{-1}, s1 s2); the realized
    // biset elements must multiply compatibly (the realization map may glue
    // distinct parameters onto one isomorphism class)
    gg.table.assign(gg.params.size(), std::vector<size_t>(gg.params.size(), 0));
    for (size_t i = 0; i < gg.params.size(); ++i)
        for (size_t j = 0; j < gg.params.size(); ++j) {
            auto [g1, s1] = gg.params[i];
            auto [g2, s2] = gg.params[j];
            long s1inv = n == 1 ? 1 : inv_mod(s1, n);
            // g2 * s1inv is well-defined mod N because n * g2 = 0 mod N
            long g3 = mod_norm(g1 + g2 * s1inv, N);
            long s3 = n == 1 ? 0 : mod_norm(s1 * s2, n);
            size_t t = index_of(g3, s3);
            BisetElement prod = mackey_product(gg.elements[i], gg.elements[j]);
            if (!(prod == gg.elements[t]))
                throw std::logic_error("gamma_group: table inconsistent with products");
            gg.table[i][j] = t;
        }
    return gg;
}

}  // namespace fbc
