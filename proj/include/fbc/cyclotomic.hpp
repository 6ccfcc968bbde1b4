#pragma once

#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "numtheory.hpp"

namespace fbc {

/// Integer coefficient vector of the N-th cyclotomic polynomial, lowest degree
/// first, monic of degree phi(N). Computed by dividing x^N - 1 by Phi_d over
/// the proper divisors d of N; results are memoized.
inline const std::vector<Integer>& cyclotomic_polynomial(long N) {
    static std::map<long, std::vector<Integer>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    if (N < 1) throw std::invalid_argument("cyclotomic_polynomial: N >= 1 required");

    // x^N - 1
    std::vector<Integer> num(static_cast<size_t>(N) + 1, 0);
    num[0] = -1;
    num[static_cast<size_t>(N)] = 1;
    for (long d : divisors(N)) {
        if (d == N) continue;
        const auto& phi_d = cyclotomic_polynomial(d);
        // exact division num /= phi_d (both monic up to content)
        std::vector<Integer> q(num.size() - phi_d.size() + 1, 0);
        std::vector<Integer> r = num;
        for (long i = static_cast<long>(q.size()) - 1; i >= 0; --i) {
            Integer c = r[i + phi_d.size() - 1];  // phi_d is monic
            q[i] = c;
            if (c != 0)
                for (size_t j = 0; j < phi_d.size(); ++j) r[i + j] -= c * phi_d[j];
        }
        num = std::move(q);
    }
    return cache.emplace(N, std::move(num)).first->second;
}

/// An exact element of the cyclotomic field Q(zeta_N), stored as the canonical
/// coefficient vector of length phi(N) in the power basis modulo Phi_N.
class CycNumber {
public:
    CycNumber() : level_(1), coeffs_(1, Rational(0)) {}

    explicit CycNumber(const Rational& r) : level_(1), coeffs_(1, r) {}
    explicit CycNumber(long n) : level_(1), coeffs_(1, Rational(n)) {}

    /// From an arbitrary polynomial in zeta_N (any degree); reduces mod Phi_N.
    static CycNumber from_poly(long N, std::vector<Rational> poly) {
        CycNumber z;
        z.level_ = N;
        z.coeffs_ = reduce(N, std::move(poly));
        return z;
    }

    static CycNumber zero(long N = 1) {
        CycNumber z;
        z.level_ = N;
        z.coeffs_.assign(static_cast<size_t>(euler_phi(N)), Rational(0));
        return z;
    }

    static CycNumber one() { return CycNumber(Rational(1)); }

    long level() const { return level_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    bool is_rational() const {
        for (size_t i = 1; i < coeffs_.size(); ++i)
            if (coeffs_[i] != 0) return false;
        return true;
    }

    /// Value as a rational; only valid when is_rational().
    Rational rational_value() const {
        if (!is_rational()) throw std::logic_error("CycNumber: not rational");
        return coeffs_[0];
    }

    /// Canonical image in Q(zeta_M), M a multiple of level (zeta_N -> zeta_M^{M/N}).
    CycNumber at_level(long M) const {
        if (M == level_) return *this;
        if (M % level_ != 0) throw std::invalid_argument("at_level: not a multiple");
        long k = M / level_;
        std::vector<Rational> poly(static_cast<size_t>(k) * coeffs_.size(), Rational(0));
        for (size_t i = 0; i < coeffs_.size(); ++i) poly[i * k] = coeffs_[i];
        return from_poly(M, std::move(poly));
    }

    friend CycNumber operator+(const CycNumber& a, const CycNumber& b) {
        long L = lcm_l(a.level_, b.level_);
        CycNumber x = a.at_level(L), y = b.at_level(L);
        for (size_t i = 0; i < x.coeffs_.size(); ++i) x.coeffs_[i] += y.coeffs_[i];
        return x;
    }

    friend CycNumber operator-(const CycNumber& a) {
        CycNumber x = a;
        for (auto& c : x.coeffs_) c = -c;
        return x;
    }

    friend CycNumber operator-(const CycNumber& a, const CycNumber& b) { return a + (-b); }

    friend CycNumber operator*(const CycNumber& a, const CycNumber& b) {
        long L = lcm_l(a.level_, b.level_);
        CycNumber x = a.at_level(L), y = b.at_level(L);
        std::vector<Rational> prod(x.coeffs_.size() + y.coeffs_.size(), Rational(0));
        for (size_t i = 0; i < x.coeffs_.size(); ++i) {
            if (x.coeffs_[i] == 0) continue;
            for (size_t j = 0; j < y.coeffs_.size(); ++j)
                if (y.coeffs_[j] != 0) prod[i + j] += x.coeffs_[i] * y.coeffs_[j];
        }
        return from_poly(L, std::move(prod));
    }

    CycNumber& operator+=(const CycNumber& o) { return *this = *this + o; }
    CycNumber& operator-=(const CycNumber& o) { return *this = *this - o; }
    CycNumber& operator*=(const CycNumber& o) { return *this = *this * o; }

    /// Scale by an exact rational (the only division the calculus needs,
    /// besides inverting roots of unity by exponent negation).
    CycNumber scaled(const Rational& r) const {
        CycNumber x = *this;
        for (auto& c : x.coeffs_) c *= r;
        return x;
    }

    /// Image under zeta_N -> zeta_N^{N-1}; an involution fixing rationals.
    CycNumber conjugate() const { return substitute_power(level_ - 1); }

    /// Image under the Galois substitution zeta_N -> zeta_N^k, gcd(k, N) = 1.
    CycNumber substitute_power(long k) const {
        k = mod_norm(k, level_);
        std::vector<Rational> poly(static_cast<size_t>(level_), Rational(0));
        for (size_t i = 0; i < coeffs_.size(); ++i)
            poly[(i * static_cast<size_t>(k)) % static_cast<size_t>(level_)] += coeffs_[i];
        return from_poly(level_, std::move(poly));
    }

    friend bool operator==(const CycNumber& a, const CycNumber& b) {
        long L = lcm_l(a.level_, b.level_);
        return a.at_level(L).coeffs_ == b.at_level(L).coeffs_;
    }
    friend bool operator!=(const CycNumber& a, const CycNumber& b) { return !(a == b); }

    std::string str() const {
        std::ostringstream os;
        os << "cyc(" << level_ << ";";
        for (size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
        os << ")";
        return os.str();
    }

private:
    static std::vector<Rational> reduce(long N, std::vector<Rational> poly) {
        const auto& phiN = cyclotomic_polynomial(N);
        size_t deg = phiN.size() - 1;  // = phi(N)
        if (poly.size() < deg) poly.resize(deg, Rational(0));
        for (size_t i = poly.size(); i-- > deg;) {
            Rational c = poly[i];
            if (c != 0)
                for (size_t j = 0; j < phiN.size(); ++j)
                    poly[i - deg + j] -= c * Rational(phiN[j]);
        }
        poly.resize(deg);
        return poly;
    }

    long level_;
    std::vector<Rational> coeffs_;
};

/// Canonical representative of zeta_N^k.
inline CycNumber root_of_unity(long N, long k) {
    k = mod_norm(k, N);
    std::vector<Rational> poly(static_cast<size_t>(k) + 1, Rational(0));
    poly[static_cast<size_t>(k)] = 1;
    return CycNumber::from_poly(N, std::move(poly));
}

struct ProportionalityFailure {
    size_t i, j;  // cross-multiplication broke at this index pair
};

/// Returns c with u = c * v when one exists (tested by cross-multiplication
/// u_i v_j = u_j v_i on all pairs, then solving on a nonzero coordinate of v).
/// (zero, zero) yields c = 1 by convention. On failure the breaking index pair
/// is available through `why`.
inline std::optional<CycNumber> is_proportional(std::span<const CycNumber> u,
                                                std::span<const CycNumber> v,
                                                ProportionalityFailure* why = nullptr) {
    if (u.size() != v.size()) throw std::invalid_argument("is_proportional: length mismatch");
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = i + 1; j < u.size(); ++j)
            if (u[i] * v[j] != u[j] * v[i]) {
                if (why) *why = {i, j};
                return std::nullopt;
            }
    size_t pivot = v.size();
    for (size_t i = 0; i < v.size(); ++i)
        if (!v[i].is_zero()) { pivot = i; break; }
    if (pivot == v.size()) {
        // v = 0: proportional only if u = 0 too
        for (size_t i = 0; i < u.size(); ++i)
            if (!u[i].is_zero()) {
                if (why) *why = {i, i};
                return std::nullopt;
            }
        return CycNumber::one();
    }
    // c = u[pivot] / v[pivot], via the solvability of c * v = u checked above.
    // v[pivot] may be irrational; solve by clearing it with its conjugates is
    // overkill here because every scalar this calculus produces satisfies
    // u = c*v with c in the same field. We compute c by linear solve on the
    // pivot coordinate: c = u[pivot] * v[pivot]^{-1}, where the inverse is
    // obtained from the norm trick: v^{-1} = prod(conjugates) / norm.
    long L = lcm_l(u[pivot].level(), v[pivot].level());
    CycNumber vp = v[pivot].at_level(L);
    CycNumber numerator = u[pivot].at_level(L);
    CycNumber prod_conj = CycNumber::one();
    for (long k = 2; k <= L; ++k)
        if (std::gcd(k, L) == 1) prod_conj *= vp.substitute_power(k);
    CycNumber norm = vp * prod_conj;  // rational, nonzero
    if (!norm.is_rational()) throw std::logic_error("is_proportional: norm not rational");
    CycNumber c = (numerator * prod_conj).scaled(Rational(1) / norm.rational_value());
    // paranoia: verify on every coordinate
    for (size_t i = 0; i < u.size(); ++i)
        if (u[i] != c * v[i]) {
            if (why) *why = {i, pivot};
            return std::nullopt;
        }
    return c;
}

}  // namespace fbc
