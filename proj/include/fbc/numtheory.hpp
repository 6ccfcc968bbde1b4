#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fbc {

using Integer  = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline long gcd_l(long a, long b) { return std::gcd(a, b); }
inline long lcm_l(long a, long b) { return std::lcm(a, b); }

/// Divisors of n in increasing order.
inline std::vector<long> divisors(long n) {
    std::vector<long> ds;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            ds.push_back(d);
            if (d != n / d) ds.push_back(n / d);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

/// Prime factorization of n as (p, exponent) pairs, p increasing.
inline std::vector<std::pair<long, int>> factorize(long n) {
    std::vector<std::pair<long, int>> fs;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            fs.emplace_back(p, e);
        }
    }
    if (n > 1) fs.emplace_back(n, 1);
    return fs;
}

/// Pairwise coprime prime-power factors of n (empty for n = 1).
inline std::vector<long> prime_power_factors(long n) {
    std::vector<long> out;
    for (auto [p, e] : factorize(n)) {
        long q = 1;
        for (int i = 0; i < e; ++i) q *= p;
        out.push_back(q);
    }
    return out;
}

/// p-part of n.
inline long p_part(long n, long p) {
    long q = 1;
    while (n % p == 0) { n /= p; q *= p; }
    return q;
}

/// Largest divisor of n supported on the prime set pi.
inline long pi_part(long n, const std::vector<long>& pi) {
    long q = 1;
    for (long p : pi) q *= p_part(n, p);
    return q;
}

inline long euler_phi(long n) {
    long r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

/// Number-theoretic Mobius function.
inline int mobius(long n) {
    int sign = 1;
    for (auto [p, e] : factorize(n)) {
        if (e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

inline long mod_norm(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

/// Extended gcd: returns g and x, y with a*x + b*y = g.
inline long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) { x = (a >= 0 ? 1 : -1); y = 0; return std::abs(a); }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline long inv_mod(long a, long m) {
    long x, y;
    long g = ext_gcd(mod_norm(a, m), m, x, y);
    if (g != 1) throw std::invalid_argument("inv_mod: not a unit");
    return mod_norm(x, m);
}

/// Units of Z/mZ in increasing order.
inline std::vector<long> units_mod(long m) {
    std::vector<long> us;
    if (m == 1) return {0};
    for (long a = 1; a < m; ++a)
        if (std::gcd(a, m) == 1) us.push_back(a);
    return us;
}

/// Smallest primitive root modulo an odd prime power.
inline long primitive_root(long q) {
    long phi = euler_phi(q);
    auto fs = factorize(phi);
    for (long g = 2; g < q; ++g) {
        if (std::gcd(g, q) != 1) continue;
        bool ok = true;
        for (auto [p, e] : fs) {
            // g^(phi/p) mod q
            long ex = phi / p, base = g % q, r = 1;
            while (ex) {
                if (ex & 1) r = r * base % q;
                base = base * base % q;
                ex >>= 1;
            }
            if (r == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    throw std::logic_error("primitive_root: none found");
}

/// CRT: x = a (mod m), x = b (mod n) for coprime m, n.
inline long crt(long a, long m, long b, long n) {
    long x, y;
    ext_gcd(m, n, x, y);
    return mod_norm(a * y % (m * n) * n % (m * n) + b * x % (m * n) * m % (m * n), m * n);
}

}  // namespace fbc
