#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "fibered.hpp"

namespace fbc {

/// A virtual character of Z/nZ with exact cyclotomic coefficients in the basis
/// of irreducible characters chi^j, where chi^j(x) = zeta_n^(j*x).
class VirtualCharacter {
public:
    explicit VirtualCharacter(long n) : n_(n), coeffs_(static_cast<size_t>(n)) {
        if (n < 1) throw std::invalid_argument("VirtualCharacter: order >= 1");
    }

    static VirtualCharacter irreducible(long n, long j) {
        VirtualCharacter v(n);
        v.coeffs_[static_cast<size_t>(mod_norm(j, n))] = CycNumber::one();
        return v;
    }

    static VirtualCharacter from_coeffs(long n, std::vector<CycNumber> coeffs) {
        if (static_cast<long>(coeffs.size()) != n)
            throw std::invalid_argument("from_coeffs: length mismatch");
        VirtualCharacter v(n);
        v.coeffs_ = std::move(coeffs);
        return v;
    }

    /// Character with the given value at each group element.
    static VirtualCharacter from_values(long n, const std::vector<CycNumber>& vals) {
        if (static_cast<long>(vals.size()) != n)
            throw std::invalid_argument("from_values: length mismatch");
        VirtualCharacter v(n);
        for (long j = 0; j < n; ++j) {
            CycNumber s = CycNumber::zero();
            for (long x = 0; x < n; ++x)
                s += vals[static_cast<size_t>(x)] * root_of_unity(n, -j * x);
            v.coeffs_[static_cast<size_t>(j)] = s.scaled(Rational(1, n));
        }
        return v;
    }

    long group_order() const { return n_; }
    const std::vector<CycNumber>& coeffs() const { return coeffs_; }
    const CycNumber& coeff(long j) const { return coeffs_[static_cast<size_t>(mod_norm(j, n_))]; }
    void set_coeff(long j, CycNumber c) {
        coeffs_[static_cast<size_t>(mod_norm(j, n_))] = std::move(c);
    }

    CycNumber value(long x) const {
        CycNumber s = CycNumber::zero();
        for (long j = 0; j < n_; ++j)
            if (!coeffs_[static_cast<size_t>(j)].is_zero())
                s += coeffs_[static_cast<size_t>(j)] * root_of_unity(n_, j * mod_norm(x, n_));
        return s;
    }

    std::vector<CycNumber> values() const {
        std::vector<CycNumber> v;
        v.reserve(static_cast<size_t>(n_));
        for (long x = 0; x < n_; ++x) v.push_back(value(x));
        return v;
    }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    friend VirtualCharacter operator+(const VirtualCharacter& a, const VirtualCharacter& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("VirtualCharacter: group mismatch");
        VirtualCharacter r = a;
        for (long j = 0; j < a.n_; ++j) r.coeffs_[static_cast<size_t>(j)] += b.coeffs_[static_cast<size_t>(j)];
        return r;
    }
    friend VirtualCharacter operator-(const VirtualCharacter& a, const VirtualCharacter& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("VirtualCharacter: group mismatch");
        VirtualCharacter r = a;
        for (long j = 0; j < a.n_; ++j) r.coeffs_[static_cast<size_t>(j)] -= b.coeffs_[static_cast<size_t>(j)];
        return r;
    }
    VirtualCharacter scaled(const CycNumber& s) const {
        VirtualCharacter r = *this;
        for (auto& c : r.coeffs_) c *= s;
        return r;
    }
    friend bool operator==(const VirtualCharacter& a, const VirtualCharacter& b) {
        return a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
    }

private:
    long n_;
    std::vector<CycNumber> coeffs_;
};

/// (1/n) sum over x of a(x) * conj(b(x)); the chi^j are orthonormal.
inline CycNumber inner_product(const VirtualCharacter& a, const VirtualCharacter& b) {
    if (a.group_order() != b.group_order())
        throw std::invalid_argument("inner_product: group mismatch");
    long n = a.group_order();
    CycNumber s = CycNumber::zero();
    auto av = a.values(), bv = b.values();
    for (long x = 0; x < n; ++x)
        s += av[static_cast<size_t>(x)] * bv[static_cast<size_t>(x)].conjugate();
    return s.scaled(Rational(1, n));
}

/// Linearization of an element of B^A(G) (a (G, 1)-biset element): the class
/// [U, phi] maps to the character induced from the rank-one module given by
/// phi, i.e. the sum of the chi^j whose restriction to U equals phi.
inline VirtualCharacter linearize(const BisetElement& x) {
    if (x.right_order() != 1) throw std::invalid_argument("linearize: need a (G, 1)-element");
    long n = x.left_order();
    long N = x.fiber().working_level;
    VirtualCharacter out(n);
    for (const auto& [p, co] : x.terms()) {
        long a = p.a();
        long f1 = p.phi1();
        for (long j = 0; j < n; ++j) {
            // chi^j restricted to <a> equals phi iff zeta_n^(j*a) = zeta_N^(f1)
            if (mod_norm(j * a * N - f1 * n, n * N) == 0) out.set_coeff(j, out.coeff(j) + co);
        }
    }
    return out;
}

/// The generic action of a fibered biset element on a character, evaluated by
/// the value formula (Y chi)(h) = (1/|V|) sum over x in H, g in G with
/// (h, g) in V of psi(h, g) chi(g). The x-sum is kept literal even though
/// conjugation is trivial here; it cancels against the 1/|V| bookkeeping.
inline VirtualCharacter act_generic(const BisetElement& y, const VirtualCharacter& chi) {
    if (y.right_order() != chi.group_order())
        throw std::invalid_argument("act_generic: order mismatch");
    long hsize = y.left_order();
    long gsize = y.right_order();
    long N = y.fiber().working_level;
    auto chivals = chi.values();
    std::vector<CycNumber> vals(static_cast<size_t>(hsize), CycNumber::zero());
    for (const auto& [v, co] : y.terms()) {
        Rational inv_v(1, v.subgroup_size());
        for (long h = 0; h < hsize; ++h) {
            CycNumber s = CycNumber::zero();
            for (long x = 0; x < hsize; ++x)
                for (long g = 0; g < gsize; ++g)
                    if (v.contains(h, g))
                        s += root_of_unity(N, v.phi_eval(h, g)) * chivals[static_cast<size_t>(g)];
            vals[static_cast<size_t>(h)] += co * s.scaled(inv_v);
        }
    }
    return VirtualCharacter::from_values(hsize, vals);
}

/// Descriptor of a basic biset, for the closed-form action and the CLI.
struct BasicBiset {
    enum class Kind { ind, res, inf, def_, iso, tw, e, f };
    Kind kind;
    long n = 1;                // the larger/acting group order
    long m = 1;                // subgroup or quotient order (ind/res/inf/def)
    long unit = 1;             // iso
    CyclicHom hom{1, 1, 0};    // tw: the twisting hom; e/f: kappa
    long k_index = 1;          // e/f: index divisor of K in Z/n
    FiberSpec fiber = FiberSpec::finite(1);

    BisetElement element() const {
        switch (kind) {
            case Kind::ind: return basic_ind(n, m, fiber);
            case Kind::res: return basic_res(n, m, fiber);
            case Kind::inf: return basic_inf(n, m, fiber);
            case Kind::def_: return basic_def(n, m, fiber);
            case Kind::iso: return basic_iso(n, unit, fiber);
            case Kind::tw: return basic_tw(hom, fiber);
            case Kind::e: return basic_e(Subgroup(CyclicGroup(n), k_index), hom, fiber);
            case Kind::f: return basic_f(Subgroup(CyclicGroup(n), k_index), hom, fiber);
        }
        throw std::logic_error("BasicBiset: bad kind");
    }
};

/// Closed-form action of a basic biset; must agree with act_generic.
inline VirtualCharacter act_fast(const BasicBiset& b, const VirtualCharacter& chi) {
    long n = b.n, m = b.m;
    switch (b.kind) {
        case BasicBiset::Kind::ind: {
            // Ind chi^j = sum over k = j (mod m) of chi^k
            if (chi.group_order() != m) throw std::invalid_argument("act_fast ind: order");
            VirtualCharacter out(n);
            for (long k = 0; k < n; ++k) out.set_coeff(k, chi.coeff(k % m));
            return out;
        }
        case BasicBiset::Kind::res: {
            // Res chi^k = chi^(k mod m)
            if (chi.group_order() != n) throw std::invalid_argument("act_fast res: order");
            VirtualCharacter out(m);
            for (long k = 0; k < n; ++k) out.set_coeff(k % m, out.coeff(k % m) + chi.coeff(k));
            return out;
        }
        case BasicBiset::Kind::inf: {
            // Inf chi^j = chi^((n/m) j)
            if (chi.group_order() != m) throw std::invalid_argument("act_fast inf: order");
            VirtualCharacter out(n);
            for (long j = 0; j < m; ++j) out.set_coeff((n / m) * j, chi.coeff(j));
            return out;
        }
        case BasicBiset::Kind::def_: {
            // Def chi^k = chi^(k/(n/m)) when (n/m) | k, else 0
            if (chi.group_order() != n) throw std::invalid_argument("act_fast def: order");
            VirtualCharacter out(m);
            for (long j = 0; j < m; ++j) out.set_coeff(j, chi.coeff((n / m) * j));
            return out;
        }
        case BasicBiset::Kind::iso: {
            // Iso^u chi = chi after substituting x -> u^{-1} x: chi^j -> chi^(j u^{-1})
            if (chi.group_order() != n) throw std::invalid_argument("act_fast iso: order");
            long uinv = n == 1 ? 0 : inv_mod(b.unit, n);
            VirtualCharacter out(n);
            for (long j = 0; j < n; ++j) out.set_coeff(mod_norm(j * uinv, n), chi.coeff(j));
            return out;
        }
        case BasicBiset::Kind::tw: {
            // Tw^phi chi = phi * chi; phi = chi^s with s = gi * n / N
            if (chi.group_order() != n) throw std::invalid_argument("act_fast tw: order");
            long N = b.hom.target_order;
            long s = mod_norm((b.hom.generator_image * n) / N, n);
            VirtualCharacter out(n);
            for (long j = 0; j < n; ++j) out.set_coeff(mod_norm(j + s, n), chi.coeff(j));
            return out;
        }
        case BasicBiset::Kind::e: {
            // projection onto the chi^j with chi^j|_K = kappa
            if (chi.group_order() != n) throw std::invalid_argument("act_fast e: order");
            long d = b.k_index;
            long k = n / d;
            long N = b.hom.target_order;
            long gi = b.hom.generator_image;
            VirtualCharacter out(n);
            for (long j = 0; j < n; ++j)
                if (mod_norm(j * N - gi * k, k * N) == 0) out.set_coeff(j, chi.coeff(j));
            return out;
        }
        case BasicBiset::Kind::f: {
            // keeps chi^j iff chi^j|_K = kappa and no proper overgroup of K has
            // an A-valued restriction of chi^j (Mobius telescope)
            if (chi.group_order() != n) throw std::invalid_argument("act_fast f: order");
            long d = b.k_index;
            long k = n / d;
            long N = b.hom.target_order;
            long gi = b.hom.generator_image;
            VirtualCharacter out(n);
            for (long j = 0; j < n; ++j) {
                if (mod_norm(j * N - gi * k, k * N) != 0) continue;
                bool maximal = true;
                for (auto [q, e] : factorize(d)) {
                    long lorder = n / (d / q);  // |L| for the overgroup at prime q
                    long restr_order = lorder / std::gcd(j, lorder);
                    if (N % restr_order == 0) { maximal = false; break; }
                }
                if (maximal) out.set_coeff(j, chi.coeff(j));
            }
            return out;
        }
    }
    throw std::logic_error("act_fast: bad kind");
}

// ---------------------------------------------------------------------------
// Dirichlet characters

/// One prime-power factor of (Z/mZ)^x with its canonical generators: the
/// smallest primitive root for odd prime powers, the pair (-1, 5) for 2-power
/// moduli >= 8, the single generator 3 for modulus 4, none for 1 and 2.
struct UnitGroupFactor {
    long q;
    std::vector<long> gens;
    std::vector<long> orders;
};

inline std::vector<UnitGroupFactor> unit_group_factors(long m) {
    std::vector<UnitGroupFactor> out;
    for (long q : prime_power_factors(m)) {
        UnitGroupFactor f{q, {}, {}};
        if (q % 2 != 0) {
            f.gens = {primitive_root(q)};
            f.orders = {euler_phi(q)};
        } else if (q == 4) {
            f.gens = {3};
            f.orders = {2};
        } else if (q >= 8) {
            f.gens = {q - 1, 5};
            f.orders = {2, q / 4};
        }
        out.push_back(std::move(f));
    }
    return out;
}

/// A Dirichlet character modulo m, stored by exponents against the canonical
/// generators of each prime-power unit-group factor: the value at generator g
/// of order r is zeta_r^(image).
class DirichletCharacter {
public:
    DirichletCharacter(long m, std::vector<long> images) : m_(m), factors_(unit_group_factors(m)) {
        size_t total = 0;
        for (const auto& f : factors_) total += f.gens.size();
        if (images.size() != total)
            throw std::invalid_argument("DirichletCharacter: wrong image count");
        size_t i = 0;
        for (const auto& f : factors_)
            for (long r : f.orders) images_.push_back(mod_norm(images[i++], r));
    }

    static DirichletCharacter trivial(long m) {
        size_t total = 0;
        for (const auto& f : unit_group_factors(m)) total += f.gens.size();
        return DirichletCharacter(m, std::vector<long>(total, 0));
    }

    long modulus() const { return m_; }
    const std::vector<long>& images() const { return images_; }
    bool is_trivial() const {
        for (long v : images_)
            if (v != 0) return false;
        return true;
    }

    CycNumber value(long x) const {
        x = mod_norm(x, std::max(m_, 1L));
        if (m_ > 1 && std::gcd(x, m_) != 1)
            throw std::invalid_argument("DirichletCharacter: value only on units");
        CycNumber v = CycNumber::one();
        size_t i = 0;
        for (const auto& f : factors_) {
            long xq = mod_norm(x, f.q);
            auto exps = discrete_log(f, xq);
            for (size_t t = 0; t < f.gens.size(); ++t)
                v *= root_of_unity(f.orders[t], exps[t] * images_[i + t]);
            i += f.gens.size();
        }
        return v;
    }

    /// The sub-character supported on the prime-power factors with p in pi,
    /// as a character of modulus pi-part(m).
    DirichletCharacter pi_component(const std::vector<long>& pi) const {
        long mp = pi_part(m_, pi);
        std::vector<long> imgs;
        size_t i = 0;
        for (const auto& f : factors_) {
            bool keep = mp % f.q == 0;
            for (size_t t = 0; t < f.gens.size(); ++t)
                if (keep) imgs.push_back(images_[i + t]);
            i += f.gens.size();
        }
        return DirichletCharacter(mp, std::move(imgs));
    }

    DirichletCharacter p_component(long p) const { return pi_component({p}); }

    /// Complementary part: the factors with p not in pi.
    DirichletCharacter pi_complement(const std::vector<long>& pi) const {
        std::vector<long> other;
        for (auto [p, e] : factorize(m_)) {
            bool inpi = false;
            for (long q : pi) inpi = inpi || q == p;
            if (!inpi) other.push_back(p);
        }
        return pi_component(other);
    }

    friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
        return a.m_ == b.m_ && a.images_ == b.images_;
    }
    friend bool operator<(const DirichletCharacter& a, const DirichletCharacter& b) {
        return std::tie(a.m_, a.images_) < std::tie(b.m_, b.images_);
    }

private:
    static std::vector<long> discrete_log(const UnitGroupFactor& f, long x) {
        if (f.gens.empty()) return {};
        std::vector<long> exps(f.gens.size(), 0);
        // brute-force over exponent tuples; unit groups here are tiny
        std::vector<long> cur = exps;
        while (true) {
            long prod = 1;
            for (size_t t = 0; t < f.gens.size(); ++t) {
                long b = f.gens[t] % f.q, e = cur[t];
                while (e--) prod = prod * b % f.q;
            }
            if (prod == x % f.q) return cur;
            size_t t = 0;
            while (t < cur.size()) {
                if (++cur[t] < f.orders[t]) break;
                cur[t] = 0;
                ++t;
            }
            if (t == cur.size())
                throw std::logic_error("DirichletCharacter: discrete log failed");
        }
    }

    long m_;
    std::vector<UnitGroupFactor> factors_;
    std::vector<long> images_;
};

/// All phi(m) Dirichlet characters modulo m, in lexicographic image order.
inline std::vector<DirichletCharacter> all_dirichlet_characters(long m) {
    auto factors = unit_group_factors(m);
    std::vector<long> orders;
    for (const auto& f : factors)
        for (long r : f.orders) orders.push_back(r);
    std::vector<DirichletCharacter> out;
    std::vector<long> cur(orders.size(), 0);
    while (true) {
        out.emplace_back(m, cur);
        size_t t = 0;
        while (t < cur.size()) {
            if (++cur[t] < orders[t]) break;
            cur[t] = 0;
            ++t;
        }
        if (t == cur.size()) break;
        if (cur.empty()) break;
    }
    if (out.empty()) out.push_back(DirichletCharacter::trivial(m));
    return out;
}

/// Smallest f | m such that nu is trivial on the units congruent to 1 mod f.
inline long conductor(const DirichletCharacter& nu) {
    long m = nu.modulus();
    for (long f : divisors(m)) {
        bool ok = true;
        for (long x : units_mod(m)) {
            if (mod_norm(x, f) != 1 % f) continue;
            if (!(nu.value(x) == CycNumber::one())) { ok = false; break; }
        }
        if (ok) return f;
    }
    return m;
}

inline bool is_primitive(const DirichletCharacter& nu) { return conductor(nu) == nu.modulus(); }

/// All primitive characters of conductor exactly m.
inline std::vector<DirichletCharacter> primitive_characters(long m) {
    std::vector<DirichletCharacter> out;
    for (const auto& nu : all_dirichlet_characters(m))
        if (conductor(nu) == m) out.push_back(nu);
    return out;
}

/// nu-tilde: the class function equal to nu on units and zero elsewhere,
/// expanded in the chi^j basis.
inline VirtualCharacter dirichlet_extend(const DirichletCharacter& nu) {
    long m = nu.modulus();
    std::vector<CycNumber> vals(static_cast<size_t>(m), CycNumber::zero());
    for (long x : units_mod(m)) vals[static_cast<size_t>(x)] = nu.value(x);
    return VirtualCharacter::from_values(m, vals);
}

/// tau(nu-tilde) = <nu-tilde, chi^1>.
inline CycNumber gauss_coefficient(const VirtualCharacter& nu_tilde) {
    return nu_tilde.coeff(1);
}

// ---------------------------------------------------------------------------
// nu_alpha projections and their closed-form transforms

/// f_(A,alpha) * nu-tilde: the sub-sum of nu-tilde over the chi^j whose
/// restriction to the subgroup A (of order |A| = alpha's source) equals alpha.
/// alpha is a faithful character of A recorded as CyclicHom(|A|, |A|, j_alpha).
inline VirtualCharacter nu_alpha(const VirtualCharacter& nu_tilde, const CyclicHom& alpha) {
    long n = nu_tilde.group_order();
    long na = alpha.source_order;
    if (alpha.target_order != na)
        throw std::invalid_argument("nu_alpha: alpha must be A -> A-valued");
    if (na >= n || n % na != 0) throw std::invalid_argument("nu_alpha: need |A| < |G|, |A| | |G|");
    if (std::gcd(alpha.generator_image, na) != 1 && na > 1)
        throw std::invalid_argument("nu_alpha: alpha not faithful");
    VirtualCharacter out(n);
    for (long j = alpha.generator_image % na; j < n; j += na) out.set_coeff(j, nu_tilde.coeff(j));
    return out;
}

/// Iso^sigma nu-tilde_alpha = conj(nu(sigma)) nu-tilde_(sigma alpha), with
/// (sigma alpha)(x) = alpha(sigma x).
struct ScalarAndTarget {
    CycNumber scalar;
    CyclicHom target;
};

inline ScalarAndTarget iso_on_nu_alpha(long sigma, const DirichletCharacter& nu,
                                       const CyclicHom& alpha) {
    long m = nu.modulus();
    if (m > 1 && std::gcd(sigma, m) != 1)
        throw std::invalid_argument("iso_on_nu_alpha: sigma not a unit");
    long na = alpha.source_order;
    CyclicHom target(na, na, mod_norm(sigma, na) * alpha.generator_image);
    return {nu.value(sigma).conjugate(), target};
}

/// Tw^(chi^s) nu-tilde_alpha = conj(nu(x)) nu-tilde_beta with beta = chi^s|_A * alpha
/// and x = j_beta^{-1} (j_beta - s) mod m.
inline ScalarAndTarget tw_on_nu_alpha(long s, const DirichletCharacter& nu,
                                      const CyclicHom& alpha) {
    long m = nu.modulus();
    long na = alpha.source_order;
    if (s % (m / na) != 0)
        throw std::invalid_argument("tw_on_nu_alpha: |G:A| must divide s");
    CyclicHom beta(na, na, mod_norm(alpha.generator_image + s, na));
    long jb = beta.generator_image == 0 && na == 1 ? 1 : beta.generator_image;
    long x = mod_norm(inv_mod(jb, m) * mod_norm(jb - s, m), m);
    // coefficient ratio c_{j-s}/c_j of the extension is conj(nu(x))
    return {nu.value(x).conjugate(), beta};
}

// ---------------------------------------------------------------------------
// coprime action

/// Action through the coprime splitting: each transitive term is split into
/// its prime components, each chi^j into the matching tensor factors, the
/// one-prime actions recombined by the Chinese remainder indexing. Must agree
/// with act_generic on the unsplit data.
inline VirtualCharacter coprime_act(const BisetElement& x, const VirtualCharacter& chi) {
    if (x.right_order() != chi.group_order())
        throw std::invalid_argument("coprime_act: order mismatch");
    long hsize = x.left_order(), gsize = x.right_order();
    VirtualCharacter out(hsize);
    auto primes = factorize(std::lcm(hsize, gsize));
    for (const auto& [v, co] : x.terms()) {
        std::vector<FiberedPair> comps;
        for (auto [p, e] : primes) comps.push_back(p_component(v, p));
        for (long j = 0; j < gsize; ++j) {
            if (chi.coeff(j).is_zero()) continue;
            // chi^j pulls back to chi^(j * inv(g_rest)) on each component; a
            // tuple of output indices i_p recombines to the l with
            // l = i_p * h_rest (mod h_p) for every p
            CycNumber coefficient = co * chi.coeff(j);
            std::vector<std::tuple<long, long, CycNumber>> partial = {
                {0, 1, CycNumber::one()}};  // (l so far, modulus so far, coeff)
            for (const auto& comp : comps) {
                long gp = comp.right_order(), hp = comp.left_order();
                long grest = gsize / gp;
                long jp = gp == 1 ? 0 : mod_norm(j * inv_mod(grest % gp, gp), gp);
                VirtualCharacter part = act_generic(BisetElement::transitive(comp),
                                                    VirtualCharacter::irreducible(gp, jp));
                std::vector<std::tuple<long, long, CycNumber>> next;
                for (const auto& [l, md, c] : partial)
                    for (long i = 0; i < hp; ++i) {
                        if (part.coeff(i).is_zero()) continue;
                        long r = mod_norm(i * ((hsize / hp) % hp), hp);
                        long lnew = hp == 1 ? l : crt(l, md, r, hp);
                        next.emplace_back(lnew, md * hp, c * part.coeff(i));
                    }
                partial = std::move(next);
            }
            for (const auto& [l, md, c] : partial)
                out.set_coeff(l, out.coeff(l) + coefficient * c);
        }
    }
    return out;
}

}  // namespace fbc
