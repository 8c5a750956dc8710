#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "instanton/exact/scalar.hpp"

namespace instanton::casson {

enum class Bundle { trivial, odd };

inline std::string bundle_name(Bundle b) { return b == Bundle::trivial ? "trivial" : "odd"; }

inline Bundle parse_bundle(const std::string& s) {
    if (s == "trivial") return Bundle::trivial;
    if (s == "odd") return Bundle::odd;
    throw Error("usage.bad-bundle", "bundle must be 'trivial' or 'odd', got '" + s + "'");
}

inline void require_coprime(int64_t q, int64_t p) {
    if (p < 1) throw Error("casson.bad-modulus", "p must be positive");
    if (std::gcd(q, p) != 1)
        throw Error("non-coprime", "gcd(" + std::to_string(q) + ", " + std::to_string(p) + ") != 1");
}

// s(q;p) = sum_k ((k/p))((kq/p)).  With r = kq mod p both sawtooth values
// are (2k-p)/2p and (2r-p)/2p, so the sum is an integer over 4p^2.
inline Rat dedekind_s(int64_t q, int64_t p) {
    require_coprime(q, p);
    Int acc = 0;
    for (int64_t k = 1; k < p; ++k) {
        int64_t r = mod_floor(k * q, p);
        acc += Int((2 * k - p) * (2 * r - p));
    }
    return Rat(acc, Int(4) * p * p);
}

// Sawtooth ((x)) at x = a/p.
inline Rat sawtooth(int64_t a, int64_t p) {
    int64_t r = mod_floor(a, p);
    if (r == 0) return 0;
    return Rat(2 * r - p, 2 * p);
}

// sum_j (((jq+m)/p)) ((j/p)), accumulated over the common denominator 4p^2
inline Rat shifted_sum(int64_t q, int64_t p, int64_t m) {
    int64_t acc = 0;
    for (int64_t j = 1; j < p; ++j) {
        int64_t r = mod_floor(j * q + m, p);
        if (r) acc += (2 * r - p) * (2 * j - p);
    }
    return Rat(acc, 4 * p * p);
}

// Abelian classes: 0 < l < p/2 (trivial), odd 0 < l < p (odd, p even).
inline std::vector<int64_t> abelian_classes(int64_t p, Bundle b) {
    std::vector<int64_t> out;
    if (b == Bundle::trivial) {
        for (int64_t l = 1; 2 * l < p; ++l) out.push_back(l);
    } else {
        if (p % 2) throw Error("bundle-parity", "odd bundle needs p even");
        for (int64_t l = 1; l < p; l += 2) out.push_back(l);
    }
    return out;
}

inline void check_class(int64_t p, Bundle b, int64_t l) {
    if (b == Bundle::trivial) {
        if (!(0 < l && 2 * l < p)) throw Error("out-of-range", "trivial bundle needs 0 < l < p/2");
    } else {
        if (p % 2) throw Error("bundle-parity", "odd bundle needs p even");
        if (l % 2 == 0) throw Error("bundle-parity", "odd bundle needs l odd");
        if (!(0 < l && l < p)) throw Error("out-of-range", "odd bundle needs 0 < l < p");
    }
}

// Exact rho through the finite Fourier expansion of cot:
// trivial: 8[s - D(2l)], odd: 8[s - D(l)].
inline Rat rho_exact(int64_t p, int64_t q, int64_t l, Bundle b) {
    require_coprime(q, p);
    check_class(p, b, l);
    int64_t m = b == Bundle::trivial ? 2 * l : l;
    return 8 * (dedekind_s(q, p) - shifted_sum(q, p, m));
}

struct RhoEntry {
    int64_t l = 0;
    std::string value;  // decimal, `digits` significant places
    double approx = 0;
    double bound = 0;   // certified |value - true| < bound
    Rat exact;
    bool reconstructed = false;
};

namespace detail {

template <unsigned Digits>
using Float = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>>;

template <class F>
struct TrigTable {
    std::vector<F> cot, sin;  // at pi*m/p, m = 0..p-1 (cot[0] unused)
    explicit TrigTable(int64_t p) : cot(p), sin(p) {
        const F pi = boost::math::constants::pi<F>();
        for (int64_t m = 1; m < p; ++m) {
            F x = pi * m / p;
            sin[m] = boost::multiprecision::sin(x);
            cot[m] = boost::multiprecision::cos(x) / sin[m];
        }
    }
};

template <class F>
F rho_numeric(const TrigTable<F>& t, int64_t p, int64_t q, int64_t l, Bundle b, F& abs_sum) {
    F s = 0;
    abs_sum = 0;
    for (int64_t k = 1; k < p; ++k) {
        if (2 * k == p) continue;  // cot(pi/2) = 0 exactly
        int64_t kq = mod_floor(k * q, p);
        int64_t a = mod_floor((b == Bundle::trivial ? 2 : 1) * k * l, p);
        const F& sn = t.sin[a];
        F term = t.cot[k] * t.cot[kq] * sn * sn;
        s += term;
        abs_sum += boost::multiprecision::abs(term);
    }
    return 4 * s / p;
}

template <class F>
std::string decimal(const F& x, int digits) {
    auto s = x.str(digits, std::ios_base::fixed);
    // a value that rounds to zero prints without a sign
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace detail

struct RhoTable {
    int64_t p = 0, q = 0;
    Bundle bundle = Bundle::trivial;
    int precision = 0;
    std::vector<RhoEntry> entries;
};

// Each trigonometric value carries relative error below a few ulps; the
// envelope below is a generous multiple of that per term.
template <unsigned Digits>
RhoTable rho_table_at(int64_t p, int64_t q, Bundle b, int precision, bool exact,
                      std::vector<detail::Float<Digits>>* raw = nullptr) {
    using F = detail::Float<Digits>;
    require_coprime(q, p);
    RhoTable t{p, q, b, precision, {}};
    auto classes = abelian_classes(p, b);
    if (classes.empty()) return t;
    detail::TrigTable<F> tab(p);
    const F eps = boost::multiprecision::pow(F(10), -static_cast<int>(Digits) + 2);
    for (auto l : classes) {
        F abs_sum;
        F v = detail::rho_numeric(tab, p, q, l, b, abs_sum);
        F bound = 64 * eps * (4 * abs_sum / p + 1);
        RhoEntry e;
        e.l = l;
        e.value = detail::decimal(v, precision + 2);
        e.approx = static_cast<double>(v);
        e.bound = std::max(static_cast<double>(bound), 1e-300);
        if (exact) {
            e.exact = rho_exact(p, q, l, b);
            F ex = F(static_cast<F>(numerator(e.exact))) / F(static_cast<F>(denominator(e.exact)));
            e.reconstructed = boost::multiprecision::abs(ex - v) < bound;
        }
        t.entries.push_back(e);
        if (raw) raw->push_back(v);
    }
    return t;
}

inline RhoTable rho_table(int64_t p, int64_t q, Bundle b, int precision, bool exact = true) {
    if (precision < 1) throw Error("usage.bad-precision", "precision must be positive");
    if (b == Bundle::odd && p % 2) throw Error("bundle-parity", "odd bundle needs p even");
    if (precision <= 30) return rho_table_at<50>(p, q, b, precision, exact);
    if (precision <= 80) return rho_table_at<100>(p, q, b, precision, exact);
    if (precision <= 180) return rho_table_at<200>(p, q, b, precision, exact);
    throw Error("usage.bad-precision", "precision above 180 digits is not supported");
}

struct LensResult {
    int64_t p = 0, q = 0;
    Bundle bundle = Bundle::trivial;
    std::string lambda;   // numeric, decimal string
    double lambda_approx = 0;
    Rat lambda_exact;     // (1/4p) sum of exact rho
    Rat s;                // s(q;p)
    double residual = 0;  // |numeric - s|
    double bound = 0;
    bool pass = false;
};

// lambda_I = (1/4p) sum rho; lens spaces have no irreducibles.
template <unsigned Digits>
LensResult lambda_lens_at(int64_t p, int64_t q, Bundle b, int precision, double tol) {
    using F = detail::Float<Digits>;
    std::vector<F> raw;
    auto t = rho_table_at<Digits>(p, q, b, precision, true, &raw);
    LensResult r{p, q, b, "", 0, 0, dedekind_s(q, p), 0, 0, false};
    F sum = 0, bound = 0;
    Rat exact = 0;
    for (size_t i = 0; i < t.entries.size(); ++i) {
        const auto& e = t.entries[i];
        sum += raw[i];
        bound += e.bound;
        exact += e.exact;
    }
    F lam = sum / (4 * p);
    r.lambda = detail::decimal(lam, precision + 2);
    r.lambda_approx = static_cast<double>(lam);
    r.lambda_exact = exact / (4 * p);
    F sv = F(static_cast<F>(numerator(r.s))) / F(static_cast<F>(denominator(r.s)));
    r.residual = static_cast<double>(boost::multiprecision::abs(lam - sv));
    r.bound = static_cast<double>(bound) / (4 * p);
    r.pass = r.residual < tol && r.lambda_exact == r.s;
    return r;
}

inline LensResult lambda_I_lens(int64_t p, int64_t q, Bundle b, int precision, double tol = 1e-9) {
    if (b == Bundle::odd && p % 2) throw Error("bundle-parity", "odd bundle needs p even");
    if (precision <= 30) return lambda_lens_at<50>(p, q, b, precision, tol);
    if (precision <= 80) return lambda_lens_at<100>(p, q, b, precision, tol);
    return lambda_lens_at<200>(p, q, b, precision, tol);
}

// (chi + (1/4) sum rho) / |Tors|
inline Rat lambda_I_general(const Int& chi, const std::vector<Rat>& rhos, const Int& torsion_order) {
    if (torsion_order < 1) throw Error("casson.bad-torsion", "torsion order must be positive");
    Rat s = 0;
    for (auto& r : rhos) s += r;
    return (Rat(chi) + s / 4) / Rat(torsion_order);
}

// sum_{l=0}^{p-1} sin^2(2 pi k l / p), evaluated numerically and rounded to
// the nearest half-integer once the certified bound separates candidates.
inline Rat sin2_sum_check(int64_t p, int64_t k) {
    if (p < 2 || k <= 0 || k >= p) throw Error("out-of-range", "need 0 < k < p");
    if (2 * k == p) throw Error("excluded-k", "k = p/2 is excluded");
    using F = detail::Float<50>;
    detail::TrigTable<F> tab(p);
    F s = 0;
    for (int64_t l = 0; l < p; ++l) {
        const F& sn = tab.sin[mod_floor(2 * k * l, p)];
        s += sn * sn;
    }
    F twice = 2 * s;
    F nearest = boost::multiprecision::round(twice);
    if (boost::multiprecision::abs(twice - nearest) > F(1e-30))
        throw Error("casson.no-reconstruction", "sum is not a half-integer within the certified bound");
    return Rat(static_cast<int64_t>(nearest), 2);
}

}  // namespace instanton::casson
