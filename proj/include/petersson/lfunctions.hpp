#pragma once

// Central values L(f (x) chi, 1) of twisted weight-2 newforms through the
// two-sided smoothed series
//
//   L(f (x) chi, 1) = sum_n chi(n) a_n / n e^(-2 pi n / x)
//                   - chi(-N) sum_n chi(n) a_n(f|w_N) / n e^(-2 pi n x / (D^2 N)),
//
// valid for every x > 0, with a_n(f|w_N) = eps_f a_n for eigenforms.  The
// only coefficient sources shipped are the eta-product newforms, whose
// q-expansions are exact integer products of pentagonal-number series.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "petersson/arith.hpp"
#include "petersson/character.hpp"
#include "petersson/errors.hpp"

namespace petersson::lfunctions {

enum class atkin_lehner_sign : int { minus = -1, unknown = 0, plus = 1 };

struct coefficient_source {
    std::int64_t level = 0;
    std::vector<std::int64_t> a;  // a[i] = a_{i+1}, a_1 = 1
    atkin_lehner_sign sign = atkin_lehner_sign::unknown;

    std::int64_t n_max() const { return static_cast<std::int64_t>(a.size()); }
    std::int64_t coeff(std::int64_t n) const { return a[static_cast<std::size_t>(n - 1)]; }

    // Newform sanity: a_1 = 1, Hecke multiplicativity on coprime indices,
    // Deligne bound at good primes.
    void validate() const {
        if (a.empty() || a[0] != 1)
            throw invalid_query("coefficient_source: a_1 must be 1");
        const std::int64_t nmax = n_max();
        for (std::int64_t m = 2; m * 2 <= nmax; ++m)
            for (std::int64_t n = m; m * n <= nmax; ++n)
                if (arith::gcd(m, n) == 1 && coeff(m * n) != coeff(m) * coeff(n))
                    throw invalid_query("coefficient_source: Hecke multiplicativity fails");
        for (std::int64_t p = 2; p <= nmax; ++p) {
            if (!arith::is_prime(p) || level % p == 0) continue;
            double ap = static_cast<double>(coeff(p));
            if (ap * ap > 4.0 * static_cast<double>(p) + 1e-9)
                throw invalid_query("coefficient_source: Deligne bound fails");
        }
    }
};

namespace detail {

struct eta_factor {
    int scale;
    int power;
};

// The unique weight-2 newform at each listed level is an eta product; the
// scales sum (with multiplicity) to 24, giving a leading q^1.
inline std::vector<eta_factor> eta_recipe(std::int64_t level) {
    switch (level) {
        case 11: return {{1, 2}, {11, 2}};
        case 14: return {{1, 1}, {2, 1}, {7, 1}, {14, 1}};
        case 15: return {{1, 1}, {3, 1}, {5, 1}, {15, 1}};
        case 20: return {{2, 2}, {10, 2}};
        case 27: return {{3, 2}, {9, 2}};
        case 32: return {{4, 2}, {8, 2}};
        case 36: return {{6, 4}};
        default:
            throw invalid_query("eta_product_coeffs: no eta-product newform at this level");
    }
}

// Multiply the series by prod_k (1 - q^(scale k)) using the pentagonal
// number theorem: prod (1 - q^k) = sum_{j in Z} (-1)^j q^(j(3j-1)/2).
inline void multiply_euler_factor(std::vector<std::int64_t>& poly, int scale) {
    const std::int64_t deg = static_cast<std::int64_t>(poly.size());
    std::vector<std::int64_t> out(poly);  // j = 0 term
    for (std::int64_t j = 1;; ++j) {
        const std::int64_t g1 = scale * (j * (3 * j - 1) / 2);
        const std::int64_t g2 = scale * (j * (3 * j + 1) / 2);
        if (g1 >= deg && g2 >= deg) break;
        const std::int64_t sign = (j % 2 == 0) ? 1 : -1;
        for (std::int64_t i = g1; i < deg; ++i)
            out[static_cast<std::size_t>(i)] += sign * poly[static_cast<std::size_t>(i - g1)];
        for (std::int64_t i = g2; i < deg; ++i)
            out[static_cast<std::size_t>(i)] += sign * poly[static_cast<std::size_t>(i - g2)];
    }
    poly.swap(out);
}

}  // namespace detail

// Exact Fourier coefficients a_1..a_n_max of the eta-product newform at the
// given level, with its Fricke eigenvalue (all listed levels carry a
// rank-zero form, hence eps_N = -1).
inline coefficient_source eta_product_coeffs(std::int64_t level, std::int64_t n_max) {
    if (n_max < 1) throw invalid_query("eta_product_coeffs: n_max must be positive");
    auto recipe = detail::eta_recipe(level);
    std::vector<std::int64_t> poly(static_cast<std::size_t>(n_max), 0);
    poly[0] = 1;
    for (const auto& f : recipe)
        for (int rep = 0; rep < f.power; ++rep)
            detail::multiply_euler_factor(poly, f.scale);
    coefficient_source src;
    src.level = level;
    src.a = std::move(poly);  // leading q^1 shift: coefficient of q^(n-1) in the product
    src.sign = atkin_lehner_sign::minus;
    src.validate();
    return src;
}

namespace detail {

inline std::int64_t afe_terms_needed(double x) {
    // smallest n with e^(-2 pi n / x) < 1e-15 * n
    std::int64_t n = 1;
    while (std::exp(-2.0 * std::numbers::pi * static_cast<double>(n) / x) >=
           1e-15 * static_cast<double>(n)) {
        ++n;
        if (n > 100'000'000) throw invalid_query("afe: x too large");
    }
    return n;
}

inline double smoothed_sum(const coefficient_source& src,
                           const character::quadratic_character& chi,
                           double decay, std::int64_t n_terms) {
    double sum = 0.0;
    for (std::int64_t n = n_terms; n >= 1; --n) {
        int ch = chi(n);
        if (ch == 0) continue;
        sum += ch * static_cast<double>(src.coeff(n)) / static_cast<double>(n) *
               std::exp(-decay * static_cast<double>(n));
    }
    return sum;
}

}  // namespace detail

inline double afe_central_value(const coefficient_source& src,
                                const character::quadratic_character& chi,
                                double x) {
    if (x <= 0.0) throw invalid_query("afe_central_value: x must be positive");
    if (src.sign == atkin_lehner_sign::unknown)
        throw invalid_query("afe_central_value: Atkin-Lehner sign must be known");
    const std::int64_t D = chi.discriminant();
    const std::int64_t N = src.level;
    if (arith::gcd(D, N) != 1)
        throw coprimality_violation("afe_central_value: discriminant must be prime to the level");

    const double d2n = static_cast<double>(D) * static_cast<double>(D) * static_cast<double>(N);
    const std::int64_t m1 = detail::afe_terms_needed(x);
    const std::int64_t m2 = detail::afe_terms_needed(d2n / x);
    if (m1 > src.n_max() || m2 > src.n_max())
        throw insufficient_coefficients("afe_central_value: coefficient stream too short");

    const double eps_f = (src.sign == atkin_lehner_sign::plus) ? 1.0 : -1.0;
    const double chi_minus_n = static_cast<double>(chi(-N));
    const double twopi = 2.0 * std::numbers::pi;
    const double first = detail::smoothed_sum(src, chi, twopi / x, m1);
    const double second = detail::smoothed_sum(src, chi, twopi * x / d2n, m2);
    return first - chi_minus_n * eps_f * second;
}

// Recovers eps_f from x-independence of the smoothed series: only the true
// sign makes the two-sided sum constant in x.
inline atkin_lehner_sign estimate_atkin_lehner_sign(coefficient_source src, double tolerance) {
    if (tolerance <= 0.0) throw invalid_query("estimate_atkin_lehner_sign: tolerance must be positive");
    const character::quadratic_character trivial(1);
    const double root_n = std::sqrt(static_cast<double>(src.level));
    const double xs[3] = {root_n / 2.0, root_n, 2.0 * root_n};
    double spread[2] = {0.0, 0.0};  // [0]: plus, [1]: minus
    for (int s = 0; s < 2; ++s) {
        src.sign = (s == 0) ? atkin_lehner_sign::plus : atkin_lehner_sign::minus;
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < 3; ++i) {
            double v = afe_central_value(src, trivial, xs[i]);
            if (i == 0) { lo = hi = v; }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        spread[s] = hi - lo;
    }
    const bool plus_ok = spread[0] < tolerance;
    const bool minus_ok = spread[1] < tolerance;
    if (plus_ok && !minus_ok && spread[1] >= 10.0 * tolerance) return atkin_lehner_sign::plus;
    if (minus_ok && !plus_ok && spread[0] >= 10.0 * tolerance) return atkin_lehner_sign::minus;
    throw undecidable("estimate_atkin_lehner_sign: both signs pass or both fail");
}

}  // namespace petersson::lfunctions
