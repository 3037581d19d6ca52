#pragma once

// Bessel function of the first kind and order 1.
//
//   J1(z) = sum_{k>=0} (-1)^k / (k! (k+1)!) (z/2)^(2k+1)
//
// evaluated by the power series below series_cutoff (summed in long double:
// the terms near z = 16 reach ~2e5 and cancel to O(1)) and by the Hankel
// asymptotic expansion above it.  The optimal-truncation floor of the Hankel
// series is roughly e^(-2z), which is why the crossover sits at 16 and not
// lower: at z = 12 the expansion bottoms out near 1e-10.
//
// j1_integral_oracle integrates the contour representation
//
//   J1(z) = z/(4 i pi) * Int_{x0 - i inf}^{x0 + i inf} e^(w - z^2/(4w)) / w^2 dw
//
// along Re(w) = x0 by adaptive quadrature; it shares nothing with the
// series/asymptotic path and serves as an independent cross-check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "petersson/summation.hpp"

namespace petersson::bessel {

struct quadrature_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct bessel_evaluator {
    double series_cutoff = 16.0;
    int series_terms = 40;
};

inline const bessel_evaluator& default_evaluator() {
    static const bessel_evaluator ev{};
    return ev;
}

// Magnitude of the first omitted series term at argument z; the evaluator
// invariant requires this below 1e-14 on [0, series_cutoff].
inline double series_truncation_bound(double z, const bessel_evaluator& ev = default_evaluator()) {
    long double half = static_cast<long double>(z) / 2.0L;
    long double term = half;
    for (int k = 0; k < ev.series_terms; ++k)
        term *= half * half / (static_cast<long double>(k + 1) * static_cast<long double>(k + 2));
    return static_cast<double>(std::fabs(static_cast<double>(term)));
}

namespace detail {

inline double j1_series(double z, int terms) {
    const long double half = static_cast<long double>(z) / 2.0L;
    long double term = half;
    long double sum = term;
    for (int k = 0; k < terms; ++k) {
        term *= -half * half / (static_cast<long double>(k + 1) * static_cast<long double>(k + 2));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-25) break;
    }
    return static_cast<double>(sum);
}

// Hankel expansion: J1(z) ~ sqrt(2/(pi z)) (P cos chi - Q sin chi),
// chi = z - 3 pi / 4, with P, Q summed to their smallest terms.
inline double j1_asymptotic(double z) {
    const long double lz = static_cast<long double>(z);
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;
    long double prev = 1e30L;
    const int cap = static_cast<int>(2.0 * z) + 2;
    for (int k = 1; k <= cap; ++k) {
        long double odd = static_cast<long double>(2 * k - 1);
        term *= (4.0L - odd * odd) / (8.0L * lz * static_cast<long double>(k));
        long double mag = std::fabs(static_cast<long double>(term));
        if (mag > prev || mag < 1e-22L) break;
        prev = mag;
        switch (k & 3) {
            case 0: p += term; break;
            case 1: q += term; break;
            case 2: p -= term; break;  // sign folded in: series alternate in k/2
            case 3: q -= term; break;
        }
    }
    const long double chi = lz - 3.0L * std::numbers::pi_v<long double> / 4.0L;
    const long double amp = std::sqrt(2.0L / (std::numbers::pi_v<long double> * lz));
    return static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
}

}  // namespace detail

inline double j1(double z, const bessel_evaluator& ev = default_evaluator()) {
    if (z < 0.0) throw std::invalid_argument("j1: argument must be nonnegative");
    if (z == 0.0) return 0.0;
    if (z <= ev.series_cutoff) return detail::j1_series(z, ev.series_terms);
    return detail::j1_asymptotic(z);
}

// Envelope used by truncation certificates: z/2 dominates |J1| everywhere
// and 0.8 exceeds the global maximum |J1| ~= 0.5819.
inline double j1_magnitude_bound(double z) {
    if (z < 0.0) throw std::invalid_argument("j1_magnitude_bound: argument must be nonnegative");
    return std::min(z / 2.0, 0.8);
}

namespace detail {

struct quad_state {
    std::int64_t evals = 0;
    std::int64_t max_evals = 0;
};

inline double oracle_integrand(double t, double z, double x0) {
    const std::complex<double> w(x0, t);
    const std::complex<double> val =
        std::exp(std::complex<double>(0.0, t) - z * z / (4.0 * w)) / (w * w);
    return val.real();
}

inline double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                               double whole, double tol, int depth,
                               double z, double x0, quad_state& st, double& err_accum) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    st.evals += 2;
    if (st.evals > st.max_evals)
        throw quadrature_failure("j1_integral_oracle: evaluation budget exhausted");
    const double flm = oracle_integrand(lm, z, x0);
    const double frm = oracle_integrand(rm, z, x0);
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::fabs(err) <= tol) {
        err_accum += std::fabs(err);
        return left + right + err;  // one Richardson step
    }
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, z, x0, st, err_accum) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, z, x0, st, err_accum);
}

}  // namespace detail

// Quadrature of the contour representation along Re(w) = x0.  The line is
// parametrized by w = x0 + it; conjugate symmetry folds the integral onto
// t >= 0 and the t > T tail is bounded by one integration by parts:
//   |Int_T^inf e^(it) g dt| <= |g(T)| + Int_T^inf |g'|,  g = e^(-z^2/4w)/w^2.
inline double j1_integral_oracle(double z, double x0, double abs_tol = 1e-9,
                                 std::int64_t max_evals = 40'000'000) {
    if (z <= 0.0) throw std::invalid_argument("j1_integral_oracle: z must be positive");
    if (x0 <= 0.0) throw std::invalid_argument("j1_integral_oracle: x0 must be positive");
    const double prefactor = z * std::exp(x0) / (2.0 * std::numbers::pi);

    // pf * (2/T^2 + z^2/(12 T^3)) <= abs_tol / 2
    double T = std::sqrt(5.0 * prefactor / (0.5 * abs_tol));
    T = std::max({T, 8.0 * std::numbers::pi, 2.0 * z, 2.0 * x0});
    const double two_pi = 2.0 * std::numbers::pi;
    const std::int64_t blocks = static_cast<std::int64_t>(std::ceil(T / two_pi));
    T = static_cast<double>(blocks) * two_pi;
    const double tail_bound =
        prefactor * (2.0 / (T * T) + z * z / (12.0 * T * T * T));

    detail::quad_state st;
    st.max_evals = max_evals;
    const double tol_integral = 0.5 * abs_tol / std::max(prefactor, 1e-300);
    double err_accum = 0.0;
    neumaier_sum total;
    for (std::int64_t b = 0; b < blocks; ++b) {
        const double a0 = static_cast<double>(b) * two_pi;
        const double b0 = a0 + two_pi;
        st.evals += 3;
        if (st.evals > st.max_evals)
            throw quadrature_failure("j1_integral_oracle: evaluation budget exhausted");
        const double fa = detail::oracle_integrand(a0, z, x0);
        const double fm = detail::oracle_integrand(0.5 * (a0 + b0), z, x0);
        const double fb = detail::oracle_integrand(b0, z, x0);
        const double whole = (b0 - a0) / 6.0 * (fa + 4.0 * fm + fb);
        const double tol_block = tol_integral / static_cast<double>(blocks);
        total.add(detail::adaptive_simpson(a0, b0, fa, fm, fb, whole, tol_block, 36,
                                           z, x0, st, err_accum));
    }
    const double estimated_error = prefactor * err_accum + tail_bound;
    if (estimated_error > abs_tol)
        throw quadrature_failure("j1_integral_oracle: requested tolerance not reached");
    return prefactor * total.value();
}

}  // namespace petersson::bessel
