#pragma once

// Certified truncation machinery.  A certified_value carries a partial sum
// together with a bound on everything omitted, so the true value of the
// infinite series lies in [value - tail_bound, value + tail_bound].
//
// The tail bounds rest on two explicit inequalities:
//   * sum_{b >= B} b^(-3/2)            <= B^(-3/2) + 2/sqrt(B)
//   * sum_{t > T} tau(t) t^(-3/2)      <= sum over divisor pairs ab > T,
//     split at a <= sqrt(T), an O(log(T)/sqrt(T)) quantity with explicit
//     constants (divisor_tail below).
// Combined with the Weil bound and |J1(z)| <= z/2 they certify every
// Kloosterman-Bessel c-tail in the trace and moment modules.

#include <cmath>
#include <cstdint>

#include "petersson/arith.hpp"
#include "petersson/errors.hpp"

namespace petersson {

struct truncation_budget {
    std::int64_t c_max = 0;
    double target_tail = 0.0;
};

struct certified_value {
    double value = 0.0;
    double tail_bound = 0.0;
    std::int64_t terms_used = 0;
};

namespace tails {

// Upper bound on zeta(3/2); any digit-truncation rounded up.
inline constexpr double zeta_three_half = 2.6123753486854884;

// sum_{b >= B} b^(-3/2), B >= 1.
inline double zeta32_tail(double B) {
    if (B <= 1.0) return zeta_three_half;
    return std::pow(B, -1.5) + 2.0 / std::sqrt(B);
}

// Upper bound on sum_{t > T} tau(t) t^(-3/2) = sum_{ab > T} (ab)^(-3/2): the
// hyperbola region splits exactly into {a <= sqrt(T), b > T/a}, its mirror,
// and the corner {a, b > sqrt(T)}.
inline double divisor_tail(std::int64_t T) {
    if (T < 1) return zeta_three_half * zeta_three_half;
    const auto A = static_cast<std::int64_t>(std::sqrt(static_cast<double>(T)));
    double wing = 0.0;
    for (std::int64_t a = 1; a <= A; ++a) {
        double B = static_cast<double>(T / a) + 1.0;
        wing += std::pow(static_cast<double>(a), -1.5) * zeta32_tail(B);
    }
    const double corner = zeta32_tail(static_cast<double>(A) + 1.0);
    return 2.0 * wing + corner * corner;
}

// Upper bound on sum over c > C, L | c of tau(c) c^(-3/2), via
// tau(L t) <= tau(L) tau(t).
inline double progression_divisor_tail(std::int64_t L, std::int64_t C) {
    const double scale = static_cast<double>(arith::divisor_count(L)) *
                         std::pow(static_cast<double>(L), -1.5);
    return scale * divisor_tail(C / L);
}

// Full-series variant: sum over all c >= 1, L | c of tau(c) c^(-3/2).
inline double progression_divisor_full(std::int64_t L) {
    return static_cast<double>(arith::divisor_count(L)) *
           std::pow(static_cast<double>(L), -1.5) *
           zeta_three_half * zeta_three_half;
}

// Upper bound on sum over c > C, L | c of gcd(m,c)^(1/2) tau(c) c^(-3/2):
// gcd(m,c)^(1/2) <= sum over divisors g of gcd, so each divisor class g | m
// contributes through the coarser progression lcm(L, g) | c.
inline double gcd_weighted_progression_tail(std::int64_t m, std::int64_t L, std::int64_t C) {
    m = m < 0 ? -m : m;
    if (m <= 1) return progression_divisor_tail(L, C);
    double total = 0.0;
    for (std::int64_t g = 1; g <= m; ++g) {
        if (m % g != 0) continue;
        std::int64_t lg = L / arith::gcd(L, g) * g;
        total += std::sqrt(static_cast<double>(g)) * progression_divisor_tail(lg, C);
    }
    return total;
}

}  // namespace tails
}  // namespace petersson
