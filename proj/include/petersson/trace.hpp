#pragma once

// Right-hand sides of the Petersson trace formula restricted to
// Atkin-Lehner eigenspaces, with certified truncation.
//
// For level N, a divisor Q | N with gcd(Q, N/Q) = 1 and indices m, n >= 1,
// the building block is
//
//   S_Q(m,n) = 2 pi sum_{c > 0, (N/Q)|c, gcd(c,Q) = 1}
//              S(m, n Q^-1 mod c; c) / (c sqrt(Q)) J1(4 pi sqrt(mn) / (c sqrt(Q)))
//
// and for a sign morphism E on a subgroup H of the Atkin-Lehner group,
//
//   (|H| / 4 pi sqrt(mn)) (a_m, a_n)_N^E = delta_{mn} - sum_{Q in H} E(Q) S_Q.
//
// Tails are certified termwise from the Weil bound and |J1(z)| <= z/2:
//   |term(c)| <= 2 pi gcd(m,c)^(1/2) tau(c) c^(-3/2) * ( 2 pi sqrt(mn) / Q ),
// summed over c > c_max by the divisor-pair decomposition in certified.hpp.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "petersson/arith.hpp"
#include "petersson/bessel.hpp"
#include "petersson/certified.hpp"
#include "petersson/errors.hpp"
#include "petersson/kloosterman.hpp"
#include "petersson/parallel.hpp"
#include "petersson/summation.hpp"

namespace petersson::trace {

// Atkin-Lehner composition: Q * Q' = QQ'/gcd(Q,Q')^2.
inline std::int64_t al_product(std::int64_t q, std::int64_t r) {
    std::int64_t g = arith::gcd(q, r);
    return (q / g) * (r / g);
}

struct eigenvalue_spec {
    std::int64_t level = 1;
    std::map<std::int64_t, int> signs;  // Q -> E(Q), must contain {1, +1}

    static eigenvalue_spec classical(std::int64_t level) {
        return {level, {{1, +1}}};
    }
    static eigenvalue_spec single(std::int64_t level, std::int64_t q, int eps) {
        return {level, {{1, +1}, {q, eps}}};
    }

    void validate() const {
        if (level < 1) throw invalid_query("eigenvalue_spec: level must be positive");
        auto it1 = signs.find(1);
        if (it1 == signs.end() || it1->second != +1)
            throw invalid_query("eigenvalue_spec: H must contain Q = 1 with sign +1");
        for (const auto& [q, e] : signs) {
            if (q < 1 || level % q != 0 || arith::gcd(q, level / q) != 1)
                throw invalid_query("eigenvalue_spec: Q must divide N with gcd(Q, N/Q) = 1");
            if (e != 1 && e != -1)
                throw invalid_query("eigenvalue_spec: signs must be +1 or -1");
        }
        for (const auto& [q, eq] : signs)
            for (const auto& [r, er] : signs) {
                auto it = signs.find(al_product(q, r));
                if (it == signs.end())
                    throw invalid_query("eigenvalue_spec: H not closed under composition");
                if (it->second != eq * er)
                    throw invalid_query("eigenvalue_spec: E is not a morphism");
            }
    }
};

namespace detail {

// One Kloosterman-Bessel series: prefactor * 2 pi *
//   sum_{c > 0, L|c, gcd(c, coprime_to) = 1, c <= c_max}
//     S(m, n_factor * inv_factor^-1 mod c; c) / (c * divisor_scale)
//     * J1(bessel_arg / c).
struct series_spec {
    std::int64_t m = 1;
    std::int64_t n_factor = 1;
    std::int64_t inv_factor = 1;
    std::int64_t progression = 1;   // L
    std::int64_t coprime_to = 1;
    double divisor_scale = 1.0;     // sqrt(Q)
    double bessel_arg = 1.0;        // 4 pi sqrt(mn) / sqrt(Q)
    double prefactor = 1.0;
};

inline double series_tail(const series_spec& s, std::int64_t c_max) {
    return s.prefactor * std::numbers::pi * s.bessel_arg / s.divisor_scale *
           tails::gcd_weighted_progression_tail(s.m, s.progression, c_max);
}

inline certified_value evaluate_series(const series_spec& s,
                                       const truncation_budget& budget,
                                       int workers) {
    if (budget.c_max < 1)
        throw budget_exceeded("trace series: empty budget cannot certify a tail");
    const double tail = series_tail(s, budget.c_max);
    if (tail > budget.target_tail)
        throw budget_exceeded("trace series: certified tail exceeds target within c_max");

    const std::int64_t L = s.progression;
    const std::int64_t t_max = budget.c_max / L;
    std::vector<neumaier_sum> lane_sums(reduction_lanes);
    std::vector<std::int64_t> lane_counts(reduction_lanes, 0);
    run_lanes(workers, [&](int lane) {
        for (std::int64_t t = 1 + lane; t <= t_max; t += reduction_lanes) {
            const std::int64_t c = L * t;
            if (s.coprime_to > 1 && arith::gcd(c, s.coprime_to) != 1) continue;
            std::int64_t k = arith::mod_reduce(s.n_factor, c);
            if (s.inv_factor != 1 && c > 1)
                k = arith::mul_mod(k, arith::mod_inverse(arith::mod_reduce(s.inv_factor, c), c), c);
            const double sk = kloosterman::kloosterman_fast(s.m, k, c);
            const double z = s.bessel_arg / static_cast<double>(c);
            lane_sums[lane].add(sk / (static_cast<double>(c) * s.divisor_scale) *
                                bessel::j1(z));
            ++lane_counts[lane];
        }
    });
    neumaier_sum total;
    std::int64_t terms = 0;
    for (int lane = 0; lane < reduction_lanes; ++lane) {
        total.merge(lane_sums[lane]);
        terms += lane_counts[lane];
    }
    certified_value out;
    out.value = s.prefactor * 2.0 * std::numbers::pi * total.value();
    out.tail_bound = tail;
    out.terms_used = terms;
    return out;
}

inline void validate_sq_args(std::int64_t m, std::int64_t n, std::int64_t N, std::int64_t Q) {
    if (m < 1 || n < 1) throw invalid_query("trace: indices m, n must be positive");
    if (N < 1 || Q < 1 || N % Q != 0 || arith::gcd(Q, N / Q) != 1)
        throw invalid_query("trace: Q must divide N with gcd(Q, N/Q) = 1");
}

inline series_spec make_sq_spec(std::int64_t m, std::int64_t n, std::int64_t N, std::int64_t Q) {
    series_spec s;
    s.m = m;
    s.n_factor = n;
    s.inv_factor = Q;
    s.progression = N / Q;
    s.coprime_to = Q;
    s.divisor_scale = std::sqrt(static_cast<double>(Q));
    s.bessel_arg = 4.0 * std::numbers::pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) /
                   s.divisor_scale;
    return s;
}

}  // namespace detail

inline certified_value s_q_term(std::int64_t m, std::int64_t n, std::int64_t N, std::int64_t Q,
                                const truncation_budget& budget, int workers = 1) {
    detail::validate_sq_args(m, n, N, Q);
    return detail::evaluate_series(detail::make_sq_spec(m, n, N, Q), budget, workers);
}

// delta_{mn} - sum_{Q in H} E(Q) S_Q  ==  (|H| / 4 pi sqrt(mn)) (a_m, a_n)_N^E.
inline certified_value restricted_trace_rhs(std::int64_t m, std::int64_t n,
                                            const eigenvalue_spec& spec,
                                            const truncation_budget& budget,
                                            int workers = 1) {
    spec.validate();
    if (m < 1 || n < 1) throw invalid_query("trace: indices m, n must be positive");
    truncation_budget unchecked{budget.c_max, std::numeric_limits<double>::infinity()};
    certified_value out;
    out.value = (m == n) ? 1.0 : 0.0;
    for (const auto& [q, e] : spec.signs) {
        certified_value sq =
            detail::evaluate_series(detail::make_sq_spec(m, n, spec.level, q), unchecked, workers);
        out.value -= e * sq.value;
        out.tail_bound += sq.tail_bound;
        out.terms_used += sq.terms_used;
    }
    if (out.tail_bound > budget.target_tail)
        throw budget_exceeded("restricted_trace_rhs: certified tail exceeds target");
    return out;
}

inline certified_value single_sign_trace_rhs(std::int64_t m, std::int64_t n,
                                             std::int64_t N, std::int64_t Q, int eps,
                                             const truncation_budget& budget,
                                             int workers = 1) {
    if (Q <= 1) throw invalid_query("single_sign_trace_rhs: requires Q > 1");
    if (eps != 1 && eps != -1) throw invalid_query("single_sign_trace_rhs: eps must be +-1");
    detail::validate_sq_args(m, n, N, Q);
    return restricted_trace_rhs(m, n, eigenvalue_spec::single(N, Q, eps), budget, workers);
}

// delta_{m,nq} - 2 pi sum_{q^2 | c} S(m, nq; c)/c J1(4 pi sqrt(mnq) / c);
// vanishes for q in {2,3,5,7} where the level-q^2 pairing (a_m, a_{nq}) is zero.
inline certified_value identity_delta_series(std::int64_t m, std::int64_t n, std::int64_t q,
                                             const truncation_budget& budget,
                                             int workers = 1) {
    if (q != 2 && q != 3 && q != 5 && q != 7)
        throw invalid_query("identity_delta_series: q must be in {2,3,5,7}");
    if (m < 1 || n < 1) throw invalid_query("trace: indices m, n must be positive");
    detail::series_spec s;
    s.m = m;
    s.n_factor = n * q;
    s.progression = q * q;
    s.bessel_arg = 4.0 * std::numbers::pi *
                   std::sqrt(static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(q));
    certified_value series = detail::evaluate_series(s, budget, workers);
    series.value = ((m == n * q) ? 1.0 : 0.0) - series.value;
    return series;
}

// Prime-level form with both sums over q | c:
//   delta_{mn} - eps sqrt(q) delta_{m,nq}
//   - 2 pi sum_{q|c} S(m,n;c)/c J1(4 pi sqrt(mn)/c)
//   + 2 pi eps sqrt(q) sum_{q|c} S(m,nq;c)/c J1(4 pi sqrt(mnq)/c).
// Splitting the last sum at q || c (via S(m,nq;c) = -S(m,n q^-1; c/q)) and
// q^2 | c recovers the S_Q form, so this matches single_sign_trace_rhs up to
// the level-q^2 pairing (a_m, a_{nq})_{q^2}.
inline certified_value ik_form_rhs(std::int64_t m, std::int64_t n, std::int64_t q, int eps,
                                   const truncation_budget& budget, int workers = 1) {
    if (!arith::is_prime(q)) throw invalid_query("ik_form_rhs: q must be prime");
    if (eps != 1 && eps != -1) throw invalid_query("ik_form_rhs: eps must be +-1");
    if (m < 1 || n < 1) throw invalid_query("trace: indices m, n must be positive");
    const double sqrt_q = std::sqrt(static_cast<double>(q));
    truncation_budget unchecked{budget.c_max, std::numeric_limits<double>::infinity()};

    detail::series_spec classical;
    classical.m = m;
    classical.n_factor = n;
    classical.progression = q;
    classical.bessel_arg = 4.0 * std::numbers::pi *
                           std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    certified_value k1 = detail::evaluate_series(classical, unchecked, workers);

    detail::series_spec twisted = classical;
    twisted.n_factor = n * q;
    twisted.bessel_arg = classical.bessel_arg * sqrt_q;
    certified_value k2 = detail::evaluate_series(twisted, unchecked, workers);

    certified_value out;
    out.value = ((m == n) ? 1.0 : 0.0) -
                eps * sqrt_q * ((m == n * q) ? 1.0 : 0.0) -
                k1.value + eps * sqrt_q * k2.value;
    out.tail_bound = k1.tail_bound + sqrt_q * k2.tail_bound;
    out.terms_used = k1.terms_used + k2.terms_used;
    if (out.tail_bound > budget.target_tail)
        throw budget_exceeded("ik_form_rhs: certified tail exceeds target");
    return out;
}

}  // namespace petersson::trace
