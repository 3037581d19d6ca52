#pragma once

// Moment pipeline: the doubly-truncated sums
//
//   A_{N,Q}(x) = 2 pi sum_{n>=1} chi(n)/sqrt(n) e^(-2 pi n / x)
//                sum_{c>0, (N/Q)|c, gcd(c,Q)=1}
//                  S(1, n Q^-1; c)/(c sqrt(Q)) J1(4 pi sqrt(n)/(c sqrt(Q)))
//
//   B_{N,Q}(x) = the same with e^(-2 pi n x / (D^2 N)),  so
//                B_{N,Q}(x) = A_{N,Q}(D^2 N / x),
//
// their combinations into the eigenspace moments at levels d p^2 and d p,
//
//   M+(dp^2) = 2 pi e^(-2pi/x) - 2 pi (A_{dp^2,1} + A_{dp^2,p^2})
//            + 2 pi chi(d) (B_{dp^2,dp^2} + B_{dp^2,d})
//   M(dp)    = 2 pi e^(-2pi/x) - 2 pi (A_{dp,1} + chi(p) A_{dp,p})
//            + 2 pi chi(d) (chi(p) B_{dp,dp} + B_{dp,d})
//
// and the newform moment M+(dp^2) - M(dp)/(p-1), whose certified interval
// excluding zero forces some a_1(f) L(f (x) chi, 1) != 0.
//
// Inner loop: for each modulus c the Kloosterman sums S(1, n Q^-1; c) over
// all active n share one enumeration of units u mod c.  With d_u =
// Q^-1 u^-1 mod c the phase of term (n, u) is u + n d_u mod c, advanced
// incrementally in n against a cosine table, so a modulus costs
// O(c + phi(c) n_max) rather than one Kloosterman evaluation per (n, c).

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "petersson/arith.hpp"
#include "petersson/bessel.hpp"
#include "petersson/certified.hpp"
#include "petersson/character.hpp"
#include "petersson/errors.hpp"
#include "petersson/kloosterman.hpp"
#include "petersson/parallel.hpp"
#include "petersson/summation.hpp"

namespace petersson::moments {

enum class x_policy { balanced, series_optimal, explicit_value };

// d in {2,3,5,7,13}; p prime not dividing d D; D a positive fundamental
// discriminant (1 = trivial character) prime to d.
struct moment_query {
    std::int64_t d = 2;
    std::int64_t p = 5;
    std::int64_t discriminant = 1;
    x_policy policy = x_policy::balanced;
    double x_explicit = 0.0;

    void validate() const {
        if (d != 2 && d != 3 && d != 5 && d != 7 && d != 13)
            throw invalid_query("moment_query: d must be in {2,3,5,7,13}");
        if (!arith::is_prime(p)) throw invalid_query("moment_query: p must be prime");
        if (discriminant < 1 || !character::is_fundamental_discriminant(discriminant))
            throw character::not_fundamental(
                "moment_query: D must be 1 or a positive fundamental discriminant");
        if (p == d || discriminant % p == 0)
            throw invalid_query("moment_query: p must not divide d D");
        if (arith::gcd(discriminant, d) != 1)
            throw invalid_query("moment_query: D must be prime to d");
        if (policy == x_policy::explicit_value && !(x_explicit > 0.0))
            throw invalid_query("moment_query: explicit x must be positive");
    }

    // balanced:       x = D sqrt(N), equalizing the two exponential ranges
    //                 (smallest certified tails);
    // series_optimal: x = D^2 N log(D^2 N), suppressing the B side at the
    //                 price of far larger certified tails.
    double resolve_x(std::int64_t level) const {
        const double d2n = static_cast<double>(discriminant) * static_cast<double>(discriminant) *
                           static_cast<double>(level);
        switch (policy) {
            case x_policy::balanced: return std::sqrt(d2n);
            case x_policy::series_optimal: return d2n * std::log(d2n);
            case x_policy::explicit_value: return x_explicit;
        }
        return std::sqrt(d2n);
    }
};

struct sum_key {
    std::int64_t level;
    std::int64_t q;
    bool operator<(const sum_key& o) const {
        return level != o.level ? level < o.level : q < o.q;
    }
};

enum class certificate_state { not_certified, certified };

struct moment_report {
    moment_query query;
    double x_dp2 = 0.0;
    double x_dp = 0.0;
    std::map<sum_key, certified_value> a_sums;
    std::map<sum_key, certified_value> b_sums;
    certified_value moment_dp2;
    certified_value moment_dp;
    certified_value newform_moment;
    double envelope = 0.0;
    certificate_state certificate = certificate_state::not_certified;
};

namespace detail {

inline double geometric_tail(double r, std::int64_t from_n) {
    // sum_{n > from_n} e^(-2 pi r n)
    const double step = std::exp(-2.0 * std::numbers::pi * r);
    if (step >= 1.0) throw invalid_query("moments: nonpositive decay rate");
    return std::pow(step, static_cast<double>(from_n) + 1.0) / (1.0 - step);
}

// Geometry of one A/B-type sum.  decay_rate r weights term n by e^(-2pi r n):
// r = 1/x on the A side, r = x/(D^2 N) on the B side.
struct double_sum_geometry {
    std::int64_t level = 1;
    std::int64_t q = 1;
    std::int64_t progression = 1;  // L = N/Q
    double decay_rate = 1.0;
    double coprime_density = 1.0;  // fraction of the progression kept by gcd(c,Q)=1

    double_sum_geometry(std::int64_t N, std::int64_t Q, double rate)
        : level(N), q(Q), progression(N / Q), decay_rate(rate) {
        for (const auto& pp : arith::factorize(Q))
            if (progression % pp.prime != 0)
                coprime_density *= 1.0 - 1.0 / static_cast<double>(pp.prime);
    }

    // The whole c-series at index n is bounded by 2 pi sqrt(n)/Q times the
    // full divisor sum, so omitting n > M costs at most n_tail_prefactor
    // times the geometric tail.
    double n_tail_prefactor() const {
        return 4.0 * std::numbers::pi * std::numbers::pi / static_cast<double>(q) *
               tails::progression_divisor_full(progression);
    }

    // Certified bound on the c > L*T block, all n: Weil + |J1(z)| <= z/2.
    double c_tail(std::int64_t T) const {
        return 4.0 * std::numbers::pi * std::numbers::pi / static_cast<double>(q) *
               geometric_tail(decay_rate, 0) *
               tails::progression_divisor_tail(progression, progression * T);
    }

    std::int64_t n_terms_for(double n_target) const {
        const double pre = n_tail_prefactor();
        std::int64_t m = 0;
        while (pre * geometric_tail(decay_rate, m) > n_target) {
            ++m;
            if (m > 2'000'000) throw budget_exceeded("moments: n-cutoff did not converge");
        }
        return m;
    }

    double n_tail(std::int64_t m) const { return n_tail_prefactor() * geometric_tail(decay_rate, m); }

    // Relative work of one progression step (modulus c = L t): the unit loop
    // costs ~phi(c)(n_terms inner iterations + an inverse) and the cosine
    // table ~c.
    double step_cost(std::int64_t n_terms) const {
        return coprime_density * static_cast<double>(progression) *
               (5.0 + 1.5 * static_cast<double>(n_terms));
    }
};

// cos_tab[j] = cos(2 pi j / c), generated by complex rotation with a sincos
// resync every 256 entries (drift stays near 1e-14, well under the certified
// tails these sums carry).
inline void fill_cosine_table(double* tab, std::int64_t c) {
    const double theta = 2.0 * std::numbers::pi / static_cast<double>(c);
    const double ct = std::cos(theta), st = std::sin(theta);
    std::int64_t j = 0;
    while (j < c) {
        double re = std::cos(theta * static_cast<double>(j));
        double im = std::sin(theta * static_cast<double>(j));
        const std::int64_t stop = std::min<std::int64_t>(j + 256, c);
        while (j < stop) {
            tab[j++] = re;
            const double nre = re * ct - im * st;
            im = re * st + im * ct;
            re = nre;
        }
    }
}

struct sum_scratch {
    std::vector<double> cos_tab;
    std::vector<double> wj;
    std::vector<unsigned char> is_unit;
    std::vector<std::int64_t> units;
    std::vector<std::int64_t> inverses;
};

// a * b mod c for 0 <= a, b < c < 2^31.  The product fits in 64 bits and the
// double-precision quotient estimate is off by at most one.
inline std::uint64_t mulmod_fast(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                 double inv_c) {
    const std::uint64_t prod = a * b;
    std::uint64_t q = static_cast<std::uint64_t>(
        static_cast<double>(a) * static_cast<double>(b) * inv_c);
    std::int64_t r = static_cast<std::int64_t>(prod - q * c);
    if (r < 0) r += static_cast<std::int64_t>(c);
    if (r >= static_cast<std::int64_t>(c)) r -= static_cast<std::int64_t>(c);
    return static_cast<std::uint64_t>(r);
}

// One modulus of the double sum: sum_{n <= n_terms} w_j(n) S(1, n qbar; c),
// all n sharing a single pass over the units of c.  Unit inverses come from
// one prefix-product chain and a single extended gcd, and the pairing
// u <-> c - u (conjugate phases, equal cosines) halves the pass.
inline double modulus_contribution(std::int64_t c, std::int64_t Q, std::int64_t n_terms,
                                   sum_scratch& st) {
    const std::int64_t qbar = (Q == 1) ? 1 : arith::mod_inverse(arith::mod_reduce(Q, c), c);
    const auto uc = static_cast<std::uint64_t>(c);
    const double inv_c = 1.0 / static_cast<double>(c);
    const double* wj = st.wj.data();

    if (c == 2) {  // single unit u = 1
        double acc = 0.0;
        std::int64_t s = 1;
        for (std::int64_t n = 1; n <= n_terms; ++n) {
            s ^= 1;
            acc += wj[n] * (s ? -1.0 : 1.0);
        }
        return acc;
    }

    const std::int64_t half = c / 2;
    st.is_unit.assign(static_cast<std::size_t>(half) + 1, 1);
    st.is_unit[0] = 0;
    for (const auto& pp : arith::factorize(c))
        for (std::int64_t j = pp.prime; j <= half; j += pp.prime)
            st.is_unit[static_cast<std::size_t>(j)] = 0;

    st.units.clear();
    for (std::int64_t u = 1; u <= half; ++u)
        if (st.is_unit[static_cast<std::size_t>(u)]) st.units.push_back(u);
    const std::size_t nu = st.units.size();

    st.inverses.resize(nu);
    std::uint64_t prod = 1;
    for (std::size_t i = 0; i < nu; ++i) {
        st.inverses[i] = static_cast<std::int64_t>(prod);  // prefix before u_i
        prod = mulmod_fast(prod, static_cast<std::uint64_t>(st.units[i]), uc, inv_c);
    }
    std::uint64_t inv_all =
        static_cast<std::uint64_t>(arith::mod_inverse(static_cast<std::int64_t>(prod), c));
    for (std::size_t i = nu; i-- > 0;) {
        const std::uint64_t before = static_cast<std::uint64_t>(st.inverses[i]);
        st.inverses[i] = static_cast<std::int64_t>(mulmod_fast(inv_all, before, uc, inv_c));
        inv_all = mulmod_fast(inv_all, static_cast<std::uint64_t>(st.units[i]), uc, inv_c);
    }

    st.cos_tab.resize(static_cast<std::size_t>(c));
    fill_cosine_table(st.cos_tab.data(), c);
    const double* cos_tab = st.cos_tab.data();

    double acc = 0.0;
    const std::uint64_t uqbar = static_cast<std::uint64_t>(qbar);
    for (std::size_t i = 0; i < nu; ++i) {
        const std::int64_t du = static_cast<std::int64_t>(
            mulmod_fast(uqbar, static_cast<std::uint64_t>(st.inverses[i]), uc, inv_c));
        std::int64_t s = st.units[i];
        for (std::int64_t n = 1; n <= n_terms; ++n) {
            s += du;
            if (s >= c) s -= c;
            acc += wj[n] * cos_tab[s];
        }
    }
    return 2.0 * acc;
}

inline double raw_double_sum(const double_sum_geometry& g,
                             const character::quadratic_character& chi,
                             std::int64_t n_terms, std::int64_t t_max, int workers,
                             std::int64_t* terms_out) {
    const std::int64_t L = g.progression, Q = g.q;
    const double sqrt_q = std::sqrt(static_cast<double>(Q));

    std::vector<double> wn(static_cast<std::size_t>(n_terms) + 1, 0.0);
    std::vector<double> zn(static_cast<std::size_t>(n_terms) + 1, 0.0);
    for (std::int64_t n = 1; n <= n_terms; ++n) {
        const double nd = static_cast<double>(n);
        wn[static_cast<std::size_t>(n)] =
            static_cast<double>(chi(n)) / std::sqrt(nd) *
            std::exp(-2.0 * std::numbers::pi * g.decay_rate * nd);
        zn[static_cast<std::size_t>(n)] = 4.0 * std::numbers::pi * std::sqrt(nd) / sqrt_q;
    }

    struct lane_state {
        neumaier_sum sum;
        std::int64_t terms = 0;
        sum_scratch scratch;
    };
    std::vector<lane_state> lanes(reduction_lanes);

    run_lanes(workers, [&](int lane) {
        lane_state& st = lanes[static_cast<std::size_t>(lane)];
        st.scratch.wj.assign(static_cast<std::size_t>(n_terms) + 1, 0.0);
        for (std::int64_t t = 1 + lane; t <= t_max; t += reduction_lanes) {
            const std::int64_t c = L * t;
            if (Q > 1 && arith::gcd(c, Q) != 1) continue;
            const double cd = static_cast<double>(c);
            for (std::int64_t n = 1; n <= n_terms; ++n)
                st.scratch.wj[static_cast<std::size_t>(n)] =
                    wn[static_cast<std::size_t>(n)] *
                    bessel::j1(zn[static_cast<std::size_t>(n)] / cd);
            double acc;
            if (c == 1) {
                acc = 0.0;  // S(1, k; 1) = 1
                for (std::int64_t n = 1; n <= n_terms; ++n)
                    acc += st.scratch.wj[static_cast<std::size_t>(n)];
            } else {
                acc = modulus_contribution(c, Q, n_terms, st.scratch);
            }
            st.sum.add(acc / (cd * sqrt_q));
            st.terms += n_terms;
        }
    });

    neumaier_sum total;
    std::int64_t terms = 0;
    for (int lane = 0; lane < reduction_lanes; ++lane) {
        total.merge(lanes[static_cast<std::size_t>(lane)].sum);
        terms += lanes[static_cast<std::size_t>(lane)].terms;
    }
    if (terms_out) *terms_out = terms;
    return 2.0 * std::numbers::pi * total.value();
}

inline void validate_level_pair(std::int64_t N, std::int64_t Q,
                                const character::quadratic_character& chi) {
    if (N < 1 || Q < 1 || N % Q != 0 || arith::gcd(Q, N / Q) != 1)
        throw invalid_query("moments: Q must divide N with gcd(Q, N/Q) = 1");
    if (arith::gcd(chi.discriminant(), N) != 1)
        throw coprimality_violation("moments: discriminant must be prime to the level");
}

// Standalone budget policy for a_sum / b_sum: 10% of the target on the
// n-tail, the rest on the c-tail, truncation point found by geometric scan.
inline certified_value budgeted_double_sum(const double_sum_geometry& g,
                                           const character::quadratic_character& chi,
                                           const truncation_budget& budget, int workers) {
    if (budget.c_max < 1)
        throw budget_exceeded("moments: empty budget cannot certify a tail");
    const double target_n = budget.target_tail * 0.1;
    const double target_c = budget.target_tail - target_n;
    const std::int64_t n_terms = g.n_terms_for(target_n);
    std::int64_t t_max = 0;
    if (g.c_tail(0) > target_c) {
        std::int64_t t = 1;
        while (true) {
            if (g.progression * t > budget.c_max)
                throw budget_exceeded("moments: certified c-tail exceeds target within c_max");
            if (g.c_tail(t) <= target_c) { t_max = t; break; }
            t += std::max<std::int64_t>(1, t / 4);
        }
    }
    certified_value out;
    out.tail_bound = g.n_tail(n_terms) + g.c_tail(t_max);
    if (n_terms > 0 && t_max > 0)
        out.value = raw_double_sum(g, chi, n_terms, t_max, workers, &out.terms_used);
    return out;
}

}  // namespace detail

inline certified_value a_sum(std::int64_t N, std::int64_t Q, double x,
                             const character::quadratic_character& chi,
                             const truncation_budget& budget, int workers = 1) {
    if (x <= 0.0) throw invalid_query("a_sum: x must be positive");
    detail::validate_level_pair(N, Q, chi);
    return detail::budgeted_double_sum({N, Q, 1.0 / x}, chi, budget, workers);
}

inline certified_value b_sum(std::int64_t N, std::int64_t Q, double x,
                             const character::quadratic_character& chi,
                             const truncation_budget& budget, int workers = 1) {
    if (x <= 0.0) throw invalid_query("b_sum: x must be positive");
    detail::validate_level_pair(N, Q, chi);
    const double dd = static_cast<double>(chi.discriminant());
    const double rate = x / (dd * dd * static_cast<double>(N));
    return detail::budgeted_double_sum({N, Q, rate}, chi, budget, workers);
}

inline double error_envelope(const moment_query& query, double constant) {
    const double dd = static_cast<double>(query.discriminant);
    const double lp = std::log(static_cast<double>(query.p));
    const double ld = std::log(dd) + 1.0;
    return constant * std::sqrt(dd) * ld * ld * ld * lp * lp /
           (static_cast<double>(query.p) * static_cast<double>(query.p));
}

namespace detail {

struct moment_parts {
    certified_value total;
    certified_value a1, a2, b1, b2;
};

// Allocates truncation lengths across the four constituent sums so their
// certified tails meet the moment target with the least work: lengths scale
// as (tail-constant / step-cost)^(2/5), the stationary point of
// sum cost_i T_i^2 under sum kappa_i T_i^(-1/2) fixed.
inline moment_parts assemble_moment(std::int64_t N, std::int64_t q_a2,
                                    double sign_a2, double sign_b_pair, double sign_b1_inner,
                                    std::int64_t q_b2, double x,
                                    const character::quadratic_character& chi,
                                    const truncation_budget& budget, int workers) {
    if (budget.c_max < 1)
        throw budget_exceeded("moments: empty budget cannot certify a tail");
    const double dd = static_cast<double>(chi.discriminant());
    const double rate_b = x / (dd * dd * static_cast<double>(N));
    const double_sum_geometry geo[4] = {
        {N, 1, 1.0 / x},         // A_{N,1}
        {N, q_a2, 1.0 / x},      // A_{N,q_a2}
        {N, N, rate_b},          // B_{N,N}
        {N, q_b2, rate_b},       // B_{N,q_b2}
    };

    const double two_pi = 2.0 * std::numbers::pi;
    const double sub_total = budget.target_tail / two_pi;
    const double n_allowance = 0.01 * sub_total;  // per sum
    std::int64_t n_terms[4];
    double n_tails = 0.0;
    double ratio[4];
    std::int64_t t_cap[4];
    for (int i = 0; i < 4; ++i) {
        n_terms[i] = geo[i].n_terms_for(n_allowance);
        n_tails += geo[i].n_tail(n_terms[i]);
        ratio[i] = std::pow(geo[i].c_tail(1) / geo[i].step_cost(n_terms[i]), 0.4);
        t_cap[i] = budget.c_max / geo[i].progression;
    }
    const double c_allowance = std::max(sub_total - n_tails, 0.0) * 0.98;

    // Geometric scan over the common scale beta, then a bisection polish;
    // capped lengths saturate at c_max.
    std::int64_t t_len[4];
    auto tail_at = [&](double beta) {
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            t_len[i] = std::min<std::int64_t>(
                t_cap[i], static_cast<std::int64_t>(beta * ratio[i]) + 1);
            total += geo[i].c_tail(t_len[i]);
        }
        return total;
    };
    double beta = 1.0;
    for (int i = 0; i < 4; ++i)
        if (ratio[i] > 0.0) beta = std::max(beta, 1.0 / ratio[i]);
    while (tail_at(beta) > c_allowance) {
        bool all_capped = true;
        for (int i = 0; i < 4; ++i)
            if (t_len[i] < t_cap[i]) all_capped = false;
        if (all_capped)
            throw budget_exceeded("moments: certified tail exceeds target within c_max");
        beta *= 1.3;
    }
    double lo = beta / 1.3, hi = beta;
    for (int step = 0; step < 40; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (tail_at(mid) <= c_allowance)
            hi = mid;
        else
            lo = mid;
    }
    tail_at(hi);  // leaves t_len at the accepted lengths

    moment_parts parts;
    certified_value* cvs[4] = {&parts.a1, &parts.a2, &parts.b1, &parts.b2};
    for (int i = 0; i < 4; ++i) {
        cvs[i]->tail_bound = geo[i].n_tail(n_terms[i]) + geo[i].c_tail(t_len[i]);
        if (n_terms[i] > 0 && t_len[i] > 0)
            cvs[i]->value = raw_double_sum(geo[i], chi, n_terms[i], t_len[i], workers,
                                           &cvs[i]->terms_used);
    }
    parts.total.value = two_pi * std::exp(-two_pi / x) -
                        two_pi * (parts.a1.value + sign_a2 * parts.a2.value) +
                        two_pi * sign_b_pair * (parts.b1.value * sign_b1_inner + parts.b2.value);
    parts.total.tail_bound = two_pi * (parts.a1.tail_bound + parts.a2.tail_bound +
                                       parts.b1.tail_bound + parts.b2.tail_bound);
    parts.total.terms_used = parts.a1.terms_used + parts.a2.terms_used +
                             parts.b1.terms_used + parts.b2.terms_used;
    return parts;
}

}  // namespace detail

// (a_1, L_chi)^{+_{p^2}}_{dp^2}: the moment over the w_{p^2}-fixed subspace.
inline detail::moment_parts moment_plus_dp2_parts(const moment_query& query, double x,
                                                  const character::quadratic_character& chi,
                                                  const truncation_budget& budget,
                                                  int workers = 1) {
    const std::int64_t N = query.d * query.p * query.p;
    const double chi_d = static_cast<double>(chi(query.d));
    // M+ = 2pi e^(-2pi/x) - 2pi (A_{N,1} + A_{N,p^2}) + 2pi chi(d) (B_{N,N} + B_{N,d})
    return detail::assemble_moment(N, query.p * query.p,
                                   /*sign_a2=*/1.0, /*sign_b_pair=*/chi_d,
                                   /*sign_b1_inner=*/1.0, query.d, x, chi, budget, workers);
}

inline certified_value moment_plus_dp2(const moment_query& query, double x,
                                       const character::quadratic_character& chi,
                                       const truncation_budget& budget, int workers = 1) {
    query.validate();
    return moment_plus_dp2_parts(query, x, chi, budget, workers).total;
}

// (a_1, L_chi)^{chi(p)_p}_{dp}: the moment at level dp with w_p-sign chi(p).
inline detail::moment_parts moment_dp_parts(const moment_query& query, double x,
                                            const character::quadratic_character& chi,
                                            const truncation_budget& budget,
                                            int workers = 1) {
    const std::int64_t N = query.d * query.p;
    const double chi_d = static_cast<double>(chi(query.d));
    const double chi_p = static_cast<double>(chi(query.p));
    // M = 2pi e^(-2pi/x) - 2pi (A_{N,1} + chi(p) A_{N,p})
    //   + 2pi chi(d) (chi(p) B_{N,N} + B_{N,d})
    return detail::assemble_moment(N, query.p,
                                   /*sign_a2=*/chi_p, /*sign_b_pair=*/chi_d,
                                   /*sign_b1_inner=*/chi_p, query.d, x, chi, budget, workers);
}

inline certified_value moment_dp(const moment_query& query, double x,
                                 const character::quadratic_character& chi,
                                 const truncation_budget& budget, int workers = 1) {
    query.validate();
    return moment_dp_parts(query, x, chi, budget, workers).total;
}

// Newform moment via the old/new decomposition:
//   (a_1,L_chi)^{+_{p^2},new}_{dp^2} = M+(dp^2) - M(dp)/(p-1).
// Certified iff the interval [value - tail, value + tail] excludes zero.
inline moment_report newform_moment(const moment_query& query,
                                    const truncation_budget& budget, int workers = 1,
                                    double envelope_constant = 1.0) {
    query.validate();
    const character::quadratic_character chi(query.discriminant);
    moment_report report;
    report.query = query;
    const std::int64_t n_dp2 = query.d * query.p * query.p;
    const std::int64_t n_dp = query.d * query.p;
    report.x_dp2 = query.resolve_x(n_dp2);
    report.x_dp = query.resolve_x(n_dp);

    // The dp moment enters divided by p - 1, so its raw target can be loose.
    const double pm1 = static_cast<double>(query.p - 1);
    truncation_budget b_dp2{budget.c_max, budget.target_tail * 0.75};
    truncation_budget b_dp{budget.c_max, budget.target_tail * 0.25 * pm1};

    auto parts2 = moment_plus_dp2_parts(query, report.x_dp2, chi, b_dp2, workers);
    auto parts1 = moment_dp_parts(query, report.x_dp, chi, b_dp, workers);

    report.a_sums[{n_dp2, 1}] = parts2.a1;
    report.a_sums[{n_dp2, query.p * query.p}] = parts2.a2;
    report.b_sums[{n_dp2, n_dp2}] = parts2.b1;
    report.b_sums[{n_dp2, query.d}] = parts2.b2;
    report.a_sums[{n_dp, 1}] = parts1.a1;
    report.a_sums[{n_dp, query.p}] = parts1.a2;
    report.b_sums[{n_dp, n_dp}] = parts1.b1;
    report.b_sums[{n_dp, query.d}] = parts1.b2;
    report.moment_dp2 = parts2.total;
    report.moment_dp = parts1.total;

    report.newform_moment.value = report.moment_dp2.value - report.moment_dp.value / pm1;
    report.newform_moment.tail_bound =
        report.moment_dp2.tail_bound + report.moment_dp.tail_bound / pm1;
    report.newform_moment.terms_used =
        report.moment_dp2.terms_used + report.moment_dp.terms_used;
    report.envelope = error_envelope(query, envelope_constant);
    report.certificate = std::fabs(report.newform_moment.value) > report.newform_moment.tail_bound
                             ? certificate_state::certified
                             : certificate_state::not_certified;
    return report;
}

}  // namespace petersson::moments
