// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "petersson/petersson.hpp"

using namespace petersson;

namespace {

double now() {
    using clk = std::chrono::steady_clock;
    static const auto t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

int failures = 0;

void report_line(int id, const char* name, bool pass, const std::string& detail, double secs) {
    std::printf("[%s] criterion %2d %-24s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_kloosterman_exactness() {
    const double t0 = now();
    double max_diff = 0.0;
    bool weil_ok = true;
    for (std::int64_t c = 1; c <= 1000; ++c) {
        // shared unit/inverse/cosine tables across all (m, n)
        std::vector<std::int64_t> units, invs;
        for (std::int64_t u = 1; u < c; ++u) {
            std::int64_t ub = kloosterman::inverse_or_minus_one(u, c);
            if (ub >= 0) { units.push_back(u); invs.push_back(ub); }
        }
        std::vector<double> cos_tab(static_cast<std::size_t>(c));
        for (std::int64_t j = 0; j < c; ++j)
            cos_tab[static_cast<std::size_t>(j)] =
                std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(c));
        for (std::int64_t m = 1; m <= 20; ++m)
            for (std::int64_t n = 1; n <= 20; ++n) {
                double brute = 1.0;
                if (c > 1) {
                    neumaier_sum acc;
                    for (std::size_t i = 0; i < units.size(); ++i) {
                        std::int64_t ph =
                            arith::mul_mod(m, units[i], c) + arith::mul_mod(n, invs[i], c);
                        if (ph >= c) ph -= c;
                        acc.add(cos_tab[static_cast<std::size_t>(ph)]);
                    }
                    brute = acc.value();
                }
                max_diff = std::max(max_diff,
                                    std::fabs(kloosterman::kloosterman_fast(m, n, c) - brute));
                if (std::fabs(brute) > kloosterman::weil_bound(m, n, c) * (1.0 + 1e-12) + 1e-9)
                    weil_ok = false;
            }
    }
    const bool pass = max_diff < 1e-10 && weil_ok;
    report_line(1, "kloosterman-exactness",
                pass, fmt("max|fast-brute|=%.2e weil=%s", max_diff, weil_ok ? "ok" : "VIOLATED"),
                now() - t0);
}

// ---------------------------------------------------------------- criterion 2
void criterion_reduction_identity() {
    const double t0 = now();
    double max_diff = 0.0;
    for (std::int64_t q : {2, 3, 5, 7})
        for (std::int64_t cp = 1; cp <= 200; ++cp) {
            if (arith::gcd(q, cp) != 1) continue;
            for (std::int64_t m = 1; m <= 10; ++m)
                for (std::int64_t n = 1; n <= 10; ++n) {
                    if (m % q == 0) continue;  // identity requires q not dividing m
                    const double lhs = kloosterman::kloosterman_fast(m, n * q, q * cp);
                    const std::int64_t k =
                        (cp == 1) ? 0
                                  : arith::mul_mod(n % cp, arith::mod_inverse(q % cp, cp), cp);
                    const double rhs = -kloosterman::kloosterman_fast(m, k, cp);
                    max_diff = std::max(max_diff, std::fabs(lhs - rhs));
                }
        }
    report_line(2, "reduction-identity", max_diff < 1e-10,
                fmt("max|diff|=%.2e (q not dividing m)", max_diff), now() - t0);
}

// ---------------------------------------------------------------- criterion 3
void criterion_bessel_oracle() {
    const double t0 = now();
    double max_diff = 0.0;
    for (double z : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
        max_diff = std::max(max_diff, std::fabs(bessel::j1(z) - bessel::j1_integral_oracle(z, 1.0)));
    report_line(3, "bessel-cross-validation", max_diff < 1e-8, fmt("max|diff|=%.2e", max_diff),
                now() - t0);
}

// ---------------------------------------------------------------- criterion 4
std::vector<certified_value> delta_identity_runs(int workers) {
    std::vector<certified_value> out;
    const truncation_budget budget{50000, 1e30};
    out.push_back(trace::identity_delta_series(1, 1, 2, budget, workers));
    out.push_back(trace::identity_delta_series(2, 1, 2, budget, workers));
    out.push_back(trace::identity_delta_series(3, 1, 3, budget, workers));
    out.push_back(trace::identity_delta_series(7, 1, 7, budget, workers));
    return out;
}

std::vector<certified_value> g_delta_runs;  // reused by criterion 9

void criterion_delta_identity() {
    const double t0 = now();
    g_delta_runs = delta_identity_runs(1);
    bool pass = true;
    double worst = 0.0;
    for (const auto& r : g_delta_runs) {
        worst = std::max(worst, std::fabs(r.value));
        if (std::fabs(r.value) > r.tail_bound + 1e-2) pass = false;
    }
    report_line(4, "delta-identity", pass, fmt("max|value|=%.2e (slack 1e-2)", worst), now() - t0);
}

// ---------------------------------------------------------------- criterion 5
void criterion_form_equivalence() {
    const double t0 = now();
    bool pass = true;
    double worst = 0.0;
    const truncation_budget budget{5000, 1e30};
    for (std::int64_t q : {11, 17})
        for (std::int64_t m = 1; m <= 3; ++m)
            for (std::int64_t n = 1; n <= 3; ++n)
                for (int eps : {+1, -1}) {
                    auto ss = trace::single_sign_trace_rhs(m, n, q, q, eps, budget);
                    auto ik = trace::ik_form_rhs(m, n, q, eps, budget);
                    const double diff = std::fabs(ss.value - ik.value);
                    worst = std::max(worst, diff);
                    if (diff > ss.tail_bound + ik.tail_bound + 1e-6) pass = false;
                }
    report_line(5, "form-equivalence", pass, fmt("max|sq-ik|=%.2e", worst), now() - t0);
}

// ---------------------------------------------------------------- criterion 6
void criterion_plus_minus() {
    const double t0 = now();
    double worst = 0.0;
    const truncation_budget budget{2000, 1e30};
    for (std::int64_t m = 1; m <= 3; ++m)
        for (std::int64_t n = 1; n <= 3; ++n)
            for (auto [N, Q] : {std::array<std::int64_t, 2>{11, 11}, {12, 3}, {12, 4}, {50, 25}}) {
                auto plus = trace::single_sign_trace_rhs(m, n, N, Q, +1, budget);
                auto minus = trace::single_sign_trace_rhs(m, n, N, Q, -1, budget);
                auto both = trace::restricted_trace_rhs(
                    m, n, trace::eigenvalue_spec::classical(N), budget);
                worst = std::max(worst, std::fabs(plus.value + minus.value - 2.0 * both.value));
            }
    report_line(6, "plus-minus-reconstruction", worst < 1e-12, fmt("max|residual|=%.2e", worst),
                now() - t0);
}

// ---------------------------------------------------------------- criterion 7
void criterion_afe() {
    const double t0 = now();
    double worst_spread = 0.0, worst_vanish = 0.0;
    int vanish_cases = 0;
    for (std::int64_t level : {11, 14, 15, 20, 27, 32, 36}) {
        auto src = lfunctions::eta_product_coeffs(level, 16000);
        for (std::int64_t D : {1, 5, 8, 13}) {
            if (arith::gcd(D, level) != 1) continue;
            character::quadratic_character chi(D);
            const double base = std::sqrt(static_cast<double>(D * D * level));
            const double v1 = lfunctions::afe_central_value(src, chi, base / 2.0);
            const double v2 = lfunctions::afe_central_value(src, chi, base);
            const double v3 = lfunctions::afe_central_value(src, chi, 2.0 * base);
            worst_spread = std::max({worst_spread, std::fabs(v1 - v2), std::fabs(v2 - v3)});
            if (chi(-level) == -1) {  // matches eps_f: forced vanishing
                worst_vanish = std::max(worst_vanish, std::fabs(v2));
                ++vanish_cases;
            }
        }
    }
    const bool pass = worst_spread < 1e-8 && worst_vanish < 1e-10 && vanish_cases > 0;
    report_line(7, "afe-x-independence", pass,
                fmt("max spread=%.2e, %d vanishing cases max=%.2e", worst_spread, vanish_cases,
                    worst_vanish),
                now() - t0);
}

// ---------------------------------------------------------------- criterion 8
std::vector<moments::moment_report> g_moment_runs;

std::vector<moments::moment_report> moment_sweep(int workers) {
    std::vector<moments::moment_report> out;
    for (std::int64_t p : {5, 7, 11, 13}) {
        moments::moment_query q;
        q.d = 2;
        q.p = p;
        q.discriminant = 1;
        out.push_back(moments::newform_moment(q, truncation_budget{600000, 4.0}, workers));
    }
    return out;
}

void criterion_theorem_desk_scale() {
    const double t0 = now();
    g_moment_runs = moment_sweep(1);
    const double two_pi = 2.0 * std::numbers::pi;

    bool all_certified = true, gap_p5_ok = true, nonincreasing = true, tails_small = true;
    double prev_gap = 1e300, max_tail = 0.0;
    std::string values;
    for (const auto& rep : g_moment_runs) {
        const double gap = std::fabs(rep.newform_moment.value - two_pi);
        values += fmt("p=%lld v=%.4f gap=%.3f tail=%.3f; ", (long long)rep.query.p,
                      rep.newform_moment.value, gap, rep.newform_moment.tail_bound);
        if (rep.certificate != moments::certificate_state::certified) all_certified = false;
        if (rep.query.p == 5 && gap > 1.0) gap_p5_ok = false;
        if (gap > prev_gap) nonincreasing = false;
        prev_gap = gap;
        for (const auto& [k, cv] : rep.a_sums) max_tail = std::max(max_tail, cv.tail_bound);
        for (const auto& [k, cv] : rep.b_sums) max_tail = std::max(max_tail, cv.tail_bound);
        max_tail = std::max({max_tail, rep.moment_dp2.tail_bound, rep.moment_dp.tail_bound,
                             rep.newform_moment.tail_bound});
    }
    if (max_tail > 1e-3) tails_small = false;
    const bool pass = all_certified && gap_p5_ok && nonincreasing && tails_small;
    report_line(8, "theorem-desk-scale", pass,
                fmt("%scertified=%s gap5<=1.0=%s nonincreasing=%s tails<=1e-3=%s (max %.2e)",
                    values.c_str(), all_certified ? "yes" : "NO", gap_p5_ok ? "yes" : "NO",
                    nonincreasing ? "yes" : "NO", tails_small ? "yes" : "NO", max_tail),
                now() - t0);
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism() {
    const double t0 = now();
    std::string one, four;
    for (const auto& r : g_delta_runs) one += report::certified_json(r) + "\n";
    for (const auto& r : delta_identity_runs(4)) four += report::certified_json(r) + "\n";
    bool pass = one == four;

    std::string m1, m4;
    for (const auto& rep : g_moment_runs) m1 += report::moment_report_json(rep) + "\n";
    for (const auto& rep : moment_sweep(4)) m4 += report::moment_report_json(rep) + "\n";
    pass = pass && m1 == m4;
    report_line(9, "determinism", pass,
                fmt("identity json %s, moment json %s", one == four ? "identical" : "DIFFER",
                    m1 == m4 ? "identical" : "DIFFER"),
                now() - t0);
}

// --------------------------------------------------------------- criterion 10
void criterion_tail_soundness() {
    const double t0 = now();
    std::mt19937_64 rng(510510);
    bool pass = true;
    double worst_ratio = 0.0;
    int done = 0;
    while (done < 20) {
        const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 4)(rng);
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 4)(rng);
        const std::int64_t N = std::uniform_int_distribution<std::int64_t>(2, 40)(rng);
        std::vector<std::int64_t> qs;
        for (std::int64_t q = 1; q <= N; ++q)
            if (N % q == 0 && arith::gcd(q, N / q) == 1) qs.push_back(q);
        const std::int64_t Q = qs[std::uniform_int_distribution<std::size_t>(0, qs.size() - 1)(rng)];
        const std::int64_t c_max = std::uniform_int_distribution<std::int64_t>(300, 800)(rng);

        auto sq = trace::s_q_term(m, n, N, Q, truncation_budget{c_max, 1e30});
        const std::int64_t L = N / Q;
        const double sqrt_q = std::sqrt(static_cast<double>(Q));
        const double barg =
            4.0 * std::numbers::pi * std::sqrt(static_cast<double>(m * n)) / sqrt_q;
        double partial = 0.0;
        for (std::int64_t c = (c_max / L + 1) * L; c <= 10 * c_max; c += L) {
            if (arith::gcd(c, Q) != 1) continue;
            std::int64_t k = arith::mod_reduce(n, c);
            if (Q != 1 && c > 1)
                k = arith::mul_mod(k, arith::mod_inverse(arith::mod_reduce(Q, c), c), c);
            partial += 2.0 * std::numbers::pi *
                       std::fabs(kloosterman::kloosterman_fast(m, k, c)) /
                       (static_cast<double>(c) * sqrt_q) *
                       std::fabs(bessel::j1(barg / static_cast<double>(c)));
        }
        if (partial > sq.tail_bound) pass = false;
        if (sq.tail_bound > 0.0) worst_ratio = std::max(worst_ratio, partial / sq.tail_bound);
        ++done;
    }
    report_line(10, "tail-bound-soundness", pass,
                fmt("20 configs, max partial/bound=%.3f", worst_ratio), now() - t0);
}

}  // namespace

int main() {
    criterion_kloosterman_exactness();
    criterion_reduction_identity();
    criterion_bessel_oracle();
    criterion_delta_identity();
    criterion_form_equivalence();
    criterion_plus_minus();
    criterion_afe();
    criterion_theorem_desk_scale();
    criterion_determinism();
    criterion_tail_soundness();
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
