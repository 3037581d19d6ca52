#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "petersson/kloosterman.hpp"
#include "petersson/bessel.hpp"
#include "petersson/trace.hpp"

using namespace petersson;
using namespace petersson::trace;

namespace {
const truncation_budget loose(std::int64_t c_max) {
    return {c_max, 1e30};
}
}  // namespace

TEST_CASE("eigenvalue_spec validation") {
    CHECK_NOTHROW(eigenvalue_spec::classical(12).validate());
    CHECK_NOTHROW(eigenvalue_spec::single(50, 25, -1).validate());
    eigenvalue_spec full{50, {{1, 1}, {2, -1}, {25, 1}, {50, -1}}};
    CHECK_NOTHROW(full.validate());

    eigenvalue_spec bad_div{50, {{1, 1}, {10, 1}}};  // gcd(10, 5) != 1
    CHECK_THROWS_AS(bad_div.validate(), invalid_query);
    eigenvalue_spec not_closed{50, {{1, 1}, {2, 1}, {25, 1}}};
    CHECK_THROWS_AS(not_closed.validate(), invalid_query);
    eigenvalue_spec not_morphism{50, {{1, 1}, {2, -1}, {25, 1}, {50, 1}}};
    CHECK_THROWS_AS(not_morphism.validate(), invalid_query);
}

TEST_CASE("empty budget cannot certify") {
    CHECK_THROWS_AS(s_q_term(1, 1, 4, 1, truncation_budget{0, 1e30}), budget_exceeded);
    CHECK_THROWS_AS(s_q_term(1, 1, 4, 1, truncation_budget{100, 1e-6}), budget_exceeded);
}

TEST_CASE("s_q_term against a direct reimplementation") {
    // m=1, n=2, N=4, Q=4: c runs over odd moduli, inner argument 2 * 4^-1 mod c.
    const std::int64_t c_max = 3000;
    auto got = s_q_term(1, 2, 4, 4, loose(c_max));
    double expect = 0.0;
    for (std::int64_t c = 1; c <= c_max; c += 2) {
        std::int64_t k = (c == 1) ? 0 : arith::mul_mod(2, arith::mod_inverse(4 % c, c), c);
        expect += kloosterman::kloosterman_bruteforce(1, k, c) / (static_cast<double>(c) * 2.0) *
                  bessel::j1(4.0 * std::numbers::pi * std::sqrt(2.0) / (static_cast<double>(c) * 2.0));
    }
    expect *= 2.0 * std::numbers::pi;
    CHECK_THAT(got.value, Catch::Matchers::WithinAbs(expect, 1e-12));
    CHECK(got.terms_used == (c_max + 1) / 2);
}

TEST_CASE("vanishing spaces at genus-zero levels") {
    // dim S2(Gamma0(4)) = 0, so delta_11 cancels the classical series.
    auto lvl4 = restricted_trace_rhs(1, 1, eigenvalue_spec::classical(4), loose(20000));
    CHECK(std::fabs(lvl4.value) < 5e-3);
    CHECK(std::fabs(lvl4.value) <= lvl4.tail_bound + 5e-3);

    auto lvl4q = single_sign_trace_rhs(1, 1, 4, 4, +1, loose(8000));
    CHECK(std::fabs(lvl4q.value) < 2e-2);
    auto lvl4q2 = single_sign_trace_rhs(1, 1, 4, 4, -1, loose(8000));
    CHECK(std::fabs(lvl4q2.value) < 2e-2);
}

TEST_CASE("off-diagonal indices drop the delta term") {
    auto r = restricted_trace_rhs(2, 3, eigenvalue_spec::classical(7), loose(4000));
    auto s = s_q_term(2, 3, 7, 1, loose(4000));
    CHECK(r.value == -s.value);
}

TEST_CASE("plus and minus eigenspace sums reconstruct the full formula") {
    for (auto [m, n] : {std::array<std::int64_t, 2>{1, 1}, {1, 2}, {2, 3}, {3, 3}}) {
        auto plus = single_sign_trace_rhs(m, n, 11, 11, +1, loose(2000));
        auto minus = single_sign_trace_rhs(m, n, 11, 11, -1, loose(2000));
        auto both = restricted_trace_rhs(m, n, eigenvalue_spec::classical(11), loose(2000));
        REQUIRE_THAT(plus.value + minus.value,
                     Catch::Matchers::WithinAbs(2.0 * both.value, 1e-12));
    }
}

TEST_CASE("level 49 has an empty plus eigenspace") {
    // The unique level-49 newform is fixed by -w_49 (rank zero, so the
    // completed L-function is even); the +1 side is empty.
    auto plus = single_sign_trace_rhs(1, 1, 49, 49, +1, loose(30000));
    CHECK(std::fabs(plus.value) < 5e-3);
    auto minus = single_sign_trace_rhs(1, 1, 49, 49, -1, loose(30000));
    CHECK(minus.value > 1.0);  // carries 1/||f||^2
}

TEST_CASE("delta identity series") {
    struct Case { std::int64_t m, n, q; double slack; };
    for (auto [m, n, q, slack] : {Case{1, 1, 2, 1e-3}, {2, 1, 2, 1e-3}, {3, 1, 3, 1e-3},
                                  {7, 1, 7, 1e-2}}) {
        auto r = identity_delta_series(m, n, q, loose(30000));
        INFO("m=" << m << " n=" << n << " q=" << q << " value=" << r.value);
        CHECK(std::fabs(r.value) <= r.tail_bound + slack);
        CHECK(std::fabs(r.value) < 0.05);
    }
    CHECK_THROWS_AS(identity_delta_series(1, 1, 11, loose(100)), invalid_query);
}

TEST_CASE("prime-level form matches the S_Q form") {
    // Exact difference is eps sqrt(q) (a_m, a_{nq})_{q^2} / (4 pi sqrt(mnq)),
    // a level-q^2 oldform pairing of size ~1e-2; both certified tails are
    // far above it.
    for (std::int64_t q : {11, 17})
        for (std::int64_t m : {1, 2, 3})
            for (std::int64_t n : {1, 2, 3})
                for (int eps : {+1, -1}) {
                    auto ss = single_sign_trace_rhs(m, n, q, q, eps, loose(4000));
                    auto ik = ik_form_rhs(m, n, q, eps, loose(4000));
                    REQUIRE(std::fabs(ss.value - ik.value) <=
                            ss.tail_bound + ik.tail_bound + 1e-6);
                    REQUIRE(std::fabs(ss.value - ik.value) < 0.05);
                }
}

TEST_CASE("prime-level form on an empty space") {
    auto r = ik_form_rhs(1, 1, 2, +1, loose(20000));
    CHECK(std::fabs(r.value) < 2e-2);
}

TEST_CASE("tail bound is monotone in the cutoff") {
    double prev = 1e300;
    for (std::int64_t c_max : {100, 400, 1600, 6400, 25600}) {
        auto r = identity_delta_series(2, 1, 2, loose(c_max));
        REQUIRE(r.tail_bound <= prev);
        prev = r.tail_bound;
    }
}

TEST_CASE("identical inputs give identical certified values") {
    auto a = restricted_trace_rhs(2, 2, eigenvalue_spec::single(11, 11, -1), loose(3000), 1);
    auto b = restricted_trace_rhs(2, 2, eigenvalue_spec::single(11, 11, -1), loose(3000), 4);
    CHECK(a.value == b.value);
    CHECK(a.tail_bound == b.tail_bound);
    CHECK(a.terms_used == b.terms_used);
}
