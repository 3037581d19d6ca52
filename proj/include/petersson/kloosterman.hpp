#pragma once

// Kloosterman sums S(m,n;c) = sum over units k mod c of e((m k + n k^-1)/c).
// The sums are real: k and -k contribute conjugate terms.  Three evaluation
// routes are provided:
//   * kloosterman_bruteforce — the defining sum, exact rational phases;
//   * kloosterman_fast       — twisted multiplicativity across the coprime
//                              prime-power factors of c, brute force on each;
//   * kloosterman_batch      — all of S(m,0;c)..S(m,c-1;c) at once, either
//                              per-entry or by bucketing e(m u^-1 / c) and
//                              applying a length-c DFT.
// Everything is validated against the Weil bound
//   |S(m,n;c)| <= gcd(m,n,c)^(1/2) tau(c) sqrt(c).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "petersson/arith.hpp"
#include "petersson/summation.hpp"

namespace petersson::kloosterman {

// Inverse of u mod c, or -1 when gcd(u,c) > 1.  No exceptions: this sits in
// the innermost loops.
inline std::int64_t inverse_or_minus_one(std::int64_t u, std::int64_t c) {
    std::int64_t r0 = c, r1 = u, t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1) return -1;
    return t0 < 0 ? t0 + c : t0;
}

inline double kloosterman_bruteforce(std::int64_t m, std::int64_t n, std::int64_t c) {
    if (c < 1) throw std::invalid_argument("kloosterman: modulus must be positive");
    if (c == 1) return 1.0;  // empty-modulus convention: one trivial term
    const std::int64_t mr = arith::mod_reduce(m, c);
    const std::int64_t nr = arith::mod_reduce(n, c);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(c);
    neumaier_sum re, im;
    for (std::int64_t u = 1; u < c; ++u) {
        std::int64_t ubar = inverse_or_minus_one(u, c);
        if (ubar < 0) continue;
        std::int64_t phase = arith::mul_mod(mr, u, c) + arith::mul_mod(nr, ubar, c);
        if (phase >= c) phase -= c;
        re.add(std::cos(w * static_cast<double>(phase)));
        im.add(std::sin(w * static_cast<double>(phase)));
    }
    if (std::fabs(im.value()) >= 1e-12)
        throw std::logic_error("kloosterman: imaginary part failed to cancel");
    return re.value();
}

namespace detail {

// Defining sum over units mod a prime power p^e; coprimality is a simple
// divisibility test.
inline double prime_power_sum(std::int64_t m, std::int64_t n,
                              std::int64_t p, std::int64_t q) {
    if (q == 1) return 1.0;
    const std::int64_t mr = arith::mod_reduce(m, q);
    const std::int64_t nr = arith::mod_reduce(n, q);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(q);
    neumaier_sum re;
    for (std::int64_t u = 1; u < q; ++u) {
        if (u % p == 0) continue;
        std::int64_t ubar = inverse_or_minus_one(u, q);
        std::int64_t phase = arith::mul_mod(mr, u, q) + arith::mul_mod(nr, ubar, q);
        if (phase >= q) phase -= q;
        re.add(std::cos(w * static_cast<double>(phase)));
    }
    return re.value();
}

}  // namespace detail

// S(m,n;c1 c2) = S(m c2bar, n c2bar; c1) S(m c1bar, n c1bar; c2) for coprime
// c1, c2; applied across the prime-power factorization of c.
inline double kloosterman_fast(std::int64_t m, std::int64_t n, std::int64_t c) {
    if (c < 1) throw std::invalid_argument("kloosterman: modulus must be positive");
    if (c == 1) return 1.0;
    auto factors = arith::factorize(c);
    double product = 1.0;
    for (const auto& pp : factors) {
        std::int64_t q = 1;
        for (int i = 0; i < pp.exponent; ++i) q *= pp.prime;
        std::int64_t r = c / q;
        std::int64_t rbar = (r == 1) ? 1 : arith::mod_inverse(arith::mod_reduce(r, q), q);
        std::int64_t mq = arith::mul_mod(arith::mod_reduce(m, q), rbar, q);
        std::int64_t nq = arith::mul_mod(arith::mod_reduce(n, q), rbar, q);
        product *= detail::prime_power_sum(mq, nq, pp.prime, q);
    }
    return product;
}

inline double weil_bound(std::int64_t m, std::int64_t n, std::int64_t c) {
    if (c < 1) throw std::invalid_argument("weil_bound: modulus must be positive");
    std::int64_t g = arith::gcd(arith::gcd(m, n), c);
    if (g == 0) g = c;  // m = n = 0: gcd(0,0,c) = c
    return std::sqrt(static_cast<double>(g)) *
           static_cast<double>(arith::divisor_count(c)) *
           std::sqrt(static_cast<double>(c));
}

struct kloosterman_table {
    std::int64_t modulus = 1;
    std::int64_t m = 0;
    std::vector<double> values;  // values[k] = S(m, k; modulus)
};

enum class batch_strategy { direct, dft };

inline kloosterman_table kloosterman_batch(std::int64_t m, std::int64_t c,
                                           batch_strategy strategy = batch_strategy::dft) {
    if (c < 1) throw std::invalid_argument("kloosterman_batch: modulus must be positive");
    kloosterman_table table;
    table.modulus = c;
    table.m = m;
    if (c == 1) {
        table.values = {1.0};
        return table;
    }
    const std::int64_t mr = arith::mod_reduce(m, c);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(c);

    if (strategy == batch_strategy::direct) {
        std::vector<std::int64_t> units, inverses;
        for (std::int64_t u = 1; u < c; ++u) {
            std::int64_t ubar = inverse_or_minus_one(u, c);
            if (ubar < 0) continue;
            units.push_back(u);
            inverses.push_back(ubar);
        }
        std::vector<double> cos_tab(static_cast<std::size_t>(c));
        for (std::int64_t j = 0; j < c; ++j)
            cos_tab[static_cast<std::size_t>(j)] = std::cos(w * static_cast<double>(j));
        table.values.resize(static_cast<std::size_t>(c));
        for (std::int64_t k = 0; k < c; ++k) {
            neumaier_sum acc;
            for (std::size_t i = 0; i < units.size(); ++i) {
                std::int64_t phase = arith::mul_mod(mr, units[i], c) +
                                     arith::mul_mod(k, inverses[i], c);
                if (phase >= c) phase -= c;
                acc.add(cos_tab[static_cast<std::size_t>(phase)]);
            }
            table.values[static_cast<std::size_t>(k)] = acc.value();
        }
        return table;
    }

    // Substitute j = k^-1 in the defining sum: S(m,k;c) = sum_j h[j] e(jk/c)
    // with h[j] = e(m j^-1 / c) on units, 0 elsewhere — an unnormalized
    // backward DFT of h.
    std::vector<std::complex<double>> h(static_cast<std::size_t>(c), {0.0, 0.0});
    for (std::int64_t j = 1; j < c; ++j) {
        std::int64_t jbar = inverse_or_minus_one(j, c);
        if (jbar < 0) continue;
        double ang = w * static_cast<double>(arith::mul_mod(mr, jbar, c));
        h[static_cast<std::size_t>(j)] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(c));
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(c),
        reinterpret_cast<fftw_complex*>(h.data()),
        reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    table.values.resize(static_cast<std::size_t>(c));
    for (std::int64_t k = 0; k < c; ++k)
        table.values[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k)].real();
    return table;
}

}  // namespace petersson::kloosterman
