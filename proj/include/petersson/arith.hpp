#pragma once

// Exact integer arithmetic: gcd, modular inverses, factorization, divisor
// counts and the Kronecker symbol.  All routines work in 64-bit integers
// with 128-bit intermediates; moduli are expected to stay below 2^31.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace petersson::arith {

struct not_invertible : std::domain_error {
    using std::domain_error::domain_error;
};

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(std::gcd(a, b));
}

// Reduce a into [0, c).
inline std::int64_t mod_reduce(std::int64_t a, std::int64_t c) {
    std::int64_t r = a % c;
    return r < 0 ? r + c : r;
}

inline std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t c) {
    return static_cast<std::int64_t>(
        static_cast<__int128>(a) * b % c);
}

// Inverse of a modulo c, in [0, c).  mod_inverse(a, 1) == 0.
inline std::int64_t mod_inverse(std::int64_t a, std::int64_t c) {
    if (c <= 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
    if (c == 1) return 0;
    std::int64_t r0 = c, r1 = mod_reduce(a, c);
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    if (r0 != 1) throw not_invertible("mod_inverse: arguments are not coprime");
    return mod_reduce(t0, c);
}

struct prime_power {
    std::int64_t prime;
    int exponent;
    bool operator==(const prime_power&) const = default;
};

// Prime factorization, primes ascending.  factorize(1) is empty.
using factorization = std::vector<prime_power>;

inline factorization factorize(std::int64_t c) {
    if (c < 1) throw std::invalid_argument("factorize: argument must be >= 1");
    factorization out;
    for (std::int64_t p = 2; p * p <= c; p += (p == 2 ? 1 : 2)) {
        if (c % p != 0) continue;
        int e = 0;
        while (c % p == 0) { c /= p; ++e; }
        out.push_back({p, e});
    }
    if (c > 1) out.push_back({c, 1});
    return out;
}

inline std::int64_t divisor_count(std::int64_t c) {
    std::int64_t tau = 1;
    for (const auto& pp : factorize(c)) tau *= pp.exponent + 1;
    return tau;
}

// Kronecker symbol (a|n), with the usual extensions to n <= 0 and n even.
inline int kronecker(std::int64_t a, std::int64_t n) {
    if (a == 0 && n == 0) throw std::invalid_argument("kronecker(0, 0) is undefined");
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    // (a|2) per a mod 8; zero for even a.
    int twos = 0;
    while (n % 2 == 0) { n /= 2; ++twos; }
    if (twos > 0) {
        if (a % 2 == 0) return 0;
        std::int64_t am8 = mod_reduce(a, 8);
        if ((twos & 1) && (am8 == 3 || am8 == 5)) sign = -sign;
    }
    // Jacobi symbol for odd n >= 1 via quadratic reciprocity.
    a = mod_reduce(a, n);
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) sign = -sign;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

inline bool is_squarefree(std::int64_t n) {
    for (const auto& pp : factorize(n < 0 ? -n : n))
        if (pp.exponent > 1) return false;
    return true;
}

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    auto f = factorize(n);
    return f.size() == 1 && f[0].exponent == 1;
}

}  // namespace petersson::arith
