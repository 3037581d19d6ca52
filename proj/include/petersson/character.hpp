#pragma once

// Real Dirichlet characters chi_D attached to a fundamental discriminant D
// (D = 1 gives the trivial character).  Evaluation is the Kronecker symbol
// (D|n); chi is completely multiplicative with period |D| and vanishes
// exactly on n sharing a factor with D.

#include <cstdint>
#include <stdexcept>

#include "petersson/arith.hpp"

namespace petersson::character {

struct not_fundamental : std::domain_error {
    using std::domain_error::domain_error;
};

inline bool is_fundamental_discriminant(std::int64_t d) {
    if (d == 1) return true;
    if (d == 0) return false;
    std::int64_t m4 = arith::mod_reduce(d, 4);
    if (m4 == 1) return arith::is_squarefree(d);
    if (m4 == 0) {
        std::int64_t k = d / 4;
        std::int64_t km4 = arith::mod_reduce(k, 4);
        return (km4 == 2 || km4 == 3) && arith::is_squarefree(k);
    }
    return false;
}

class quadratic_character {
  public:
    explicit quadratic_character(std::int64_t discriminant)
        : discriminant_(discriminant) {
        if (!is_fundamental_discriminant(discriminant))
            throw not_fundamental("quadratic_character: not a fundamental discriminant");
    }

    std::int64_t discriminant() const { return discriminant_; }
    std::int64_t period() const { return discriminant_ < 0 ? -discriminant_ : discriminant_; }
    bool trivial() const { return discriminant_ == 1; }
    bool even() const { return discriminant_ > 0; }  // chi(-1) = sign(D)

    int operator()(std::int64_t n) const {
        if (discriminant_ == 1) return 1;
        return arith::kronecker(discriminant_, n);
    }

  private:
    std::int64_t discriminant_;
};

inline quadratic_character make_character(std::int64_t discriminant) {
    return quadratic_character(discriminant);
}

inline int char_eval(const quadratic_character& chi, std::int64_t n) {
    return chi(n);
}

}  // namespace petersson::character
