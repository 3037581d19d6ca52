#pragma once

// Compensated (Neumaier) accumulation.  Series evaluations sum thousands of
// like-sized oscillating terms; the compensation keeps the result at the
// rounding level of the true sum and makes lane-merged parallel reductions
// reproducible.

#include <cmath>

namespace petersson {

class neumaier_sum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    // Merge a finished partial sum; ordering of merges must be fixed.
    void merge(const neumaier_sum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace petersson
