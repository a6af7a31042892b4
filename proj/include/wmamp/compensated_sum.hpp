#pragma once

#include <cmath>

namespace wmamp {

// Neumaier's variant of Kahan summation: also correct when the incoming term
// is larger in magnitude than the running sum.
template <typename Scalar>
class CompensatedSum {
public:
    CompensatedSum& operator+=(Scalar value) {
        const Scalar t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    Scalar value() const { return sum_ + compensation_; }

private:
    Scalar sum_{0};
    Scalar compensation_{0};
};

} // namespace wmamp
