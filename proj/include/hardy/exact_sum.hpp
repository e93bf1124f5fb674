#pragma once

#include <cmath>
#include <vector>

namespace hardy {

/// Exact floating-point accumulator (Shewchuk-style expansion, the algorithm
/// behind Python's math.fsum). The running sum is kept as a list of
/// non-overlapping partials, so cancellation is exact: if the true sum of the
/// added values is zero, value() returns exactly 0.0 regardless of ordering.
class ExactSum {
public:
    void add(double x) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            double p = parts_[i];
            if (std::fabs(x) < std::fabs(p)) std::swap(x, p);
            double s = x + p;
            double err = p - (s - x);
            if (err != 0.0) parts_[k++] = err;
            x = s;
        }
        parts_.resize(k);
        if (x != 0.0 || parts_.empty()) parts_.push_back(x);
    }

    double value() const {
        double s = 0.0;
        for (double p : parts_) s += p; // partials ascend in magnitude
        return s;
    }

    void reset() { parts_.clear(); }

private:
    std::vector<double> parts_;
};

} // namespace hardy
