#pragma once

#include <cmath>
#include <span>

namespace msrv {

/// Neumaier-compensated accumulator. Long sums (n up to 10^6 squared
/// increments) stay accurate to ~1 ulp of the exact sum, so reordering the
/// inputs moves the result by less than 1e-12 relative.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double ksum(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace msrv
