#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace asiaudit {

/// Neumaier compensated accumulator. Additions happen in call order, so a
/// fixed input ordering gives bit-identical sums on every run.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Compensated dot product over equal-length ranges, fixed left-to-right order.
inline double compensated_dot(std::span<const double> a, std::span<const double> b) {
    CompensatedSum s;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        s.add(a[i] * b[i]);
    return s.value();
}

inline double compensated_sum(std::span<const double> a) {
    CompensatedSum s;
    for (double x : a)
        s.add(x);
    return s.value();
}

/// Linear-interpolation percentile (Hyndman–Fan type 7) of an ascending
/// sorted range; p in [0, 1].
inline double percentile_hf7_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1)
        return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n)
        return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// |a - b| <= tol * max(|a|, |b|), with an absolute floor for values near zero.
inline bool approx_rel(double a, double b, double tol, double abs_floor = 0.0) {
    const double diff = std::abs(a - b);
    const double scale = std::max(std::abs(a), std::abs(b));
    return diff <= std::max(tol * scale, abs_floor);
}

} // namespace asiaudit
