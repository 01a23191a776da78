#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hardy {

/// 1-based sequence index.
using Index = std::int64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Closed interval [lo, hi]. hi = +inf marks an unbounded upper end.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static constexpr Interval point(double x) noexcept { return {x, x}; }
    static constexpr Interval unbounded_above(double lo) noexcept { return {lo, kInf}; }

    [[nodiscard]] constexpr bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    [[nodiscard]] constexpr double width() const noexcept { return hi - lo; }
    [[nodiscard]] constexpr double mid() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] bool is_bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }
    [[nodiscard]] double relative_width() const noexcept {
        const double scale = std::max(std::abs(lo), std::abs(hi));
        return scale > 0.0 ? width() / scale : 0.0;
    }

    /// Pads both ends outward by `ulps` relative units of round-off.
    [[nodiscard]] Interval widened(double ulps = 16.0) const noexcept {
        return {lo - ulps * kEps * std::abs(lo), hi + ulps * kEps * std::abs(hi)};
    }

    friend constexpr Interval operator+(Interval a, Interval b) noexcept { return {a.lo + b.lo, a.hi + b.hi}; }
    friend constexpr Interval operator+(Interval a, double b) noexcept { return {a.lo + b, a.hi + b}; }

    /// Scaling by a non-negative factor.
    friend constexpr Interval operator*(double s, Interval a) noexcept { return {s * a.lo, s * a.hi}; }

    friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double initial) : sum_(initial) {}

    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// a <= b up to `ulps` units of relative round-off at the larger magnitude.
inline bool leq_within_ulps(double a, double b, double ulps = 4.0) noexcept {
    if (a <= b) {
        return true;
    }
    const double scale = std::max(std::abs(a), std::abs(b));
    return a - b <= ulps * kEps * scale;
}

/// k^e for an integer index, exact for e == 0.
inline double ipow(Index k, double e) noexcept {
    if (e == 0.0) {
        return 1.0;
    }
    if (e == 1.0) {
        return static_cast<double>(k);
    }
    return std::pow(static_cast<double>(k), e);
}

} // namespace hardy
