#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"

namespace hardy {

/// Weight psi together with a cached table of Psi(k) = sum_{tau <= k} psi(tau).
class PsiWeight {
public:
    explicit PsiWeight(WeightSequence psi, Index capacity = 0) : psi_(std::move(psi)) {
        cumulative_.push_back(0.0);
        reserve(std::max(capacity, psi_.explicit_length()));
    }

    static PsiWeight constant_one(Index capacity = 0) { return PsiWeight(WeightSequence::power(0.0), capacity); }
    static PsiWeight power(double a, Index capacity = 0) { return PsiWeight(WeightSequence::power(a), capacity); }

    /// Extends the table to cover 1..n. Not safe to call concurrently.
    void reserve(Index n) {
        if (n <= cached()) {
            return;
        }
        cumulative_.reserve(static_cast<std::size_t>(n + 1));
        CompensatedSum acc(cumulative_.back());
        for (Index k = cached() + 1; k <= n; ++k) {
            acc += psi_(k);
            cumulative_.push_back(acc.value());
        }
    }

    [[nodiscard]] double operator()(Index k) const noexcept { return psi_(k); }

    /// Psi(n); O(1) inside the cached range.
    [[nodiscard]] double cumulative(Index n) const {
        require(n >= 0, ErrorCode::InvalidArgument, "index must be non-negative");
        if (n <= cached()) {
            return cumulative_[static_cast<std::size_t>(n)];
        }
        CompensatedSum acc(cumulative_.back());
        for (Index k = cached() + 1; k <= n; ++k) {
            acc += psi_(k);
        }
        return acc.value();
    }

    [[nodiscard]] Index cached() const noexcept { return static_cast<Index>(cumulative_.size()) - 1; }
    [[nodiscard]] const WeightSequence& sequence() const noexcept { return psi_; }

    /// Power-law bracket for Psi(k), valid for k > m with m >= the explicit prefix.
    [[nodiscard]] PowerGrowth growth(Index m) const {
        m = std::max(m, psi_.explicit_length());
        return cumulative_growth(cumulative(m), m, psi_.tail_model());
    }

private:
    WeightSequence psi_;
    std::vector<double> cumulative_;
};

inline double psi_cumulative(const PsiWeight& psi, Index n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    return psi.cumulative(n);
}

/// (1/n) sum_{k <= n} y(k).
template <SequenceLike Y>
double hardy_average(const Y& y, Index n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    CompensatedSum acc;
    for (Index k = 1; k <= n; ++k) {
        acc += static_cast<double>(y(k));
    }
    return acc.value() / static_cast<double>(n);
}

/// sum_{tau <= n} y(tau) psi(tau) / Psi(n).
template <SequenceLike Y>
double generalized_hardy_average(const PsiWeight& psi, const Y& y, Index n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    const double total = psi.cumulative(n);
    if (!(total > 0.0)) {
        throw Error(ErrorCode::ZeroCumulativeWeight, "Psi(n) vanishes", n);
    }
    CompensatedSum acc;
    for (Index k = 1; k <= n; ++k) {
        acc += static_cast<double>(y(k)) * psi(k);
    }
    return acc.value() / total;
}

/// Certified T f(n) = n^q sum_{k >= n} k^{-(q+1)} f(k) with q = p + beta p.
/// The remainder past the horizon uses the declared growth of f.
template <typename F>
Interval smoothing_operator_T(const F& f, double p, double beta, Index n, const TruncationPolicy& policy,
                              const std::optional<PowerGrowth>& growth) {
    const double q = p + beta * p;
    require(q > 0.0, ErrorCode::InvalidArgument, "p + beta p must be positive");
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    if (!growth) {
        throw Error(ErrorCode::UncertifiableTail, "no growth bound declared for f");
    }
    if (!(q > growth->degree)) {
        throw Error(ErrorCode::UncertifiableTail, "declared growth is too fast for the kernel to converge");
    }
    const Index end = std::max({policy.horizon, n - 1, growth->from - 1});
    CompensatedSum acc;
    for (Index k = n; k <= end; ++k) {
        acc += ipow(k, -(q + 1.0)) * static_cast<double>(f(k));
    }
    const Interval kernel = power_log_tail(q + 1.0 - growth->degree, 0.0, end + 1);
    const Interval rest{growth->lo * kernel.lo, growth->hi * kernel.hi};
    return (ipow(n, q) * (Interval::point(acc.value()) + rest)).widened(detail::kBracketUlps);
}

/// Interval-valued sequence on 1..N plus its growth beyond N.
struct BoundedTable {
    std::vector<Interval> values;  // values[k-1]
    PowerGrowth growth;

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(values.size()); }
};

/// T applied to every index of a bounded table at once, O(N).
inline BoundedTable apply_T(const BoundedTable& f, double q) {
    require(q > f.growth.degree, ErrorCode::UncertifiableTail, "declared growth is too fast for T");
    require(f.growth.from <= f.size() + 1, ErrorCode::InvalidArgument, "growth must cover the whole tail");
    const Index n_max = f.size();
    const Interval kernel = power_log_tail(q + 1.0 - f.growth.degree, 0.0, n_max + 1);
    CompensatedSum lo(f.growth.lo * kernel.lo);
    CompensatedSum hi(f.growth.hi * kernel.hi);
    BoundedTable out;
    out.values.resize(f.values.size());
    for (Index k = n_max; k >= 1; --k) {
        const double w = ipow(k, -(q + 1.0));
        const Interval& v = f.values[static_cast<std::size_t>(k - 1)];
        lo += w * v.lo;
        hi += w * v.hi;
        const double kq = ipow(k, q);
        out.values[static_cast<std::size_t>(k - 1)] = Interval{kq * lo.value(), kq * hi.value()}.widened(
            detail::kBracketUlps);
    }
    const double gap = q - f.growth.degree;
    const Index from = n_max + 1;
    out.growth = {f.growth.lo / gap, f.growth.hi * (1.0 / gap + 1.0 / static_cast<double>(from)), f.growth.degree,
                  from};
    return out;
}

} // namespace hardy
