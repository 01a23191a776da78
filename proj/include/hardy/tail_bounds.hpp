#pragma once

#include <algorithm>
#include <cmath>
#include <variant>

#include <boost/math/special_functions/gamma.hpp>

#include "hardy/errors.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"

namespace hardy {

namespace detail {

// Terms are summed explicitly at most this far past the requested start
// while waiting for a log factor to become monotone.
inline constexpr Index kMonotoneSearchCap = 10'000'000;

// Relative padding for brackets built from closed forms and compensated sums.
inline constexpr double kBracketUlps = 64.0;

inline double power_log_term(double x, double s, double gamma) {
    double t = std::pow(x, -s);
    if (gamma != 0.0) {
        t *= std::pow(1.0 + std::log(x), gamma);
    }
    return t;
}

// int_K^inf x^-s (1 + ln x)^gamma dx for s >= 1, assuming convergence.
inline Interval power_log_integral(double s, double gamma, Index K) {
    const double k = static_cast<double>(K);
    const double u = 1.0 + std::log(k);
    if (s == 1.0) {
        const double v = std::pow(u, gamma + 1.0) / -(gamma + 1.0);
        return Interval::point(v);
    }
    const double a = s - 1.0;
    if (gamma == 0.0) {
        return Interval::point(std::pow(k, -a) / a);
    }
    const double g = std::pow(k, -a) * std::pow(u, gamma);
    if (gamma > -1.0) {
        const double v = std::exp(a) * std::pow(a, -(gamma + 1.0)) * boost::math::tgamma(gamma + 1.0, a * u);
        if (std::isfinite(v) && (v > 0.0 || g == 0.0)) {
            return Interval::point(v);
        }
    }
    if (gamma < 0.0) {
        return {g / (a - gamma / u), g / a};
    }
    if (a > gamma / u) {
        return {g / a, g / (a - gamma / u)};
    }
    throw Error(ErrorCode::UncertifiableTail, "no closed-form bound for the log-power integral");
}

} // namespace detail

/// Certified bracket for sum_{k >= K} k^-s (1 + ln k)^gamma.
inline Interval power_log_tail(double s, double gamma, Index K) {
    require(K >= 1, ErrorCode::InvalidArgument, "tail start must be positive");
    if (s < 1.0 || (s == 1.0 && gamma >= -1.0)) {
        throw Error(ErrorCode::DivergentTail, "tail sum diverges", K);
    }
    CompensatedSum head;
    Index start = K;
    if (gamma > 0.0) {
        // The term is non-increasing once 1 + ln x >= gamma / s.
        const double threshold = std::exp(gamma / s - 1.0);
        if (static_cast<double>(start) < threshold) {
            if (threshold - static_cast<double>(K) > static_cast<double>(detail::kMonotoneSearchCap)) {
                throw Error(ErrorCode::UncertifiableTail, "log factor not monotone within the search cap", K);
            }
            const auto stop = static_cast<Index>(std::ceil(threshold));
            for (; start < stop; ++start) {
                head += detail::power_log_term(static_cast<double>(start), s, gamma);
            }
        }
    }
    const Interval integral = detail::power_log_integral(s, gamma, start);
    const double first = detail::power_log_term(static_cast<double>(start), s, gamma);
    const Interval bracket{head.value() + integral.lo, head.value() + integral.hi + first};
    return bracket.widened(detail::kBracketUlps);
}

/// Certified bracket for sum_{k >= K} k^e m(k) where m is the tail model.
inline Interval model_tail(const TailModel& model, double e, Index K) {
    if (model.zero || model.scale == 0.0) {
        return Interval::point(0.0);
    }
    require(K >= model.start, ErrorCode::InvalidArgument, "tail start precedes the model's range");
    const Interval t = power_log_tail(-(e + model.alpha), model.gamma, K);
    return model.scale * t;
}

/// Certified bracket for sum_{k >= K} k^e w(k).
inline Interval weighted_tail(const WeightSequence& w, double e, Index K) {
    const TailModel model = w.tail_model();
    CompensatedSum head;
    Index k = K;
    for (; k < model.start; ++k) {
        head += ipow(k, e) * w(k);
    }
    const Interval rest = model_tail(model, e, std::max(K, model.start));
    return (Interval::point(head.value()) + rest).widened(detail::kBracketUlps);
}

/// sum_{k=1}^n k^e w(k).
template <SequenceLike S>
double prefix_weighted_sum(const S& w, Index n, double e) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    CompensatedSum acc;
    for (Index k = 1; k <= n; ++k) {
        acc += ipow(k, e) * static_cast<double>(w(k));
    }
    return acc.value();
}

/// Bracket for sum_{k >= n} (n/k)^p w(k): explicit summation to the horizon
/// plus a certified remainder.
inline Interval tail_power_sum(const WeightSequence& w, Index n, double p, const TruncationPolicy& policy) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    policy.validate();
    const double np = ipow(n, p);
    const auto term = [&](Index k) { return std::pow(static_cast<double>(n) / static_cast<double>(k), p) * w(k); };

    if (w.finitely_supported()) {
        CompensatedSum acc;
        for (Index k = n; k <= w.explicit_length(); ++k) {
            acc += term(k);
        }
        return Interval::point(acc.value());
    }

    if (policy.tail_mode == TailMode::None) {
        const Index end = std::max(policy.horizon, n);
        const Index mid = n + (end - n) / 2;
        CompensatedSum acc;
        double at_mid = 0.0;
        for (Index k = n; k <= end; ++k) {
            acc += term(k);
            if (k == mid) {
                at_mid = acc.value();
            }
        }
        const double total = acc.value();
        if (end > n && std::abs(total - at_mid) > policy.rel_tol * std::abs(total)) {
            throw Error(ErrorCode::UncertifiableTail, "partial sums have not stabilized", end);
        }
        return Interval::point(total);
    }

    const TailModel model = w.tail_model();
    const double s = p - model.alpha;
    if (s < 1.0 || (s == 1.0 && model.gamma >= -1.0)) {
        throw Error(ErrorCode::DivergentTail, "tail sum diverges", n);
    }
    CompensatedSum acc;
    for (Index k = n; k <= policy.horizon; ++k) {
        acc += term(k);
    }
    const Interval rest = weighted_tail(w, -p, std::max(policy.horizon + 1, n));
    return (Interval::point(acc.value()) + np * rest).widened(detail::kBracketUlps);
}

/// Two-sided power bound lo * k^degree <= S(k) <= hi * k^degree for k >= from.
struct PowerGrowth {
    double lo = 0.0;
    double hi = 0.0;
    double degree = 0.0;
    Index from = 1;

    [[nodiscard]] Interval at(Index k) const noexcept {
        const double kd = ipow(k, degree);
        return {lo * kd, hi * kd};
    }
};

/// Growth of S(k) = S_M + sum_{M < j <= k} m(j), given S_M = S(M) and the
/// tail model m(j) = scale j^a valid for j > M.
inline PowerGrowth cumulative_growth(double s_m, Index m, const TailModel& model) {
    require(m >= 0, ErrorCode::InvalidArgument, "M must be non-negative");
    const Index from = m + 1;
    if (model.zero || model.scale == 0.0) {
        return {s_m, s_m, 0.0, from};
    }
    require(model.start <= from, ErrorCode::InvalidArgument, "tail model starts after M + 1");
    if (model.gamma != 0.0) {
        throw Error(ErrorCode::UncertifiableTail, "cumulative growth of a log-power term is not supported");
    }
    const double a = model.alpha;
    const double scale = model.scale;
    const double M = static_cast<double>(m);
    const double M1 = M + 1.0;
    if (a == -1.0) {
        throw Error(ErrorCode::UncertifiableTail, "logarithmic cumulative growth is not supported");
    }
    PowerGrowth out{};
    out.from = from;
    if (a < -1.0) {
        const double room = m == 0 ? scale * (1.0 + 1.0 / (-(a + 1.0))) : scale * std::pow(M, a + 1.0) / -(a + 1.0);
        out.lo = s_m + scale * std::pow(M1, a);
        out.hi = s_m + room;
        out.degree = 0.0;
    } else {
        const double g = a + 1.0;
        out.degree = g;
        const double scaled = std::pow(M1, g);
        if (a >= 0.0) {
            const double d = s_m - scale * std::pow(M, g) / g;
            const double e = s_m - scale * scaled / g;
            out.lo = scale / g + std::min(0.0, d) / scaled;
            out.hi = scale * std::pow(1.0 + 1.0 / M1, g) / g + std::max(0.0, e) / scaled;
        } else {
            const double d = s_m - scale * scaled / g;
            const double e = s_m - scale * std::pow(M, g) / g;
            out.lo = scale / g + std::min(0.0, d) / scaled;
            out.hi = scale / g + std::max(0.0, e) / scaled;
        }
    }
    if (!(out.lo > 0.0)) {
        throw Error(ErrorCode::UncertifiableTail, "cumulative growth lower bound is not positive", from);
    }
    out.lo *= 1.0 - detail::kBracketUlps * kEps;
    out.hi *= 1.0 + detail::kBracketUlps * kEps;
    return out;
}

} // namespace hardy
