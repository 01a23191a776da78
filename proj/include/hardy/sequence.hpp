#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/numeric.hpp"

namespace hardy {

/// Anything evaluable at a positive index.
template <typename S>
concept SequenceLike = requires(const S& s, Index k) {
    { s(k) } -> std::convertible_to<double>;
};

struct Power {
    double alpha = 0.0;
};

struct PowerLog {
    double alpha = 0.0;
    double gamma = 0.0;
};

/// scale * k^alpha, used past the end of an explicit prefix.
struct PowerTail {
    double alpha = 0.0;
    double scale = 1.0;
};

struct Explicit {
    std::vector<double> values;  // values[k-1] = w(k)
    std::optional<PowerTail> tail;
};

/// Closed-form description of a sequence from `start` on:
/// w(k) = scale * k^alpha * (1 + ln k)^gamma, or identically zero.
struct TailModel {
    bool zero = false;
    double alpha = 0.0;
    double gamma = 0.0;
    double scale = 1.0;
    Index start = 1;

    [[nodiscard]] double operator()(Index k) const noexcept {
        if (zero) {
            return 0.0;
        }
        double v = scale * ipow(k, alpha);
        if (gamma != 0.0) {
            v *= std::pow(1.0 + std::log(static_cast<double>(k)), gamma);
        }
        return v;
    }
};

/// Non-negative sequence given by a closed-form family or explicit values.
class WeightSequence {
public:
    using Family = std::variant<Power, PowerLog, Explicit>;

    WeightSequence() : family_(Power{0.0}) {}
    WeightSequence(Family family, std::string label = {}) : family_(std::move(family)), label_(std::move(label)) {
        if (const auto* e = std::get_if<Explicit>(&family_)) {
            for (std::size_t i = 0; i < e->values.size(); ++i) {
                if (!(e->values[i] >= 0.0) || !std::isfinite(e->values[i])) {
                    throw Error(ErrorCode::InvalidArgument, "explicit values must be finite and non-negative",
                                static_cast<Index>(i + 1));
                }
            }
            if (e->tail && !(e->tail->scale >= 0.0)) {
                throw Error(ErrorCode::InvalidArgument, "tail scale must be non-negative");
            }
        }
        if (label_.empty()) {
            label_ = describe();
        }
    }

    static WeightSequence power(double alpha) { return WeightSequence(Power{alpha}); }
    static WeightSequence power_log(double alpha, double gamma) { return WeightSequence(PowerLog{alpha, gamma}); }
    static WeightSequence explicit_values(std::vector<double> values, std::optional<PowerTail> tail = std::nullopt) {
        return WeightSequence(Explicit{std::move(values), tail});
    }

    [[nodiscard]] double operator()(Index k) const noexcept {
        return std::visit(
            [k](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    return ipow(k, f.alpha);
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    return ipow(k, f.alpha) * std::pow(1.0 + std::log(static_cast<double>(k)), f.gamma);
                } else {
                    const auto n = static_cast<Index>(f.values.size());
                    if (k <= n) {
                        return f.values[static_cast<std::size_t>(k - 1)];
                    }
                    return f.tail ? f.tail->scale * ipow(k, f.tail->alpha) : 0.0;
                }
            },
            family_);
    }

    [[nodiscard]] const Family& family() const noexcept { return family_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Length of the explicit prefix (0 for closed-form families).
    [[nodiscard]] Index explicit_length() const noexcept {
        if (const auto* e = std::get_if<Explicit>(&family_)) {
            return static_cast<Index>(e->values.size());
        }
        return 0;
    }

    /// True when only finitely many terms are non-zero.
    [[nodiscard]] bool finitely_supported() const noexcept {
        const auto* e = std::get_if<Explicit>(&family_);
        return e != nullptr && !e->tail;
    }

    [[nodiscard]] TailModel tail_model() const noexcept {
        return std::visit(
            [](const auto& f) -> TailModel {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    return {false, f.alpha, 0.0, 1.0, 1};
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    return {false, f.alpha, f.gamma, 1.0, 1};
                } else {
                    const Index start = static_cast<Index>(f.values.size()) + 1;
                    if (!f.tail) {
                        return {true, 0.0, 0.0, 0.0, start};
                    }
                    return {false, f.tail->alpha, 0.0, f.tail->scale, start};
                }
            },
            family_);
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        std::visit(
            [&os](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Power>) {
                    os << "power:alpha=" << f.alpha;
                } else if constexpr (std::is_same_v<T, PowerLog>) {
                    os << "powerlog:alpha=" << f.alpha << ",gamma=" << f.gamma;
                } else {
                    os << "explicit:len=" << f.values.size();
                    if (f.tail) {
                        os << ",tail=" << f.tail->alpha << ",tail_scale=" << f.tail->scale;
                    }
                }
            },
            family_);
        return os.str();
    }

private:
    Family family_;
    std::string label_;
};

/// Operand of the Hardy operators: a sequence expected to lie in Q_beta,
/// i.e. k^{-beta} y(k) non-increasing.
struct QuasiSequence {
    double beta = 0.0;
    WeightSequence source;

    [[nodiscard]] double operator()(Index k) const noexcept { return source(k); }
};

enum class TailMode { CertifiedIntegral, None };

/// Governs every infinite-sum evaluation.
struct TruncationPolicy {
    Index horizon = 100000;
    TailMode tail_mode = TailMode::CertifiedIntegral;
    double rel_tol = 1e-12;

    void validate() const {
        require(horizon >= 1, ErrorCode::InvalidArgument, "horizon must be positive");
        require(rel_tol >= 0.0 && rel_tol < 1.0, ErrorCode::InvalidArgument, "rel_tol must lie in [0, 1)");
    }

    [[nodiscard]] TruncationPolicy with_horizon(Index n) const {
        TruncationPolicy p = *this;
        p.horizon = n;
        return p;
    }
};

/// Result of a quasi-monotonicity scan.
struct MonotonicityCheck {
    bool ok = true;
    std::optional<Index> first_violation;
};

/// True iff k^{-beta} y(k) >= (k+1)^{-beta} y(k+1) for 1 <= k < horizon, up to
/// a relative slack of rel_tol.
template <SequenceLike S>
MonotonicityCheck is_quasi_nonincreasing(const S& y, double beta, Index horizon, double rel_tol = 1e-12) {
    require(horizon >= 2, ErrorCode::InvalidArgument, "horizon must be at least 2");
    double previous = ipow(1, -beta) * static_cast<double>(y(1));
    for (Index k = 1; k < horizon; ++k) {
        const double next = ipow(k + 1, -beta) * static_cast<double>(y(k + 1));
        if (next > previous * (1.0 + rel_tol)) {
            return {false, k};
        }
        previous = next;
    }
    return {true, std::nullopt};
}

inline MonotonicityCheck is_quasi_nonincreasing(std::span<const double> values, double beta, Index horizon,
                                                double rel_tol = 1e-12) {
    require(horizon <= static_cast<Index>(values.size()), ErrorCode::InvalidArgument,
            "horizon exceeds the number of supplied values");
    return is_quasi_nonincreasing([values](Index k) { return values[static_cast<std::size_t>(k - 1)]; }, beta,
                                  horizon, rel_tol);
}

} // namespace hardy
