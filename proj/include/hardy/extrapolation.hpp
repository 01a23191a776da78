#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/hardy_operators.hpp"
#include "hardy/inequality_verifier.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"
#include "hardy/weight_classes.hpp"

namespace hardy {

struct EpsilonResult {
    double eps_formula = 0.0;
    double eps_verified = 0.0;
    ConstantEstimate original;
    ConstantEstimate new_class_constant;
};

/// a * x.
struct Linear {
    double a = 1.0;
};

/// a * x^r; r = 0 gives the constant a.
struct PowerFn {
    double a = 1.0;
    double r = 1.0;
};

/// Piecewise-linear interpolation through (x, y) points, flat outside the range.
struct Tabulated {
    std::vector<std::pair<double, double>> points;
};

class PhiFunction {
public:
    using Family = std::variant<Linear, PowerFn, Tabulated>;

    PhiFunction() : family_(Linear{1.0}) {}
    explicit PhiFunction(Family family) : family_(std::move(family)) { validate(); }

    static PhiFunction identity() { return PhiFunction(Linear{1.0}); }
    static PhiFunction constant(double a) { return PhiFunction(PowerFn{a, 0.0}); }

    [[nodiscard]] double operator()(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Linear>) {
                    return f.a * x;
                } else if constexpr (std::is_same_v<T, PowerFn>) {
                    return f.r == 0.0 ? f.a : f.a * std::pow(x, f.r);
                } else {
                    const auto& pts = f.points;
                    if (x <= pts.front().first) {
                        return pts.front().second;
                    }
                    if (x >= pts.back().first) {
                        return pts.back().second;
                    }
                    const auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                                     [](double v, const auto& pt) { return v < pt.first; });
                    const auto& [x1, y1] = *it;
                    const auto& [x0, y0] = *(it - 1);
                    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                }
            },
            family_);
    }

    [[nodiscard]] const Family& family() const noexcept { return family_; }

    [[nodiscard]] std::string describe() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Linear>) {
                    return f.a == 1.0 ? "id" : "pow:a=" + std::to_string(f.a) + ",r=1";
                } else if constexpr (std::is_same_v<T, PowerFn>) {
                    return f.r == 0.0 ? "const:a=" + std::to_string(f.a)
                                      : "pow:a=" + std::to_string(f.a) + ",r=" + std::to_string(f.r);
                } else {
                    return "table:points=" + std::to_string(f.points.size());
                }
            },
            family_);
    }

    /// Non-negativity and monotonicity on the given points.
    void check_on(const std::vector<double>& xs) const {
        double previous = -kInf;
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        for (double x : sorted) {
            const double y = (*this)(x);
            if (!(y >= 0.0)) {
                throw Error(ErrorCode::NonMonotonePhi, "phi is negative at x = " + std::to_string(x));
            }
            if (y < previous) {
                throw Error(ErrorCode::NonMonotonePhi, "phi decreases at x = " + std::to_string(x));
            }
            previous = y;
        }
    }

private:
    void validate() const {
        std::visit(
            [](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Linear>) {
                    if (!(f.a >= 0.0)) {
                        throw Error(ErrorCode::NonMonotonePhi, "linear phi needs a >= 0");
                    }
                } else if constexpr (std::is_same_v<T, PowerFn>) {
                    if (!(f.a >= 0.0) || !(f.r >= 0.0)) {
                        throw Error(ErrorCode::NonMonotonePhi, "power phi needs a >= 0 and r >= 0");
                    }
                } else {
                    if (f.points.empty()) {
                        throw Error(ErrorCode::InvalidArgument, "table needs at least one point");
                    }
                    for (std::size_t i = 0; i < f.points.size(); ++i) {
                        if (!(f.points[i].second >= 0.0)) {
                            throw Error(ErrorCode::NonMonotonePhi, "table value is negative");
                        }
                        if (i > 0 && !(f.points[i].first > f.points[i - 1].first)) {
                            throw Error(ErrorCode::InvalidArgument, "table abscissae must increase strictly");
                        }
                        if (i > 0 && f.points[i].second < f.points[i - 1].second) {
                            throw Error(ErrorCode::NonMonotonePhi, "table values decrease");
                        }
                    }
                }
            },
            family_);
    }

    Family family_;
};

/// eps bound 1 / (2 (c+1) max{1/(p + beta p), 1}) with c + 1 taken as the certified class constant.
inline double openended_epsilon_bound(double class_constant, double beta, double p) {
    const double q = p + beta * p;
    require(q > 0.0, ErrorCode::InvalidArgument, "p + beta p must be positive");
    return 1.0 / (2.0 * class_constant * std::max(1.0 / q, 1.0));
}

/// Finds the largest eps in (0, eps_formula] keeping w in QB_{beta, p - eps}.
inline EpsilonResult openended_epsilon(const WeightSequence& w, double beta, double p, const TruncationPolicy& policy) {
    EpsilonResult out;
    out.original = qb_constant(w, beta, p, policy);
    if (out.original.verdict != Verdict::Member) {
        throw Error(ErrorCode::NotMember, "weight is not a certified member at exponent p");
    }
    out.eps_formula = openended_epsilon_bound(out.original.bracket.hi, beta, p);

    const auto member_at = [&](double eps, ConstantEstimate& est) {
        if (!(p - eps > 0.0)) {
            return false;
        }
        est = qb_constant(w, beta, p - eps, policy);
        return est.verdict == Verdict::Member;
    };

    ConstantEstimate est;
    double good = 0.0;
    double bad = out.eps_formula;
    double eps = out.eps_formula;
    constexpr int kCoarseSteps = 40;
    for (int j = 0; j < kCoarseSteps; ++j, eps *= 0.5) {
        if (member_at(eps, est)) {
            good = eps;
            out.new_class_constant = est;
            break;
        }
        bad = eps;
    }
    if (good == 0.0) {
        throw Error(ErrorCode::BisectionExhausted, "no eps on the grid keeps membership");
    }
    if (good < out.eps_formula) {
        constexpr int kBisectionSteps = 30;
        for (int i = 0; i < kBisectionSteps; ++i) {
            const double mid = 0.5 * (good + bad);
            if (member_at(mid, est)) {
                good = mid;
                out.new_class_constant = est;
            } else {
                bad = mid;
            }
        }
    }
    out.eps_verified = good;
    return out;
}

/// (1 + 1/eps) max{p0 (1 + beta) - eps, 1}.
inline double embedding_weight_constant(double beta, double p0, double eps) {
    if (!(eps > 0.0 && eps < p0 * (beta + 1.0))) {
        throw Error(ErrorCode::OutOfRange, "eps must lie in (0, p0 (beta + 1))");
    }
    return (1.0 + 1.0 / eps) * std::max(p0 * (1.0 + beta) - eps, 1.0);
}

/// w(k) = k^{p0 - 1 - eps} on 1..n, zero beyond.
inline WeightSequence embedding_weight(double p0, double eps, Index n) {
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) {
        values[static_cast<std::size_t>(k - 1)] = ipow(k, p0 - 1.0 - eps);
    }
    return WeightSequence::explicit_values(std::move(values));
}

/// Checks sum_{k>=m} (m/k)^{p0} w(k) <= c sum_{k<=m} (k/m)^{beta p0} w(k) at every m
/// for the truncated embedding weight; throws VerificationFailure at the first violation.
inline bool verify_embedding_weight(double beta, double p0, double eps, Index n, const TruncationPolicy& policy) {
    const double c = embedding_weight_constant(beta, p0, eps);
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    policy.validate();
    const WeightSequence w = embedding_weight(p0, eps, n);
    std::vector<double> suffix(static_cast<std::size_t>(n) + 2, 0.0);
    {
        CompensatedSum acc;
        for (Index k = n; k >= 1; --k) {
            acc += ipow(k, -p0) * w(k);
            suffix[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    CompensatedSum prefix;
    for (Index m = 1; m <= n; ++m) {
        prefix += ipow(m, beta * p0) * w(m);
        const double lhs = ipow(m, p0 + beta * p0) * suffix[static_cast<std::size_t>(m)];
        if (!leq_within_ulps(lhs, c * prefix.value(), 16.0)) {
            throw Error(ErrorCode::VerificationFailure, "embedding weight violates the class inequality", m);
        }
    }
    return true;
}

namespace detail {

inline void require_extrapolation_regime(double p0, double p, double beta) {
    if (!(p0 >= 2.0 && p >= p0 && beta >= 0.0)) {
        throw Error(ErrorCode::OutOfRange, "only p >= p0 >= 2 and beta >= 0 are supported");
    }
}

} // namespace detail

/// ((p0 (1+beta) - eps) max{p0 - eps, 1} phi((p0 (beta+1) - eps)(1 + 1/eps)))^{p/p0}.
inline double extrapolation_constant(double p0, double p, double beta, double eps, const PhiFunction& phi) {
    detail::require_extrapolation_regime(p0, p, beta);
    if (!(eps > 0.0 && eps <= p0 - 1.0)) {
        throw Error(ErrorCode::OutOfRange, "eps must lie in (0, p0 - 1]");
    }
    const double a = p0 * (1.0 + beta) - eps;
    const double base = a * std::max(p0 - eps, 1.0) * phi(a * (1.0 + 1.0 / eps));
    return std::pow(base, p / p0);
}

struct TildePhi {
    double inf_value = 0.0;    // min over the grid of the extrapolation constant
    double argmin_eps = 0.0;
    double outer_factor = 1.0; // C; 1 when no weight was supplied
    double chosen_eps = 0.0;   // eps at which the product below is formed
    double chosen_constant = 0.0;
    double value = 0.0;        // outer_factor * chosen_constant
    std::optional<ConstantEstimate> condition;  // psi-condition behind the outer factor
};

inline void validate_eps_grid(const std::vector<double>& grid, double p0) {
    if (grid.empty()) {
        throw Error(ErrorCode::EmptyGrid, "eps grid is empty");
    }
    for (double e : grid) {
        if (!(e > 0.0 && e <= p0 - 1.0)) {
            throw Error(ErrorCode::OutOfRange, "grid value outside (0, p0 - 1]");
        }
    }
}

/// Infimum of the extrapolation constant over the grid; outer factor 1.
inline TildePhi extrapolation_tilde_phi(double p0, double p, double beta, const PhiFunction& phi,
                                        const std::vector<double>& eps_grid) {
    detail::require_extrapolation_regime(p0, p, beta);
    validate_eps_grid(eps_grid, p0);
    std::vector<double> args;
    for (double e : eps_grid) {
        const double a = p0 * (1.0 + beta) - e;
        args.push_back(a * (1.0 + 1.0 / e));
    }
    phi.check_on(args);
    TildePhi out;
    out.inf_value = kInf;
    for (double e : eps_grid) {
        const double c = extrapolation_constant(p0, p, beta, e, phi);
        if (c < out.inf_value) {
            out.inf_value = c;
            out.argmin_eps = e;
        }
    }
    out.chosen_eps = out.argmin_eps;
    out.chosen_constant = out.inf_value;
    out.value = out.inf_value;
    return out;
}

/// Outer factor for one conclusion weight: the sufficiency bound for psi(t) = t^{p0 - eps - 1}
/// with exponent p/p0 and quasi-monotonicity beta p0. psi is non-decreasing, so the
/// doubling constant is 1.
inline std::pair<UpperBound, ConstantEstimate> extrapolation_outer_factor(const WeightSequence& w, double p0, double p,
                                                                          double beta, double eps,
                                                                          const TruncationPolicy& policy) {
    const PsiWeight psi = PsiWeight::power(p0 - eps - 1.0);
    const double beta_prime = beta * p0;
    const double p_prime = p / p0;
    ConstantEstimate cond = generalized_psi_condition(w, psi, beta_prime, p_prime, policy);
    UpperBound bound;
    if (cond.verdict == Verdict::Member) {
        bound = upper_bound_constant(1.0, cond.bracket.hi, beta_prime, p_prime);
    } else {
        bound.raw = kInf;
        bound.absorbed = kInf;
    }
    return {bound, std::move(cond)};
}

/// tilde-phi for a particular QB_{beta,p} weight. Uses the grid argmin when the psi-condition
/// is certified there, otherwise the admissible grid value minimizing the product.
inline TildePhi tilde_phi_for_weight(double p0, double p, double beta, const PhiFunction& phi,
                                     const std::vector<double>& eps_grid, const WeightSequence& w,
                                     const TruncationPolicy& policy) {
    TildePhi out = extrapolation_tilde_phi(p0, p, beta, phi, eps_grid);
    auto [bound, cond] = extrapolation_outer_factor(w, p0, p, beta, out.argmin_eps, policy);
    if (std::isfinite(bound.absorbed)) {
        out.outer_factor = bound.absorbed;
        out.condition = std::move(cond);
        out.value = out.outer_factor * out.chosen_constant;
        return out;
    }
    double best = kInf;
    for (double e : eps_grid) {
        auto [b, c] = extrapolation_outer_factor(w, p0, p, beta, e, policy);
        if (!std::isfinite(b.absorbed)) {
            continue;
        }
        const double ce = extrapolation_constant(p0, p, beta, e, phi);
        if (b.absorbed * ce < best) {
            best = b.absorbed * ce;
            out.outer_factor = b.absorbed;
            out.chosen_eps = e;
            out.chosen_constant = ce;
            out.condition = std::move(c);
        }
    }
    if (!std::isfinite(best)) {
        throw Error(ErrorCode::NotMember, "psi-condition fails for every eps on the grid");
    }
    out.value = best;
    return out;
}

/// Lemma-chain check: with f(k) = sum_{i<=k} i^{beta p} w(i) and C = [w] max{1/(p + beta p), 1},
/// n^q sum_{k>=n} (k/n)^eps k^{-(q+1)} f(k) <= 2C f(n) / (1 - 2C eps) for n <= horizon.
struct KernelCheck {
    bool holds = true;
    Index worst_n = 1;
    double worst_ratio = 0.0;  // max over n of lhs.hi / bound
};

inline KernelCheck exponential_kernel_check(const WeightSequence& w, double beta, double p, double eps,
                                            const TruncationPolicy& policy) {
    const ConstantEstimate est = qb_constant(w, beta, p, policy);
    require(est.verdict == Verdict::Member, ErrorCode::NotMember, "weight is not a member");
    const double q = p + beta * p;
    const double C = est.bracket.hi * std::max(1.0 / q, 1.0);
    require(2.0 * C * eps < 1.0, ErrorCode::OutOfRange, "eps must satisfy 2 C eps < 1");
    const Index N = policy.horizon;
    const TailModel model = w.tail_model();
    require(model.start <= N + 1, ErrorCode::InvalidArgument, "horizon must cover the explicit prefix");

    std::vector<double> f(static_cast<std::size_t>(N) + 1, 0.0);
    {
        CompensatedSum acc;
        for (Index k = 1; k <= N; ++k) {
            acc += ipow(k, beta * p) * w(k);
            f[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    TailModel shifted = model;
    shifted.alpha += beta * p;
    shifted.start = std::min(shifted.start, N + 1);
    const PowerGrowth g = cumulative_growth(f.back(), N, shifted);
    const Interval kernel = power_log_tail(q + 1.0 - eps - g.degree, 0.0, N + 1);
    const Interval rest{g.lo * kernel.lo, g.hi * kernel.hi};

    KernelCheck out;
    CompensatedSum lo(rest.lo);
    CompensatedSum hi(rest.hi);
    for (Index n = N; n >= 1; --n) {
        const double t = ipow(n, eps - q - 1.0) * f[static_cast<std::size_t>(n)];
        lo += t;
        hi += t;
        const double scale = ipow(n, q - eps);
        const double lhs_hi = scale * hi.value() * (1.0 + detail::kBracketUlps * kEps);
        const double bound = 2.0 * C * f[static_cast<std::size_t>(n)] / (1.0 - 2.0 * C * eps);
        const double ratio = bound > 0.0 ? lhs_hi / bound : (lhs_hi > 0.0 ? kInf : 0.0);
        if (ratio > out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst_n = n;
        }
    }
    out.holds = out.worst_ratio <= 1.0;
    return out;
}

struct PanelEntry {
    std::string label;
    Interval weight_constant{};  // [w] in the relevant class
    double lhs = 0.0;            // certified upper bound of sum f^r w
    double rhs = 0.0;            // certified lower bound of sum g^r w
    double ratio = 0.0;          // lhs / rhs
    double bound = 0.0;          // phi([w]) or tilde-phi
    double margin = 0.0;         // bound - ratio
    bool holds = true;
    std::optional<TildePhi> tilde;
};

struct ExtrapolationReport {
    double p0 = 2.0;
    double p = 2.0;
    double beta = 0.0;
    std::vector<PanelEntry> hypothesis;
    std::vector<PanelEntry> conclusion;
    bool all_hold = true;
};

/// Per-weight data independent of the pair (f, g), computed once and reused.
struct ExtrapolationSetup {
    PhiFunction phi;
    double p0 = 2.0;
    double p = 2.0;
    double beta = 0.0;
    std::vector<double> eps_grid;
    TruncationPolicy policy;
    std::vector<std::pair<WeightSequence, Interval>> hypothesis_panel;
    std::vector<std::pair<WeightSequence, TildePhi>> conclusion_panel;
};

/// Default hypothesis panel: truncated embedding weights k^{p0-1-eps} chi_{k<=n}
/// for every grid eps and every n <= n_max.
inline std::vector<WeightSequence> default_hypothesis_panel(double p0, const std::vector<double>& eps_grid,
                                                            Index n_max) {
    std::vector<WeightSequence> panel;
    for (double e : eps_grid) {
        for (Index n = 1; n <= n_max; ++n) {
            std::vector<double> values(static_cast<std::size_t>(n));
            for (Index k = 1; k <= n; ++k) {
                values[static_cast<std::size_t>(k - 1)] = ipow(k, p0 - 1.0 - e);
            }
            panel.emplace_back(Explicit{std::move(values), std::nullopt},
                               "embedding:eps=" + std::to_string(e) + ",n=" + std::to_string(n));
        }
    }
    return panel;
}

inline ExtrapolationSetup prepare_extrapolation(const PhiFunction& phi, double p0, double p, double beta,
                                                const std::vector<double>& eps_grid,
                                                const std::vector<WeightSequence>& hypothesis_weights,
                                                const std::vector<WeightSequence>& conclusion_weights,
                                                const TruncationPolicy& policy) {
    detail::require_extrapolation_regime(p0, p, beta);
    validate_eps_grid(eps_grid, p0);
    ExtrapolationSetup setup{phi, p0, p, beta, eps_grid, policy, {}, {}};
    for (const auto& w : hypothesis_weights) {
        const ConstantEstimate est = qb_constant(w, beta, p0, policy);
        if (est.verdict != Verdict::Member) {
            throw Error(ErrorCode::NotMember, "hypothesis weight " + w.label() + " is not a member");
        }
        setup.hypothesis_panel.emplace_back(w, est.bracket);
    }
    for (const auto& w : conclusion_weights) {
        const ConstantEstimate est = qb_constant(w, beta, p, policy);
        if (est.verdict != Verdict::Member) {
            throw Error(ErrorCode::NotMember, "conclusion weight " + w.label() + " is not a member");
        }
        setup.conclusion_panel.emplace_back(w, tilde_phi_for_weight(p0, p, beta, phi, eps_grid, w, policy));
    }
    return setup;
}

namespace detail {

// Certified [lo, hi] for sum_k s(k)^r w(k).
inline Interval power_weighted_sum(const QuasiSequence& s, double r, const WeightSequence& w, Index horizon) {
    const bool compact = s.source.finitely_supported();
    const Index end = compact ? s.source.explicit_length() : horizon;
    CompensatedSum acc;
    for (Index k = 1; k <= end; ++k) {
        const double sk = s(k);
        if (sk > 0.0) {
            acc += std::pow(sk, r) * w(k);
        }
    }
    Interval tail = Interval::point(0.0);
    if (!compact) {
        const auto t = product_tail(s.source, w, r, end + 1);
        if (!t) {
            throw Error(ErrorCode::UncertifiableTail, "cannot certify the tail of sum s^r w");
        }
        tail = *t;
    }
    return (Interval::point(acc.value()) + tail).widened(kBracketUlps);
}

} // namespace detail

/// Checks the hypothesis on every hypothesis weight, then the conclusion with tilde-phi
/// on every conclusion weight.
inline ExtrapolationReport run_extrapolation_check(const QuasiSequence& f, const QuasiSequence& g,
                                                   const ExtrapolationSetup& setup) {
    const Index N = setup.policy.horizon;
    for (const QuasiSequence* s : {&f, &g}) {
        const Index span = s->source.finitely_supported() ? std::max<Index>(s->source.explicit_length() + 1, 2) : N;
        const MonotonicityCheck m = is_quasi_nonincreasing(*s, setup.beta, span, setup.policy.rel_tol);
        if (!m.ok) {
            throw Error(ErrorCode::NotQuasiMonotone, "sequence is not quasi non-increasing", m.first_violation);
        }
    }
    ExtrapolationReport report;
    report.p0 = setup.p0;
    report.p = setup.p;
    report.beta = setup.beta;

    for (const auto& [w, wc] : setup.hypothesis_panel) {
        PanelEntry e;
        e.label = w.label();
        e.weight_constant = wc;
        e.lhs = detail::power_weighted_sum(f, setup.p0, w, N).hi;
        e.rhs = detail::power_weighted_sum(g, setup.p0, w, N).lo;
        e.bound = setup.phi(wc.lo);
        e.ratio = e.rhs > 0.0 ? e.lhs / e.rhs : (e.lhs > 0.0 ? kInf : 0.0);
        e.holds = e.lhs <= e.bound * e.rhs;
        e.margin = e.bound - e.ratio;
        if (!e.holds) {
            throw Error(ErrorCode::HypothesisViolated, "hypothesis fails on weight " + e.label);
        }
        report.hypothesis.push_back(std::move(e));
    }
    for (const auto& [w, tilde] : setup.conclusion_panel) {
        PanelEntry e;
        e.label = w.label();
        e.tilde = tilde;
        if (tilde.condition) {
            e.weight_constant = tilde.condition->bracket;
        }
        e.lhs = detail::power_weighted_sum(f, setup.p, w, N).hi;
        e.rhs = detail::power_weighted_sum(g, setup.p, w, N).lo;
        e.bound = tilde.value;
        e.ratio = e.rhs > 0.0 ? e.lhs / e.rhs : (e.lhs > 0.0 ? kInf : 0.0);
        e.holds = e.lhs <= e.bound * e.rhs;
        e.margin = e.bound - e.ratio;
        report.all_hold = report.all_hold && e.holds;
        report.conclusion.push_back(std::move(e));
    }
    return report;
}

inline ExtrapolationReport run_extrapolation_check(const QuasiSequence& f, const QuasiSequence& g,
                                                   const PhiFunction& phi, double p0, double p, double beta,
                                                   const std::vector<WeightSequence>& hypothesis_weights,
                                                   const std::vector<WeightSequence>& conclusion_weights,
                                                   const std::vector<double>& eps_grid,
                                                   const TruncationPolicy& policy) {
    const ExtrapolationSetup setup =
        prepare_extrapolation(phi, p0, p, beta, eps_grid, hypothesis_weights, conclusion_weights, policy);
    return run_extrapolation_check(f, g, setup);
}

/// Random compactly supported member of Q_beta: k^beta d(k) with d positive and
/// non-increasing on 1..L, L uniform in [1, max_len].
inline QuasiSequence random_quasi_sequence(std::mt19937_64& rng, double beta, Index max_len, double scale = 1.0) {
    require(max_len >= 1, ErrorCode::InvalidArgument, "max_len must be positive");
    std::uniform_int_distribution<Index> length(1, max_len);
    std::uniform_real_distribution<double> start(-1.0, 1.0);
    std::uniform_real_distribution<double> decay(0.5, 1.0);
    const Index L = length(rng);
    std::vector<double> values(static_cast<std::size_t>(L));
    double d = scale * std::exp(start(rng));
    for (Index k = 1; k <= L; ++k) {
        values[static_cast<std::size_t>(k - 1)] = ipow(k, beta) * d;
        d *= decay(rng);
    }
    return QuasiSequence{beta, WeightSequence::explicit_values(std::move(values))};
}

/// Random pair (f, g) in Q_beta. Half the draws take f = lambda g h with h
/// non-increasing in (0, 1], the rest draw f and g independently.
inline std::pair<QuasiSequence, QuasiSequence> random_quasi_pair(std::mt19937_64& rng, double beta, Index max_len) {
    QuasiSequence g = random_quasi_sequence(rng, beta, max_len);
    std::bernoulli_distribution coupled(0.5);
    if (!coupled(rng)) {
        return {random_quasi_sequence(rng, beta, max_len), std::move(g)};
    }
    std::uniform_real_distribution<double> lambda(0.5, 1.5);
    std::uniform_real_distribution<double> decay(0.7, 1.0);
    const Index L = g.source.explicit_length();
    std::vector<double> values(static_cast<std::size_t>(L));
    double h = lambda(rng);
    for (Index k = 1; k <= L; ++k) {
        values[static_cast<std::size_t>(k - 1)] = g(k) * h;
        h *= decay(rng);
    }
    return {QuasiSequence{beta, WeightSequence::explicit_values(std::move(values))}, std::move(g)};
}

struct PairSamplingSummary {
    Index requested = 0;
    Index attempts = 0;
    Index accepted = 0;    // pairs passing the hypothesis panel
    Index violations = 0;  // accepted pairs failing the conclusion on some weight
    double min_margin = kInf;
    std::vector<ExtrapolationReport> failures;
};

/// Draws pairs until `cases` of them pass the hypothesis panel (or 50 * cases draws
/// are spent) and checks the conclusion on each accepted pair.
inline PairSamplingSummary sample_extrapolation_pairs(const ExtrapolationSetup& setup, std::uint64_t seed, Index cases,
                                                      Index max_len = 40) {
    require(cases >= 0, ErrorCode::InvalidArgument, "cases must be non-negative");
    std::mt19937_64 rng(seed);
    PairSamplingSummary out;
    out.requested = cases;
    const Index budget = 50 * std::max<Index>(cases, 1);
    while (out.accepted < cases && out.attempts < budget) {
        ++out.attempts;
        auto [f, g] = random_quasi_pair(rng, setup.beta, max_len);
        ExtrapolationReport report;
        try {
            report = run_extrapolation_check(f, g, setup);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::HypothesisViolated) {
                continue;
            }
            throw;
        }
        ++out.accepted;
        for (const auto& e : report.conclusion) {
            out.min_margin = std::min(out.min_margin, e.margin);
        }
        if (!report.all_hold) {
            ++out.violations;
            out.failures.push_back(std::move(report));
        }
    }
    return out;
}

} // namespace hardy
