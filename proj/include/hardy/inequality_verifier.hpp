#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/hardy_operators.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"
#include "hardy/weight_classes.hpp"

namespace hardy {

struct RatioReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::vector<double> trace;  // lhs/rhs of the partial sums up to each n, when requested
    Index horizon = 1;
    bool unbounded = false;     // rhs vanished while lhs did not
    std::optional<Interval> lhs_tail;
    std::optional<Interval> rhs_tail;
};

namespace detail {

// Closed-form tail of y^p v past the horizon when both are log-power families.
inline std::optional<Interval> product_tail(const WeightSequence& y, const WeightSequence& v, double p, Index from) {
    const TailModel ym = y.tail_model();
    const TailModel vm = v.tail_model();
    if (has_zero_tail(ym) || has_zero_tail(vm)) {
        if (ym.start <= from && vm.start <= from) {
            return Interval::point(0.0);
        }
        return std::nullopt;
    }
    if (ym.start > from || vm.start > from) {
        return std::nullopt;
    }
    TailModel prod{false, p * ym.alpha + vm.alpha, p * ym.gamma + vm.gamma, std::pow(ym.scale, p) * vm.scale, from};
    try {
        return model_tail(prod, 0.0, from);
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace detail

/// Truncated sides of sum_n (A_psi y)^p(n) v(n) <= C sum_n y^p(n) v(n).
inline RatioReport verify_hardy_inequality(const PsiWeight& psi, const QuasiSequence& y, const WeightSequence& v,
                                           double p, const TruncationPolicy& policy, bool with_trace = false) {
    require(p > 0.0, ErrorCode::InvalidArgument, "p must be positive");
    policy.validate();
    const Index N = policy.horizon;
    if (N >= 2) {
        const MonotonicityCheck mono = is_quasi_nonincreasing(y, y.beta, N, policy.rel_tol);
        if (!mono.ok) {
            throw Error(ErrorCode::NotQuasiMonotone, "y is not quasi non-increasing", mono.first_violation);
        }
    }

    RatioReport report;
    report.horizon = N;
    CompensatedSum lhs;
    CompensatedSum rhs;
    CompensatedSum weighted;
    CompensatedSum cum;
    if (with_trace) {
        report.trace.reserve(static_cast<std::size_t>(N));
    }
    for (Index n = 1; n <= N; ++n) {
        const double yn = y(n);
        const double pn = psi(n);
        const double vn = v(n);
        weighted += yn * pn;
        cum += pn;
        if (vn > 0.0) {
            const double total = cum.value();
            if (total == 0.0) {
                throw Error(ErrorCode::ZeroCumulativeWeight, "Psi(n) vanishes where v(n) > 0", n);
            }
            lhs += std::pow(weighted.value() / total, p) * vn;
            rhs += std::pow(yn, p) * vn;
        }
        if (with_trace) {
            const double r = rhs.value();
            report.trace.push_back(r > 0.0 ? lhs.value() / r : (lhs.value() > 0.0 ? kInf : 0.0));
        }
    }
    report.lhs = lhs.value();
    report.rhs = rhs.value();
    if (report.rhs == 0.0) {
        if (report.lhs == 0.0) {
            throw Error(ErrorCode::ZeroDenominator, "both sides vanish on the horizon");
        }
        report.unbounded = true;
        report.ratio = kInf;
    } else {
        report.ratio = report.lhs / report.rhs;
    }

    report.rhs_tail = detail::product_tail(y.source, v, p, N + 1);
    // With y supported inside the horizon, (A_psi y)(m) = total / Psi(m) for m > N.
    if (y.source.finitely_supported() && y.source.explicit_length() <= N) {
        try {
            const PowerGrowth g = cumulative_growth(cum.value(), std::max(N, psi.sequence().explicit_length()),
                                                    psi.sequence().tail_model());
            if (g.from == N + 1) {
                const Interval t = weighted_tail(v, -g.degree * p, N + 1);
                const double fp = std::pow(weighted.value(), p);
                report.lhs_tail = Interval{fp * std::pow(g.hi, -p) * t.lo, fp * std::pow(g.lo, -p) * t.hi};
            }
        } catch (const Error&) {
            report.lhs_tail = std::nullopt;
        }
    }
    return report;
}

/// y(k) = k^beta for k <= n, zero beyond.
inline QuasiSequence extremal_truncated_power(double beta, Index n) {
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k) {
        values[static_cast<std::size_t>(k - 1)] = ipow(k, beta);
    }
    return QuasiSequence{beta, WeightSequence::explicit_values(std::move(values))};
}

namespace detail {

struct ExtremizerScan {
    double sup = 0.0;
    Index witness = 1;
    bool unbounded = false;
};

// sup_{n <= N} of the truncated extremizer ratio in O(N):
// LHS(n) = sum_{m<n} (F(m)/Psi(m))^p v(m) + F(n)^p sum_{m=n}^{N} Psi(m)^-p v(m), F(m) = sum_{j<=m} j^beta psi(j),
// RHS(n) = sum_{k<=n} k^{beta p} v(k).
inline ExtremizerScan extremizer_scan(const PsiWeight& psi, const WeightSequence& v, double beta, double p, Index N,
                                      std::vector<double>* trace = nullptr) {
    std::vector<double> F(static_cast<std::size_t>(N) + 1, 0.0);
    std::vector<double> cum(static_cast<std::size_t>(N) + 1, 0.0);
    {
        CompensatedSum f;
        CompensatedSum c;
        for (Index k = 1; k <= N; ++k) {
            const double pk = psi(k);
            f += ipow(k, beta) * pk;
            c += pk;
            F[static_cast<std::size_t>(k)] = f.value();
            cum[static_cast<std::size_t>(k)] = c.value();
        }
    }
    std::vector<double> vs(static_cast<std::size_t>(N) + 1, 0.0);
    std::vector<double> suffix(static_cast<std::size_t>(N) + 2, 0.0);
    {
        CompensatedSum acc;
        for (Index k = N; k >= 1; --k) {
            const double vk = v(k);
            vs[static_cast<std::size_t>(k)] = vk;
            if (vk > 0.0) {
                const double ck = cum[static_cast<std::size_t>(k)];
                if (ck == 0.0) {
                    throw Error(ErrorCode::ZeroCumulativeWeight, "Psi(k) vanishes where v(k) > 0", k);
                }
                acc += std::pow(ck, -p) * vk;
            }
            suffix[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    ExtremizerScan out;
    CompensatedSum head;
    CompensatedSum rhs;
    for (Index n = 1; n <= N; ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double vn = vs[i];
        rhs += ipow(n, beta * p) * vn;
        const double lhs = head.value() + std::pow(F[i], p) * suffix[i];
        if (vn > 0.0) {
            head += std::pow(F[i] / cum[i], p) * vn;
        }
        const double r = rhs.value();
        double ratio = 0.0;
        if (r > 0.0) {
            ratio = lhs / r;
        } else if (lhs > 0.0) {
            out.unbounded = true;
            ratio = kInf;
        }
        if (ratio > out.sup) {
            out.sup = ratio;
            out.witness = n;
        }
        if (trace != nullptr) {
            trace->push_back(ratio);
        }
    }
    return out;
}

} // namespace detail

/// Certified lower bound for the best constant in the Hardy inequality from the
/// truncated-power extremizers, scanned over n <= horizon.
inline ConstantEstimate lower_bound_constant(const PsiWeight& psi, const WeightSequence& v, double beta, double p,
                                             const TruncationPolicy& policy, std::vector<double>* trace = nullptr) {
    require(p > 0.0, ErrorCode::InvalidArgument, "p must be positive");
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    policy.validate();
    const Index N = policy.horizon;
    const detail::ExtremizerScan full = detail::extremizer_scan(psi, v, beta, p, N, trace);

    ConstantEstimate est;
    est.scanned_up_to = N;
    est.witness_n = full.witness;
    // Truncation drops non-negative LHS terms only.
    est.bracket = {full.sup * (1.0 - detail::kBracketUlps * kEps), kInf};
    if (full.unbounded) {
        est.bracket = {kInf, kInf};
        est.verdict = Verdict::NonMemberEvidence;
        est.basis = "extremizer has vanishing right-hand side";
        return est;
    }
    if (N >= 100) {
        const double v1 = detail::extremizer_scan(psi, v, beta, p, N / 100).sup;
        const double v2 = detail::extremizer_scan(psi, v, beta, p, N / 10).sup;
        if (detect_divergence(v1, v2, full.sup)) {
            est.verdict = Verdict::NonMemberEvidence;
            est.basis = "extremizer ratio grows across three decades";
            return est;
        }
        est.basis = "extremizer ratio levels off";
    } else {
        est.basis = "horizon too short for a trend test";
    }
    est.verdict = Verdict::Inconclusive;
    return est;
}

enum class BoundRegime { HolderAbsorbed, Direct };

constexpr std::string_view to_string(BoundRegime r) noexcept {
    return r == BoundRegime::HolderAbsorbed ? "holder_absorbed" : "direct";
}

struct UpperBound {
    double raw = 0.0;       // C1 for p > 1, C2 for p <= 1
    double absorbed = 0.0;  // usable constant: C1^p for p > 1, C2 otherwise
    double doubling_factor = 0.0;  // 4^beta c + 2^beta
    BoundRegime regime = BoundRegime::Direct;
};

/// Sufficiency constants from the doubling factor K = 4^beta c + 2^beta.
inline UpperBound upper_bound_from_factor(double K, double condition_C, double p) {
    if (!(p > 0.0)) {
        throw Error(ErrorCode::InvalidRegime, "p must be positive");
    }
    require(K > 0.0 && condition_C >= 0.0, ErrorCode::InvalidArgument, "constants must be non-negative");
    UpperBound out;
    out.doubling_factor = K;
    if (p > 1.0) {
        out.raw = condition_C * p * std::pow(K, p - 1.0);
        out.absorbed = std::pow(out.raw, p);
        out.regime = BoundRegime::HolderAbsorbed;
    } else {
        out.raw = condition_C * std::pow(K, 1.0 - p);
        out.absorbed = out.raw;
        out.regime = BoundRegime::Direct;
    }
    return out;
}

inline UpperBound upper_bound_constant(double doubling_c, double condition_C, double beta, double p) {
    const double K = std::pow(4.0, beta) * doubling_c + std::pow(2.0, beta);
    return upper_bound_from_factor(K, condition_C, p);
}

} // namespace hardy
