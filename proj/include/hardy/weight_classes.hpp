#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/hardy_operators.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"

namespace hardy {

enum class Verdict { Member, NonMemberEvidence, Inconclusive };

constexpr std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Member: return "Member";
    case Verdict::NonMemberEvidence: return "NonMemberEvidence";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

struct ConstantEstimate {
    Interval bracket{};
    Index witness_n = 1;
    Verdict verdict = Verdict::Inconclusive;
    Index scanned_up_to = 1;
    std::string basis;              // how the verdict was reached
    std::optional<double> limit;    // ratio limit as n -> infinity, when known in closed form
};

struct DoublingReport {
    bool holds = true;
    double constant = 0.0;
    std::optional<Index> first_failure;
};

/// Monotone-divergence heuristic over values sampled at three growing horizons:
/// both increments positive and the second at least 0.9 times the first.
inline bool detect_divergence(double v1, double v2, double v3) noexcept {
    if (!std::isfinite(v1) || !std::isfinite(v2) || !std::isfinite(v3)) {
        return true;
    }
    const double d1 = v2 - v1;
    const double d2 = v3 - v2;
    return d1 > 0.0 && d2 > 0.0 && d2 >= 0.9 * d1;
}

namespace detail {

inline bool has_zero_tail(const TailModel& m) noexcept { return m.zero || m.scale == 0.0; }

// Running supremum of per-n brackets.
struct SupremumScan {
    double lo = -kInf;
    double hi = -kInf;
    Index witness = 1;
    std::optional<Index> infinite_at;

    void add(Index n, Interval r) {
        if (!std::isfinite(r.lo) && !infinite_at) {
            infinite_at = n;
        }
        lo = std::max(lo, r.lo);
        if (r.hi > hi) {
            hi = r.hi;
            witness = n;
        }
    }
};

// Verdict from the decay exponent s of the tail summand k^-s (1 + ln k)^gamma.
inline Verdict exponent_verdict(double s, double gamma, std::string& basis) {
    if (s > 1.0) {
        basis = "exponent test: tail exponent exceeds 1";
        return Verdict::Member;
    }
    basis = "exponent test: borderline log-power tail gives an unbounded ratio";
    (void)gamma;
    return Verdict::NonMemberEvidence;
}

inline ConstantEstimate divergent_estimate(Index scanned) {
    ConstantEstimate est;
    est.bracket = {kInf, kInf};
    est.verdict = Verdict::NonMemberEvidence;
    est.scanned_up_to = scanned;
    est.basis = "tail sum diverges";
    return est;
}

} // namespace detail

/// Bracket for [w]_{QB_{beta,p}} = sup_n (sum_{k<=n} (k/n)^{beta p} w(k) + sum_{k>=n} (n/k)^p w(k))
/// / sum_{k<=n} (k/n)^{beta p} w(k), scanned over n <= horizon with certified tails.
inline ConstantEstimate qb_constant(const WeightSequence& w, double beta, double p, const TruncationPolicy& policy) {
    require(p > 0.0, ErrorCode::InvalidArgument, "p must be positive");
    require(beta >= -1.0, ErrorCode::InvalidArgument, "beta must be at least -1");
    policy.validate();

    const TailModel model = w.tail_model();
    const bool finite = detail::has_zero_tail(model);
    const Index n_max = finite ? std::max<Index>(model.start - 1, 1) : std::max(policy.horizon, model.start - 1);
    const double q = p + beta * p;

    ConstantEstimate est;
    est.scanned_up_to = n_max;

    Interval rest = Interval::point(0.0);
    bool certified = true;
    if (!finite) {
        if (policy.tail_mode == TailMode::None) {
            (void)tail_power_sum(w, 1, p, policy.with_horizon(n_max));
        } else {
            try {
                rest = weighted_tail(w, -p, n_max + 1);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::DivergentTail) {
                    return detail::divergent_estimate(n_max);
                }
                if (e.code() != ErrorCode::UncertifiableTail) {
                    throw;
                }
                rest = {0.0, kInf};
                certified = false;
            }
        }
    }

    std::vector<double> suffix(static_cast<std::size_t>(n_max) + 2, 0.0);
    {
        CompensatedSum acc;
        for (Index k = n_max; k >= 1; --k) {
            acc += ipow(k, -p) * w(k);
            suffix[static_cast<std::size_t>(k)] = acc.value();
        }
    }

    detail::SupremumScan scan;
    CompensatedSum prefix;
    for (Index n = 1; n <= n_max; ++n) {
        prefix += ipow(n, beta * p) * w(n);
        const double P = prefix.value();
        const double s_lo = suffix[static_cast<std::size_t>(n)] + rest.lo;
        const double s_hi = suffix[static_cast<std::size_t>(n)] + rest.hi;
        if (P == 0.0) {
            if (s_hi > 0.0) {
                scan.add(n, {kInf, kInf});
            }
            continue;
        }
        const double nq = ipow(n, q);
        scan.add(n, Interval{1.0 + nq * s_lo / P, 1.0 + nq * s_hi / P}.widened(detail::kBracketUlps));
    }

    if (scan.hi == -kInf) {
        throw Error(ErrorCode::ZeroCumulativeWeight, "weight vanishes identically on the scanned range");
    }
    est.bracket = {scan.lo, scan.hi};
    est.witness_n = scan.witness;
    if (scan.infinite_at) {
        est.witness_n = *scan.infinite_at;
        est.bracket = {kInf, kInf};
        est.verdict = Verdict::NonMemberEvidence;
        est.basis = "prefix sum vanishes under a positive tail";
        return est;
    }
    if (finite) {
        est.verdict = Verdict::Member;
        est.basis = "finite support: scan is exhaustive";
        est.limit = 1.0;
        return est;
    }
    if (!certified) {
        est.verdict = Verdict::Inconclusive;
        est.basis = "tail could not be certified";
        return est;
    }
    est.verdict = detail::exponent_verdict(p - model.alpha, model.gamma, est.basis);
    if (est.verdict == Verdict::Member && model.gamma == 0.0) {
        const double e = model.alpha + beta * p;
        est.limit = e > -1.0 ? 1.0 + (e + 1.0) / (p - model.alpha - 1.0) : 1.0;
    }
    return est;
}

/// The B_p constant of the unweighted class; same formula as qb_constant at beta = 0.
inline ConstantEstimate bp_constant(const WeightSequence& w, double p, const TruncationPolicy& policy) {
    return qb_constant(w, 0.0, p, policy);
}

/// Least C over scanned n in
/// (sum_{k<=n} k^beta psi(k))^p sum_{k>=n} Psi(k)^-p v(k) <= C sum_{k<=n} k^{beta p} v(k).
inline ConstantEstimate generalized_psi_condition(const WeightSequence& v, const PsiWeight& psi, double beta, double p,
                                                  const TruncationPolicy& policy) {
    require(p > 0.0, ErrorCode::InvalidArgument, "p must be positive");
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    policy.validate();

    const TailModel model = v.tail_model();
    const bool finite = detail::has_zero_tail(model);
    const Index n_max = finite ? std::max<Index>(model.start - 1, 1)
                               : std::max({policy.horizon, model.start - 1, psi.sequence().explicit_length()});

    ConstantEstimate est;
    est.scanned_up_to = n_max;

    std::vector<double> cum(static_cast<std::size_t>(n_max) + 1, 0.0);
    {
        CompensatedSum acc;
        for (Index k = 1; k <= n_max; ++k) {
            acc += psi(k);
            cum[static_cast<std::size_t>(k)] = acc.value();
        }
    }

    Interval rest = Interval::point(0.0);
    bool certified = true;
    double degree = 0.0;
    if (!finite) {
        try {
            const PowerGrowth g = cumulative_growth(cum.back(), n_max, psi.sequence().tail_model());
            degree = g.degree;
            const Interval t = weighted_tail(v, -g.degree * p, n_max + 1);
            rest = Interval{std::pow(g.hi, -p) * t.lo, std::pow(g.lo, -p) * t.hi}.widened(detail::kBracketUlps);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DivergentTail) {
                return detail::divergent_estimate(n_max);
            }
            if (e.code() != ErrorCode::UncertifiableTail) {
                throw;
            }
            rest = {0.0, kInf};
            certified = false;
        }
    }

    std::vector<double> suffix(static_cast<std::size_t>(n_max) + 2, 0.0);
    {
        CompensatedSum acc;
        for (Index k = n_max; k >= 1; --k) {
            const double vk = v(k);
            const double ck = cum[static_cast<std::size_t>(k)];
            if (vk > 0.0) {
                if (ck == 0.0) {
                    throw Error(ErrorCode::ZeroCumulativeWeight, "Psi(k) vanishes where v(k) > 0", k);
                }
                acc += std::pow(ck, -p) * vk;
            }
            suffix[static_cast<std::size_t>(k)] = acc.value();
        }
    }

    detail::SupremumScan scan;
    CompensatedSum head;
    CompensatedSum prefix;
    for (Index n = 1; n <= n_max; ++n) {
        head += ipow(n, beta) * psi(n);
        prefix += ipow(n, beta * p) * v(n);
        const double P = prefix.value();
        const double fp = std::pow(head.value(), p);
        const double t_lo = fp * (suffix[static_cast<std::size_t>(n)] + rest.lo);
        const double t_hi = fp == 0.0 ? 0.0 : fp * (suffix[static_cast<std::size_t>(n)] + rest.hi);
        if (P == 0.0) {
            if (t_hi > 0.0) {
                scan.add(n, {kInf, kInf});
            }
            continue;
        }
        scan.add(n, Interval{t_lo / P, t_hi / P}.widened(detail::kBracketUlps));
    }

    if (scan.hi == -kInf) {
        throw Error(ErrorCode::ZeroCumulativeWeight, "weight vanishes identically on the scanned range");
    }
    est.bracket = {std::max(scan.lo, 0.0), scan.hi};
    est.witness_n = scan.witness;
    if (scan.infinite_at) {
        est.witness_n = *scan.infinite_at;
        est.bracket = {kInf, kInf};
        est.verdict = Verdict::NonMemberEvidence;
        est.basis = "prefix sum vanishes under a positive tail";
        return est;
    }
    if (finite) {
        est.verdict = Verdict::Member;
        est.basis = "finite support: scan is exhaustive";
        return est;
    }
    if (!certified) {
        est.verdict = Verdict::Inconclusive;
        est.basis = "tail or growth of Psi could not be certified";
        return est;
    }
    est.verdict = detail::exponent_verdict(degree * p - model.alpha, model.gamma, est.basis);
    return est;
}

namespace detail {

inline DoublingReport finish_doubling(const std::vector<double>& running_sup, Index n_max) {
    DoublingReport report;
    report.constant = running_sup[static_cast<std::size_t>(n_max)];
    for (Index n = 1; n <= n_max; ++n) {
        if (!std::isfinite(running_sup[static_cast<std::size_t>(n)])) {
            report.holds = false;
            report.first_failure = n;
            return report;
        }
    }
    if (n_max >= 100) {
        const double v1 = running_sup[static_cast<std::size_t>(n_max / 100)];
        const double v2 = running_sup[static_cast<std::size_t>(n_max / 10)];
        const double v3 = running_sup[static_cast<std::size_t>(n_max)];
        if (detect_divergence(v1, v2, v3)) {
            report.holds = false;
            // First index at which the running supremum passes the mid-decade value.
            for (Index n = 1; n <= n_max; ++n) {
                if (running_sup[static_cast<std::size_t>(n)] > v2) {
                    report.first_failure = n;
                    break;
                }
            }
        }
    }
    return report;
}

// sum_{k=n}^{m n} psi(k) for n = 1..n_max, avoiding cancellation in either direction.
inline std::vector<double> block_sums(const PsiWeight& psi, Index n_max, Index m) {
    const Index top = m * n_max;
    std::vector<double> prefix(static_cast<std::size_t>(top) + 1, 0.0);
    std::vector<double> suffix(static_cast<std::size_t>(top) + 2, 0.0);
    {
        CompensatedSum acc;
        for (Index k = 1; k <= top; ++k) {
            acc += psi(k);
            prefix[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    {
        CompensatedSum acc;
        for (Index k = top; k >= 1; --k) {
            acc += psi(k);
            suffix[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (Index n = 1; n <= n_max; ++n) {
        const double before = prefix[static_cast<std::size_t>(n - 1)];
        const double upto = prefix[static_cast<std::size_t>(m * n)];
        const double from = suffix[static_cast<std::size_t>(n)];
        const double after = suffix[static_cast<std::size_t>(m * n + 1)];
        out[static_cast<std::size_t>(n)] = before <= 0.5 * upto || after > 0.5 * from ? upto - before : from - after;
    }
    return out;
}

} // namespace detail

/// Smallest c with sum_{k<=n} psi(k) <= c sum_{k=n}^{2n} psi(k) for all n <= N.
inline DoublingReport check_doubling_2n(const PsiWeight& psi, Index N) {
    require(N >= 1, ErrorCode::InvalidArgument, "N must be positive");
    const std::vector<double> block = detail::block_sums(psi, N, 2);
    std::vector<double> sup(static_cast<std::size_t>(N) + 1, 0.0);
    CompensatedSum head;
    double best = 0.0;
    for (Index n = 1; n <= N; ++n) {
        head += psi(n);
        const double b = block[static_cast<std::size_t>(n)];
        const double h = head.value();
        const double r = h == 0.0 ? 0.0 : (b > 0.0 ? h / b : kInf);
        best = std::max(best, r);
        sup[static_cast<std::size_t>(n)] = best;
    }
    return detail::finish_doubling(sup, N);
}

/// Smallest C with n^beta sum_{k<=n} psi(k) <= C sum_{k<=n} k^beta psi(k) for all n <= N.
inline DoublingReport check_weighted_doubling(const PsiWeight& psi, double beta, Index N) {
    require(N >= 1, ErrorCode::InvalidArgument, "N must be positive");
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    std::vector<double> sup(static_cast<std::size_t>(N) + 1, 0.0);
    CompensatedSum plain;
    CompensatedSum weighted;
    double best = 0.0;
    for (Index n = 1; n <= N; ++n) {
        const double pn = psi(n);
        plain += pn;
        weighted += ipow(n, beta) * pn;
        const double lhs = ipow(n, beta) * plain.value();
        const double rhs = weighted.value();
        const double r = lhs == 0.0 ? 0.0 : (rhs > 0.0 ? lhs / rhs : kInf);
        best = std::max(best, r);
        sup[static_cast<std::size_t>(n)] = best;
    }
    return detail::finish_doubling(sup, N);
}

struct DoublingM {
    Index m = 2;
    double c = 0.0;
    double scanned_c = 0.0;  // sup over n <= N/m of the left/right ratio
};

/// Integer m with C < m^beta and c = m^beta (C - 1) / (m^beta - C), checked against
/// sum_{k<=n} psi(k) <= c sum_{k=n}^{mn} psi(k) for n <= N/m.
inline DoublingM find_doubling_m(const PsiWeight& psi, double beta, Index N, double C) {
    require(N >= 2, ErrorCode::InvalidArgument, "N must be at least 2");
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    DoublingM out;
    if (beta == 0.0) {
        out.m = 2;
    } else {
        require(C >= 1.0 && std::isfinite(C), ErrorCode::InvalidArgument, "C must be finite and at least 1");
        out.m = 2;
        while (!(C < ipow(out.m, beta))) {
            ++out.m;
            require(out.m <= N, ErrorCode::OutOfRange, "no admissible m within the horizon");
        }
        const double mb = ipow(out.m, beta);
        out.c = mb * (C - 1.0) / (mb - C);
    }
    const Index reach = N / out.m;
    require(reach >= 1, ErrorCode::InvalidArgument, "horizon too small for the chosen m");
    const std::vector<double> block = detail::block_sums(psi, reach, out.m);
    CompensatedSum head;
    double best = 0.0;
    for (Index n = 1; n <= reach; ++n) {
        head += psi(n);
        const double b = block[static_cast<std::size_t>(n)];
        const double h = head.value();
        best = std::max(best, h == 0.0 ? 0.0 : (b > 0.0 ? h / b : kInf));
    }
    out.scanned_c = best;
    if (beta == 0.0) {
        out.c = best;
        return out;
    }
    if (!leq_within_ulps(best, out.c, 16.0)) {
        throw Error(ErrorCode::VerificationFailure, "scanned doubling ratio exceeds the predicted constant");
    }
    return out;
}

/// As above with C taken from the weighted doubling scan.
inline DoublingM find_doubling_m(const PsiWeight& psi, double beta, Index N) {
    const DoublingReport r = check_weighted_doubling(psi, beta, N);
    require(r.holds, ErrorCode::PreconditionFailed, "weighted doubling condition fails");
    return find_doubling_m(psi, beta, N, r.constant);
}

/// k -> k^{beta p} w(k).
inline WeightSequence equivalence_transform(const WeightSequence& w, double beta, double p) {
    const double shift = beta * p;
    return std::visit(
        [&](const auto& f) -> WeightSequence {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Power>) {
                return WeightSequence::power(f.alpha + shift);
            } else if constexpr (std::is_same_v<T, PowerLog>) {
                return WeightSequence::power_log(f.alpha + shift, f.gamma);
            } else {
                std::vector<double> values(f.values.size());
                for (std::size_t i = 0; i < values.size(); ++i) {
                    values[i] = ipow(static_cast<Index>(i + 1), shift) * f.values[i];
                    if (!std::isfinite(values[i])) {
                        throw Error(ErrorCode::UnsupportedFamily, "transformed value overflows",
                                    static_cast<Index>(i + 1));
                    }
                }
                std::optional<PowerTail> tail;
                if (f.tail) {
                    tail = PowerTail{f.tail->alpha + shift, f.tail->scale};
                }
                return WeightSequence::explicit_values(std::move(values), tail);
            }
        },
        w.family());
}

} // namespace hardy
