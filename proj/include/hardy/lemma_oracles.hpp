#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/numeric.hpp"
#include "hardy/sequence.hpp"
#include "hardy/tail_bounds.hpp"

namespace hardy {

/// lower <= middle <= upper, checked with a 4-ulp relative slack. When the middle
/// quantity is an infinite sum it is carried as a certified bracket.
struct SandwichResult {
    double lower = 0.0;
    double middle = 0.0;
    double upper = 0.0;
    bool holds = false;
    std::optional<Interval> middle_bracket;
    bool degenerate = false;
};

namespace detail {

inline constexpr double kSandwichUlps = 4.0;

inline SandwichResult make_sandwich(double lower, double middle, double upper) {
    SandwichResult r{lower, middle, upper, false, std::nullopt, false};
    r.holds = leq_within_ulps(lower, middle, kSandwichUlps) && leq_within_ulps(middle, upper, kSandwichUlps);
    return r;
}

inline SandwichResult make_sandwich(double lower, Interval middle, double upper) {
    SandwichResult r{lower, middle.mid(), upper, false, middle, false};
    r.holds = leq_within_ulps(lower, middle.hi, kSandwichUlps) && leq_within_ulps(middle.lo, upper, kSandwichUlps);
    return r;
}

} // namespace detail

/// min{1,q} S <= (sum_{k<=n} f)^q <= max{1,q} S with S = sum_{k<=n} f(k) (sum_{j<=k} f)^{q-1}.
inline SandwichResult power_rule_one(std::span<const double> f, double q, Index n) {
    require(q >= 0.0, ErrorCode::InvalidArgument, "q must be non-negative");
    require(n >= 1 && n <= static_cast<Index>(f.size()), ErrorCode::InvalidArgument, "n outside the sequence");
    CompensatedSum partial;
    CompensatedSum s;
    for (Index k = 1; k <= n; ++k) {
        const double fk = f[static_cast<std::size_t>(k - 1)];
        require(fk >= 0.0, ErrorCode::InvalidArgument, "f must be non-negative");
        partial += fk;
        const double F = partial.value();
        if (q < 1.0 && F == 0.0) {
            throw Error(ErrorCode::ZeroPartialSum, "prefix sum vanishes with q < 1", k);
        }
        s += fk * std::pow(F, q - 1.0);
    }
    const double S = s.value();
    const double middle = std::pow(partial.value(), q);
    return detail::make_sandwich(std::min(1.0, q) * S, middle, std::max(1.0, q) * S);
}

/// min{1, 1/q} F(n)^-q <= sum_{k>=n} f(k+1) F(k)^-q F(k+1)^-1 <= max{1, 1/q} F(n)^-q,
/// F the partial sums of a closed-form f with divergent sum. The middle sum is certified.
inline SandwichResult power_rule_two(const WeightSequence& f, double q, Index n, const TruncationPolicy& policy) {
    require(q > 0.0, ErrorCode::InvalidArgument, "q must be positive");
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    policy.validate();
    const TailModel model = f.tail_model();
    if (model.zero || model.scale == 0.0 || model.alpha < -1.0) {
        throw Error(ErrorCode::ConvergentSum, "sum of f converges");
    }
    const Index N = std::max({policy.horizon, n, model.start});

    CompensatedSum partial;
    double F_n = 0.0;
    for (Index k = 1; k <= n; ++k) {
        partial += f(k);
    }
    F_n = partial.value();
    require(F_n > 0.0, ErrorCode::ZeroPartialSum, "F(n) vanishes");

    CompensatedSum middle;
    double F_k = F_n;
    double F_N = F_n;
    for (Index k = n; k <= N; ++k) {
        F_N = F_k;
        const double next = f(k + 1);
        partial += next;
        const double F_next = partial.value();
        middle += next * std::pow(F_k, -q) / F_next;
        F_k = F_next;
    }

    // Beyond N: F(k) in [lo, hi] k^g and f(k+1) within a factor (1 + 1/(N+1))^|a| of k^a.
    const PowerGrowth g = cumulative_growth(F_N, N, model);
    const double a = model.alpha;
    const double stretch = std::pow(1.0 + 1.0 / static_cast<double>(N + 1), std::abs(a));
    const double step_lo = a >= 0.0 ? 1.0 : 1.0 / stretch;
    const double step_hi = a >= 0.0 ? stretch : 1.0;
    const double grow = std::pow(1.0 + 1.0 / static_cast<double>(N + 1), g.degree);
    const Interval kernel = power_log_tail(g.degree * (q + 1.0) - a, 0.0, N + 1);
    const double c_lo = model.scale * step_lo * std::pow(g.hi, -q) / (g.hi * grow);
    const double c_hi = model.scale * step_hi * std::pow(g.lo, -q - 1.0);
    const Interval total =
        (Interval::point(middle.value()) + Interval{c_lo * kernel.lo, c_hi * kernel.hi}).widened(detail::kBracketUlps);

    const double base = std::pow(F_n, -q);
    return detail::make_sandwich(std::min(1.0, 1.0 / q) * base, total, std::max(1.0, 1.0 / q) * base);
}

/// ln(k/n)^{m+1} / (2(m+1)) <= sum_{i=n+1}^k ln(i/n)^m / i <= 2^{m+2} ln(k/n)^{m+1} / (m+1).
inline SandwichResult log_sum_sandwich(Index n, Index k, int m) {
    require(m >= 0, ErrorCode::InvalidArgument, "m must be non-negative");
    if (!(n >= 1 && n < k)) {
        throw Error(ErrorCode::BadRange, "need 1 <= n < k");
    }
    const double dn = static_cast<double>(n);
    CompensatedSum middle;
    for (Index i = n + 1; i <= k; ++i) {
        const double di = static_cast<double>(i);
        middle += (m == 0 ? 1.0 : std::pow(std::log(di / dn), m)) / di;
    }
    const double L = std::pow(std::log(static_cast<double>(k) / dn), m + 1);
    return detail::make_sandwich(L / (2.0 * (m + 1)), middle.value(), std::ldexp(1.0, m + 2) * L / (m + 1));
}

/// r y^{r-1}(x-y) < x^r - y^r < r x^{r-1}(x-y) for r < 0 or r > 1, reversed for 0 < r < 1.
inline SandwichResult mean_value_sandwich(double x, double y, double r) {
    require(x > 0.0 && y > 0.0, ErrorCode::InvalidArgument, "x and y must be positive");
    require(x != y, ErrorCode::InvalidArgument, "x and y must differ");
    const double middle = std::pow(x, r) - std::pow(y, r);
    if (r == 0.0 || r == 1.0) {
        SandwichResult out{middle, middle, middle, true, std::nullopt, true};
        return out;
    }
    const double at_y = r * std::pow(y, r - 1.0) * (x - y);
    const double at_x = r * std::pow(x, r - 1.0) * (x - y);
    if (r > 0.0 && r < 1.0) {
        return detail::make_sandwich(at_x, middle, at_y);
    }
    return detail::make_sandwich(at_y, middle, at_x);
}

struct DominanceResult {
    bool holds = true;
    std::optional<Index> first_failure;
};

/// Prefix sums of f dominated by those of g imply the same after weighting by a
/// non-negative non-increasing varphi.
inline DominanceResult partial_sums_dominance(std::span<const double> f, std::span<const double> g,
                                              std::span<const double> varphi, Index N) {
    require(N >= 1, ErrorCode::InvalidArgument, "N must be positive");
    const auto n = static_cast<std::size_t>(N);
    require(f.size() >= n && g.size() >= n && varphi.size() >= n, ErrorCode::InvalidArgument,
            "sequences shorter than N");
    {
        CompensatedSum sf;
        CompensatedSum sg;
        for (std::size_t k = 0; k < n; ++k) {
            if (f[k] < 0.0 || g[k] < 0.0 || varphi[k] < 0.0) {
                throw Error(ErrorCode::PreconditionFailed, "sequences must be non-negative",
                            static_cast<Index>(k + 1));
            }
            if (k > 0 && varphi[k] > varphi[k - 1]) {
                throw Error(ErrorCode::PreconditionFailed, "varphi is not non-increasing", static_cast<Index>(k + 1));
            }
            sf += f[k];
            sg += g[k];
            if (!leq_within_ulps(sf.value(), sg.value(), detail::kSandwichUlps)) {
                throw Error(ErrorCode::PreconditionFailed, "prefix sums of f exceed those of g",
                            static_cast<Index>(k + 1));
            }
        }
    }
    DominanceResult out;
    CompensatedSum wf;
    CompensatedSum wg;
    for (std::size_t k = 0; k < n; ++k) {
        wf += f[k] * varphi[k];
        wg += g[k] * varphi[k];
        // Round-off in the precondition propagates through varphi(1) at most.
        const double slack = 8.0 * kEps * (wg.value() + varphi[0] * std::abs(wf.value()));
        if (wf.value() > wg.value() + slack) {
            out.holds = false;
            out.first_failure = static_cast<Index>(k + 1);
            break;
        }
    }
    return out;
}

struct FubiniResult {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// sum_{k<=n} f(k) sum_{j=k}^n g(j) and sum_{j<=n} g(j) sum_{k<=j} f(k), each in its own order.
inline FubiniResult fubini_identity(std::span<const double> f, std::span<const double> g, Index n) {
    require(n >= 1 && n <= static_cast<Index>(std::min(f.size(), g.size())), ErrorCode::InvalidArgument,
            "n outside the sequences");
    const auto len = static_cast<std::size_t>(n);
    std::vector<double> tail(len + 1, 0.0);
    {
        CompensatedSum acc;
        for (std::size_t j = len; j-- > 0;) {
            acc += g[j];
            tail[j] = acc.value();
        }
    }
    CompensatedSum lhs;
    for (std::size_t k = 0; k < len; ++k) {
        lhs += f[k] * tail[k];
    }
    CompensatedSum head;
    CompensatedSum rhs;
    for (std::size_t j = 0; j < len; ++j) {
        head += f[j];
        rhs += g[j] * head.value();
    }
    return {lhs.value(), rhs.value()};
}

/// Residual of sum_{tau=k+1}^inf ((tau+1)^r - tau^r) = -(k+1)^r, r < 0, summed to
/// k + 1000 explicitly with the remaining telescoped tail -(M+1)^r added.
inline double infinite_difference_residual(double r, Index k) {
    if (!(r < 0.0)) {
        throw Error(ErrorCode::OutOfRange, "infinite identity needs r < 0");
    }
    require(k >= 1, ErrorCode::InvalidArgument, "k must be positive");
    const Index M = k + 1000;
    CompensatedSum acc;
    for (Index t = k + 1; t <= M; ++t) {
        acc += ipow(t + 1, r) - ipow(t, r);
    }
    acc += -ipow(M + 1, r);
    return acc.value() + ipow(k + 1, r);
}

struct DifferenceResiduals {
    double finite = 0.0;                 // sum_{tau<=k} delta tau^r - ((k+1)^r - 1)
    std::optional<double> infinite;      // present for r < 0
};

inline DifferenceResiduals difference_operator_identities(double r, Index k) {
    require(k >= 1, ErrorCode::InvalidArgument, "k must be positive");
    CompensatedSum acc;
    for (Index t = 1; t <= k; ++t) {
        acc += ipow(t + 1, r) - ipow(t, r);
    }
    DifferenceResiduals out;
    out.finite = acc.value() - (ipow(k + 1, r) - 1.0);
    if (r < 0.0) {
        out.infinite = infinite_difference_residual(r, k);
    }
    return out;
}

/// sum_{tau>k} tau^{-(eps+1)} <= 1 / (eps k^eps); the middle is certified.
inline SandwichResult reciprocal_power_tail(double eps, Index k) {
    require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
    require(k >= 1, ErrorCode::InvalidArgument, "k must be positive");
    const Interval middle = power_log_tail(eps + 1.0, 0.0, k + 1);
    return detail::make_sandwich(0.0, middle, 1.0 / (eps * ipow(k, eps)));
}

/// (k+1)^eps <= eps sum_{tau<=k} tau^{eps-1} + 1 for 0 < eps < 1.
inline SandwichResult power_increment_bound(double eps, Index k) {
    require(eps > 0.0 && eps < 1.0, ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
    require(k >= 1, ErrorCode::InvalidArgument, "k must be positive");
    CompensatedSum acc;
    for (Index t = 1; t <= k; ++t) {
        acc += ipow(t, eps - 1.0);
    }
    return detail::make_sandwich(0.0, ipow(k + 1, eps), eps * acc.value() + 1.0);
}

/// n^{p0(1+beta)-eps} <= max{1, p0(1+beta)-eps} sum_{k<=n} k^{p0(1+beta)-eps-1}.
inline SandwichResult embedding_power_bound(double beta, double p0, double eps, Index n) {
    const double q = p0 * (1.0 + beta) - eps;
    require(beta >= 0.0 && p0 > 0.0 && eps > 0.0 && q > 0.0, ErrorCode::InvalidArgument,
            "need beta >= 0, p0 > 0 and 0 < eps < p0 (beta + 1)");
    require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
    CompensatedSum acc;
    for (Index k = 1; k <= n; ++k) {
        acc += ipow(k, q - 1.0);
    }
    return detail::make_sandwich(0.0, ipow(n, q), std::max(1.0, q) * acc.value());
}

struct OracleFailure {
    std::string check;
    std::string detail;
};

struct OracleCheckSummary {
    std::string check;
    std::int64_t cases = 0;
    std::int64_t failures = 0;
};

struct OracleSuiteReport {
    std::uint64_t seed = 0;
    std::vector<OracleCheckSummary> checks;
    std::vector<OracleFailure> failures;

    [[nodiscard]] bool passed() const noexcept { return failures.empty(); }
};

namespace detail {

class SuiteRecorder {
public:
    explicit SuiteRecorder(OracleSuiteReport& report) : report_(report) {}

    void begin(const std::string& check) {
        report_.checks.push_back({check, 0, 0});
    }

    void record(bool ok, const std::string& what) {
        auto& current = report_.checks.back();
        ++current.cases;
        if (!ok) {
            ++current.failures;
            if (report_.failures.size() < kMaxListed) {
                report_.failures.push_back({current.check, what});
            }
        }
    }

private:
    static constexpr std::size_t kMaxListed = 200;
    OracleSuiteReport& report_;
};

inline std::string describe_sandwich(const SandwichResult& r) {
    return "lower=" + std::to_string(r.lower) + " middle=" + std::to_string(r.middle) +
           " upper=" + std::to_string(r.upper);
}

} // namespace detail

/// Randomized and exhaustive checks of every auxiliary lemma.
inline OracleSuiteReport run_oracle_suite(std::uint64_t seed, std::int64_t cases, bool exhaustive_log_sum = true) {
    require(cases >= 1, ErrorCode::InvalidArgument, "cases must be positive");
    OracleSuiteReport report;
    report.seed = seed;
    detail::SuiteRecorder rec(report);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::uniform_int_distribution<int> length(1, 64);

    const auto random_sequence = [&](std::size_t len) {
        std::vector<double> v(len);
        for (auto& x : v) {
            x = value(rng);
        }
        return v;
    };

    rec.begin("power_rule_one");
    const double qs[] = {0.0, 0.3, 1.0, 2.0, 5.0};
    for (std::int64_t c = 0; c < cases; ++c) {
        auto f = random_sequence(static_cast<std::size_t>(length(rng)));
        f[0] = std::max(f[0], 1e-3);
        const auto n = static_cast<Index>(f.size());
        for (double q : qs) {
            const SandwichResult r = power_rule_one(f, q, n);
            rec.record(r.holds, "q=" + std::to_string(q) + " n=" + std::to_string(n) + " " +
                                    detail::describe_sandwich(r));
        }
    }

    rec.begin("power_rule_two");
    {
        std::uniform_real_distribution<double> alpha(-0.9, 3.0);
        std::uniform_real_distribution<double> qdist(0.1, 5.0);
        std::uniform_int_distribution<Index> ndist(1, 500);
        TruncationPolicy policy;
        policy.horizon = 2000;
        for (std::int64_t c = 0; c < cases; ++c) {
            const double a = alpha(rng);
            const double q = qdist(rng);
            const Index n = ndist(rng);
            const SandwichResult r = power_rule_two(WeightSequence::power(a), q, n, policy);
            rec.record(r.holds, "alpha=" + std::to_string(a) + " q=" + std::to_string(q) + " n=" +
                                    std::to_string(n) + " " + detail::describe_sandwich(r));
        }
    }

    rec.begin("fubini_identity");
    for (std::int64_t c = 0; c < cases; ++c) {
        const auto len = static_cast<std::size_t>(length(rng));
        const auto f = random_sequence(len);
        const auto g = random_sequence(len);
        const FubiniResult r = fubini_identity(f, g, static_cast<Index>(len));
        const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        rec.record(std::abs(r.lhs - r.rhs) <= 16.0 * kEps * scale,
                   "lhs=" + std::to_string(r.lhs) + " rhs=" + std::to_string(r.rhs));
    }

    rec.begin("partial_sums_dominance");
    for (std::int64_t c = 0; c < cases; ++c) {
        const auto len = static_cast<std::size_t>(length(rng));
        const auto f = random_sequence(len);
        // g: the decreasing rearrangement of f plus a non-negative perturbation,
        // which keeps prefix dominance.
        std::vector<double> g = f;
        std::sort(g.begin(), g.end(), std::greater<>());
        const std::vector<double> bump = random_sequence(len);
        for (std::size_t k = 0; k < len; ++k) {
            g[k] += 0.1 * bump[k];
        }
        auto varphi = random_sequence(len);
        std::sort(varphi.begin(), varphi.end(), std::greater<>());
        const DominanceResult r = partial_sums_dominance(f, g, varphi, static_cast<Index>(len));
        rec.record(r.holds, "first_failure=" + std::to_string(r.first_failure.value_or(0)));
    }

    rec.begin("mean_value_sandwich");
    {
        std::uniform_real_distribution<double> pos(0.01, 10.0);
        std::uniform_real_distribution<double> rdist(-3.0, 3.0);
        for (std::int64_t c = 0; c < cases; ++c) {
            double x = pos(rng);
            double y = pos(rng);
            if (x == y) {
                y += 1.0;
            }
            const double r = rdist(rng);
            const SandwichResult s = mean_value_sandwich(x, y, r);
            rec.record(s.holds, "x=" + std::to_string(x) + " y=" + std::to_string(y) + " r=" + std::to_string(r) +
                                    " " + detail::describe_sandwich(s));
        }
    }

    rec.begin("difference_identities");
    {
        std::uniform_real_distribution<double> rdist(-3.0, 3.0);
        std::uniform_int_distribution<Index> kdist(1, 200);
        for (std::int64_t c = 0; c < cases; ++c) {
            const double r = rdist(rng);
            const Index k = kdist(rng);
            const DifferenceResiduals d = difference_operator_identities(r, k);
            const double scale = std::max(1.0, ipow(k + 1, r));
            bool ok = std::abs(d.finite) <= 64.0 * kEps * scale * static_cast<double>(k);
            if (d.infinite) {
                ok = ok && std::abs(*d.infinite) <= 64.0 * kEps * 1000.0;
            }
            rec.record(ok, "r=" + std::to_string(r) + " k=" + std::to_string(k));
        }
    }

    rec.begin("log_sum_sandwich");
    if (exhaustive_log_sum) {
        for (int m = 0; m <= 4; ++m) {
            for (Index n = 1; n < 500; ++n) {
                // Incremental middle sums over k; the standalone function covers the same terms.
                const double dn = static_cast<double>(n);
                CompensatedSum middle;
                for (Index k = n + 1; k <= 500; ++k) {
                    const double dk = static_cast<double>(k);
                    middle += (m == 0 ? 1.0 : std::pow(std::log(dk / dn), m)) / dk;
                    const double L = std::pow(std::log(dk / dn), m + 1);
                    const SandwichResult r =
                        detail::make_sandwich(L / (2.0 * (m + 1)), middle.value(), std::ldexp(1.0, m + 2) * L / (m + 1));
                    if (!r.holds) {
                        rec.record(false, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " m=" +
                                              std::to_string(m) + " " + detail::describe_sandwich(r));
                    } else {
                        rec.record(true, {});
                    }
                }
            }
        }
    } else {
        std::uniform_int_distribution<Index> kdist(2, 500);
        std::uniform_int_distribution<int> mdist(0, 4);
        for (std::int64_t c = 0; c < cases; ++c) {
            const Index k = kdist(rng);
            const Index n = std::uniform_int_distribution<Index>(1, k - 1)(rng);
            const int m = mdist(rng);
            const SandwichResult r = log_sum_sandwich(n, k, m);
            rec.record(r.holds, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " m=" + std::to_string(m));
        }
    }

    rec.begin("reciprocal_power_tail");
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
        for (Index k = 1; k <= 10000; ++k) {
            const SandwichResult r = reciprocal_power_tail(eps, k);
            rec.record(r.holds, "eps=" + std::to_string(eps) + " k=" + std::to_string(k));
        }
    }

    rec.begin("power_increment_bound");
    for (double eps : {0.1, 0.5, 0.9}) {
        CompensatedSum acc;
        for (Index k = 1; k <= 10000; ++k) {
            acc += ipow(k, eps - 1.0);
            const SandwichResult r = detail::make_sandwich(0.0, ipow(k + 1, eps), eps * acc.value() + 1.0);
            rec.record(r.holds, "eps=" + std::to_string(eps) + " k=" + std::to_string(k));
        }
    }

    rec.begin("embedding_power_bound");
    for (double beta : {0.0, 0.5, 1.0}) {
        for (double p0 : {2.0, 3.0}) {
            for (double eps : {0.1, 0.5, 0.9}) {
                const double q = p0 * (1.0 + beta) - eps;
                CompensatedSum acc;
                for (Index n = 1; n <= 10000; ++n) {
                    acc += ipow(n, q - 1.0);
                    const SandwichResult r = detail::make_sandwich(0.0, ipow(n, q), std::max(1.0, q) * acc.value());
                    rec.record(r.holds, "beta=" + std::to_string(beta) + " p0=" + std::to_string(p0) +
                                            " eps=" + std::to_string(eps) + " n=" + std::to_string(n));
                }
            }
        }
    }
    return report;
}

} // namespace hardy
