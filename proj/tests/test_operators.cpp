#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hardy/hardy.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

constexpr double kZeta3 = 1.2020569031595942;
constexpr double kH10Over10 = 0.29289682539682537;   // (1 + 1/2 + ... + 1/10) / 10
constexpr double kSqrtPsiSum = 6.146264369941973;     // 1 + sqrt2 + sqrt3 + 2

QuasiSequence power_quasi(double a) { return QuasiSequence{std::max(a, 0.0), WeightSequence::power(a)}; }

} // namespace

TEST(HardyAverage, Examples) {
    EXPECT_DOUBLE_EQ(hardy_average(power_quasi(0.0), 5), 1.0);
    EXPECT_DOUBLE_EQ(hardy_average(power_quasi(1.0), 3), 2.0);
    EXPECT_NEAR(hardy_average(power_quasi(-1.0), 10), kH10Over10, 1e-16);
}

TEST(HardyAverage, HarmonicOracle) {
    const long double h = oracle::sum(oracle::power(-1.0L), 1, 10) / 10.0L;
    EXPECT_NEAR(static_cast<double>(h), kH10Over10, 1e-16);
}

TEST(GeneralizedAverage, Examples) {
    const PsiWeight linear = PsiWeight::power(1.0);
    EXPECT_DOUBLE_EQ(generalized_hardy_average(linear, power_quasi(0.0), 4), 1.0);
    EXPECT_DOUBLE_EQ(generalized_hardy_average(linear, power_quasi(1.0), 3), 7.0 / 3.0);
}

TEST(GeneralizedAverage, ConstantPsiReducesToPlainAverage) {
    const PsiWeight one = PsiWeight::constant_one(100);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-2.0, 2.0);
    for (int c = 0; c < 40; ++c) {
        const auto y = power_quasi(a(rng));
        for (Index n : {1, 2, 7, 50, 100, 250}) {
            EXPECT_EQ(generalized_hardy_average(one, y, n), hardy_average(y, n));
        }
    }
}

TEST(GeneralizedAverage, MatchesOracle) {
    const PsiWeight psi = PsiWeight::power(0.5);
    const auto y = power_quasi(-0.7);
    for (Index n : {1, 10, 100, 1000}) {
        const long double ref = oracle::average(oracle::power(0.5L), oracle::power(-0.7L), n);
        EXPECT_NEAR(generalized_hardy_average(psi, y, n), static_cast<double>(ref), 1e-14 * static_cast<double>(ref));
    }
}

TEST(GeneralizedAverage, ZeroCumulativeWeight) {
    const PsiWeight psi(WeightSequence::explicit_values({0.0, 0.0, 1.0}));
    try {
        (void)generalized_hardy_average(psi, power_quasi(0.0), 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroCumulativeWeight);
        EXPECT_EQ(e.index(), 2);
    }
    EXPECT_DOUBLE_EQ(generalized_hardy_average(psi, power_quasi(0.0), 3), 1.0);
}

TEST(PsiCumulative, Examples) {
    EXPECT_DOUBLE_EQ(psi_cumulative(PsiWeight::constant_one(), 7), 7.0);
    EXPECT_NEAR(psi_cumulative(PsiWeight::power(2.0 - 0.5 - 1.0), 4), kSqrtPsiSum, 1e-15);
    EXPECT_DOUBLE_EQ(psi_cumulative(PsiWeight(WeightSequence::explicit_values({2.0, 3.0})), 5), 5.0);
}

TEST(PsiCumulative, SqrtOracle) {
    const long double ref = oracle::sum(oracle::power(0.5L), 1, 4);
    EXPECT_NEAR(static_cast<double>(ref), kSqrtPsiSum, 1e-15);
}

TEST(PsiCumulative, CacheAndFallbackAgree) {
    PsiWeight cached = PsiWeight::power(0.3, 1000);
    const PsiWeight lazy = PsiWeight::power(0.3);
    for (Index n : {1, 10, 999, 1000}) {
        EXPECT_EQ(cached.cumulative(n), lazy.cumulative(n));
    }
    EXPECT_EQ(cached.cached(), 1000);
    EXPECT_GT(cached.cumulative(2000), cached.cumulative(1000));
}

TEST(PsiCumulative, NonDecreasing) {
    const PsiWeight psi(WeightSequence::explicit_values({0.0, 1.0, 0.0, 2.0}, PowerTail{-0.5, 1.0}), 500);
    for (Index n = 1; n < 500; ++n) {
        EXPECT_LE(psi.cumulative(n), psi.cumulative(n + 1));
    }
}

TEST(HardyAverage, MonotoneContractionOnNonIncreasing) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> decay(0.6, 1.0);
    for (int c = 0; c < 20; ++c) {
        std::vector<double> v(300);
        double x = 1.0;
        for (auto& e : v) {
            e = x;
            x *= decay(rng);
        }
        const QuasiSequence y{0.0, WeightSequence::explicit_values(v)};
        double previous = kInf;
        for (Index n = 1; n <= 300; ++n) {
            const double a = hardy_average(y, n);
            EXPECT_GE(a, y(n) * (1 - 1e-15));
            EXPECT_LE(a, previous * (1 + 1e-15));
            previous = a;
        }
    }
}

TEST(SmoothingOperator, ZetaThree) {
    TruncationPolicy policy;
    policy.horizon = 10000;
    const auto one = [](Index) { return 1.0; };
    const PowerGrowth g{1.0, 1.0, 0.0, 1};
    const Interval t = smoothing_operator_T(one, 2.0, 0.0, 1, policy, g);
    EXPECT_TRUE(t.contains(kZeta3));
    EXPECT_LT(t.relative_width(), 1e-12);
}

TEST(SmoothingOperator, ZetaThreeOracle) {
    const long double head = oracle::sum_reverse(oracle::power(-3.0L), 1, 1000000);
    // Remainder lies between 1/(2 (N+1)^2) and 1/(2 N^2).
    EXPECT_LE(static_cast<double>(head + 0.5L / (1000001.0L * 1000001.0L)), kZeta3 * (1 + 1e-15));
    EXPECT_GE(static_cast<double>(head + 0.5L / 1e12L), kZeta3 * (1 - 1e-15));
}

TEST(SmoothingOperator, LiesBetweenPowerRuleBounds) {
    TruncationPolicy policy;
    policy.horizon = 5000;
    const auto one = [](Index) { return 1.0; };
    const PowerGrowth g{1.0, 1.0, 0.0, 1};
    for (Index n : {1, 2, 10, 100, 3000, 20000}) {
        const Interval t = smoothing_operator_T(one, 1.0, 0.0, n, policy, g);
        EXPECT_GE(t.lo, 0.5);
        EXPECT_LE(t.hi, 2.0);
        // n sum_{k>=n} k^-2 in [1, 1 + 1/n].
        EXPECT_GE(t.hi, 1.0);
        EXPECT_LE(t.lo, 1.0 + 1.0 / static_cast<double>(n));
    }
}

TEST(SmoothingOperator, UncertifiableCases) {
    TruncationPolicy policy;
    const auto f = [](Index k) { return static_cast<double>(k) * static_cast<double>(k); };
    try {
        (void)smoothing_operator_T(f, 1.0, 1.0, 1, policy, std::nullopt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UncertifiableTail);
    }
    const PowerGrowth g{1.0, 1.0, 2.0, 1};
    try {
        (void)smoothing_operator_T(f, 1.0, 1.0, 1, policy, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UncertifiableTail);
    }
}

// T^{m+1} f(n) = n^q sum_{k>=n} S_m(n, k) k^{-(q+1)} f(k), where S_m sums prod 1/j_i over
// chains n <= j_1 <= ... <= j_m <= k; S_m >= ln(k/n)^m / m!, so the log kernel sits below.
TEST(SmoothingOperator, IterationMatchesChainSumsAndDominatesLogKernel) {
    const double p = 2.0;
    const double beta = 0.5;
    const double q = p + beta * p;
    const Index N = 4000;
    std::vector<Interval> values(static_cast<std::size_t>(N));
    double f = 0.0;
    for (Index k = 1; k <= N; ++k) {
        f += std::pow(static_cast<double>(k), beta * p);
        values[static_cast<std::size_t>(k - 1)] = Interval::point(f);
    }
    const TailModel model{false, beta * p, 0.0, 1.0, 1};
    BoundedTable table{values, cumulative_growth(f, N, model)};
    std::vector<BoundedTable> iterates;
    for (int m = 0; m < 3; ++m) {
        table = apply_T(table, q);
        iterates.push_back(table);
    }

    const std::int64_t M = 400000;
    std::vector<long double> F(static_cast<std::size_t>(M) + 1, 0.0L);
    for (std::int64_t k = 1; k <= M; ++k) {
        F[static_cast<std::size_t>(k)] = F[static_cast<std::size_t>(k - 1)] +
                                         std::pow(static_cast<long double>(k), static_cast<long double>(beta * p));
    }
    for (Index n : {1, 5, 40, 300}) {
        const long double nn = static_cast<long double>(n);
        const long double nq = std::pow(nn, static_cast<long double>(q));
        long double s1 = 0.0L;
        long double s2 = 0.0L;
        long double chain[3] = {0.0L, 0.0L, 0.0L};
        long double logk[3] = {0.0L, 0.0L, 0.0L};
        for (std::int64_t k = n; k <= M; ++k) {
            const long double kk = static_cast<long double>(k);
            s1 += 1.0L / kk;
            s2 += s1 / kk;
            const long double base = std::pow(kk, -(static_cast<long double>(q) + 1.0L)) * F[static_cast<std::size_t>(k)];
            const long double l = std::log(kk / nn);
            chain[0] += base;
            chain[1] += s1 * base;
            chain[2] += s2 * base;
            logk[0] += base;
            logk[1] += l * base;
            logk[2] += l * l / 2.0L * base;
        }
        // Past M: F(k) k^{-(q+1)} = (1 + 1/k) / (2 k^2) and S_m(n, k) <= (1 + ln(k/n))^m, so the
        // missing part is at most (1 + 1/M)/2 times int_M^inf x^-2 (1 + ln(x/n))^m dx.
        const long double u = 1.0L + std::log(static_cast<long double>(M) / nn);
        const long double integral[3] = {1.0L, u + 1.0L, u * u + 2.0L * u + 2.0L};
        for (int m = 0; m < 3; ++m) {
            const Interval& it = iterates[static_cast<std::size_t>(m)].values[static_cast<std::size_t>(n - 1)];
            const double oracle_value = static_cast<double>(nq * chain[m]);
            const double remainder = static_cast<double>(nq * (1.0L + 1.0L / M) / 2.0L * integral[m] / M);
            EXPECT_GE(it.hi, oracle_value) << "n=" << n << " m=" << m;
            EXPECT_LE(it.lo, (oracle_value + remainder) * (1 + 1e-12)) << "n=" << n << " m=" << m;
            EXPECT_LE(static_cast<double>(nq * logk[m]), it.hi) << "n=" << n << " m=" << m;
        }
    }
}

TEST(ApplyT, SingleStepMatchesPointwiseOperator) {
    const Index N = 2000;
    std::vector<Interval> values(static_cast<std::size_t>(N));
    for (Index k = 1; k <= N; ++k) {
        values[static_cast<std::size_t>(k - 1)] = Interval::point(static_cast<double>(k));
    }
    const TailModel model{false, 0.0, 0.0, 1.0, 1};
    const PowerGrowth g = cumulative_growth(static_cast<double>(N), N, model);
    const BoundedTable t = apply_T({values, g}, 2.0);
    TruncationPolicy policy;
    policy.horizon = N;
    const auto f = [](Index k) { return static_cast<double>(k); };
    for (Index n : {1, 17, 500, 2000}) {
        const Interval direct = smoothing_operator_T(f, 2.0, 0.0, n, policy, g);
        const Interval& table = t.values[static_cast<std::size_t>(n - 1)];
        EXPECT_LE(std::max(direct.lo, table.lo), std::min(direct.hi, table.hi) * (1 + 1e-12)) << n;
    }
}
