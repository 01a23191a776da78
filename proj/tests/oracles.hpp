#pragma once

// Brute-force reference computations in long double, written independently of
// the library: no shared helpers, no tail certification, no caching.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Seq = std::function<long double(std::int64_t)>;

inline Seq power(long double a) {
    return [a](std::int64_t k) { return std::pow(static_cast<long double>(k), a); };
}

inline Seq table(std::vector<long double> values) {
    return [v = std::move(values)](std::int64_t k) {
        return k >= 1 && k <= static_cast<std::int64_t>(v.size()) ? v[static_cast<std::size_t>(k - 1)] : 0.0L;
    };
}

/// sum_{k=a}^{b} f(k), in increasing order.
inline long double sum(const Seq& f, std::int64_t a, std::int64_t b) {
    long double s = 0.0L;
    for (std::int64_t k = a; k <= b; ++k) {
        s += f(k);
    }
    return s;
}

/// Same sum accumulated from the small end so decaying terms are not swamped.
inline long double sum_reverse(const Seq& f, std::int64_t a, std::int64_t b) {
    long double s = 0.0L;
    for (std::int64_t k = b; k >= a; --k) {
        s += f(k);
    }
    return s;
}

/// QB ratio at n with the tail sum cut at M (an underestimate of the true ratio).
inline long double qb_ratio(const Seq& w, long double beta, long double p, std::int64_t n, std::int64_t M) {
    const long double nn = static_cast<long double>(n);
    long double head = 0.0L;
    for (std::int64_t k = 1; k <= n; ++k) {
        head += std::pow(static_cast<long double>(k) / nn, beta * p) * w(k);
    }
    long double tail = 0.0L;
    for (std::int64_t k = M; k >= n; --k) {
        tail += std::pow(nn / static_cast<long double>(k), p) * w(k);
    }
    return (head + tail) / head;
}

/// (sum_{k<=n} k^beta psi(k))^p sum_{n<=k<=M} Psi(k)^-p v(k) / sum_{k<=n} k^{beta p} v(k).
inline long double psi_ratio(const Seq& v, const Seq& psi, long double beta, long double p, std::int64_t n,
                             std::int64_t M) {
    long double F = 0.0L;
    long double rhs = 0.0L;
    for (std::int64_t k = 1; k <= n; ++k) {
        const long double kk = static_cast<long double>(k);
        F += std::pow(kk, beta) * psi(k);
        rhs += std::pow(kk, beta * p) * v(k);
    }
    std::vector<long double> Psi(static_cast<std::size_t>(M) + 1, 0.0L);
    for (std::int64_t k = 1; k <= M; ++k) {
        Psi[static_cast<std::size_t>(k)] = Psi[static_cast<std::size_t>(k - 1)] + psi(k);
    }
    long double tail = 0.0L;
    for (std::int64_t k = M; k >= n; --k) {
        tail += std::pow(Psi[static_cast<std::size_t>(k)], -p) * v(k);
    }
    return std::pow(F, p) * tail / rhs;
}

/// (A_psi y)(n) by direct summation.
inline long double average(const Seq& psi, const Seq& y, std::int64_t n) {
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::int64_t k = 1; k <= n; ++k) {
        num += y(k) * psi(k);
        den += psi(k);
    }
    return num / den;
}

struct Sides {
    long double lhs = 0.0L;
    long double rhs = 0.0L;
};

/// Both sides of the weighted Hardy inequality truncated at N, quadratic time.
inline Sides hardy_sides(const Seq& psi, const Seq& y, const Seq& v, long double p, std::int64_t N) {
    Sides s;
    for (std::int64_t n = 1; n <= N; ++n) {
        const long double vn = v(n);
        if (vn == 0.0L) {
            continue;
        }
        s.lhs += std::pow(average(psi, y, n), p) * vn;
        s.rhs += std::pow(y(n), p) * vn;
    }
    return s;
}

/// Ratio of the inequality for the extremizer y = k^beta on k <= n, sums cut at N.
inline long double extremizer_ratio(const Seq& psi, const Seq& v, long double beta, long double p, std::int64_t n,
                                    std::int64_t N) {
    const Seq y = [beta, n](std::int64_t k) {
        return k <= n ? std::pow(static_cast<long double>(k), beta) : 0.0L;
    };
    long double lhs = 0.0L;
    long double num = 0.0L;
    long double den = 0.0L;
    long double rhs = 0.0L;
    for (std::int64_t m = 1; m <= N; ++m) {
        num += y(m) * psi(m);
        den += psi(m);
        lhs += std::pow(num / den, p) * v(m);
        rhs += std::pow(y(m), p) * v(m);
    }
    return lhs / rhs;
}

/// sup_{n<=N} sum_{k<=n} psi / sum_{k=n}^{mn} psi.
inline long double doubling(const Seq& psi, std::int64_t m, std::int64_t N) {
    long double best = 0.0L;
    for (std::int64_t n = 1; n <= N; ++n) {
        best = std::max(best, sum(psi, 1, n) / sum(psi, n, m * n));
    }
    return best;
}

/// sup_{n<=N} n^beta Psi(n) / sum_{k<=n} k^beta psi(k).
inline long double weighted_doubling(const Seq& psi, long double beta, std::int64_t N) {
    long double best = 0.0L;
    long double plain = 0.0L;
    long double weighted = 0.0L;
    for (std::int64_t n = 1; n <= N; ++n) {
        const long double nn = static_cast<long double>(n);
        plain += psi(n);
        weighted += std::pow(nn, beta) * psi(n);
        best = std::max(best, std::pow(nn, beta) * plain / weighted);
    }
    return best;
}

} // namespace oracle
