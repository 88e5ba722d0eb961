#pragma once

// Primes p = a m^2 + 1 with small squarefree part a = s(p-1), the weighted
// sum sum_{x<n<=2x} Lambda(n+1) #{y<q<=2y : q^2 | n}, and the density of
// n with s(n) <= n^theta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "sievelab/arithmetic.hpp"
#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

// s <= n^theta, with a relative guard of 1e-12 so exact powers never flap.
inline bool kernel_admissible(u64 s, u64 n, double theta)
{
    return static_cast<double>(s) <= std::pow(static_cast<double>(n), theta) * (1.0 + 1e-12);
}

struct Am2Row {
    u64 p;
    u64 s; // s(p-1)
    u64 m; // p - 1 = s m^2
};

struct Am2Census {
    u64 x = 0;
    double theta = 0;
    std::vector<Am2Row> rows; // ascending p
    u64 count() const noexcept { return rows.size(); }
};

inline Am2Census census(const SieveTables& tables, u64 x, double theta)
{
    if (x > tables.x_max())
        throw OutOfTable("census: x exceeds table bound");
    if (!(theta > 0 && theta <= 1))
        throw InvalidArgument("census: theta must lie in (0, 1]");
    Am2Census c;
    c.x = x;
    c.theta = theta;
    auto primes = tables.primes();
    const std::size_t n_primes =
        static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
    constexpr std::size_t kBlock = 1 << 14;
    const std::size_t blocks = (n_primes + kBlock - 1) / kBlock;
    auto parts = parallel_map(blocks, [&](std::size_t b) {
        std::vector<Am2Row> rows;
        for (std::size_t i = b * kBlock; i < std::min(n_primes, (b + 1) * kBlock); ++i) {
            const u64 p = primes[i];
            const u64 s = tables.kernel(p - 1);
            if (kernel_admissible(s, p, theta))
                rows.push_back({p, s, isqrt((p - 1) / s)});
        }
        return rows;
    });
    for (auto& part : parts)
        c.rows.insert(c.rows.end(), part.begin(), part.end());
    return c;
}

struct WeightedSumReport {
    u64 x = 0, y = 0;
    double lhs = 0;
    double main = 0; // x / (2 zeta(2) y)
    double ratio = 0;
    // x zeta(2) zeta(3) / (2 zeta(6) y), the asymptotic the sum actually has.
    double main_corrected = 0;
    // Every term is a log p; multiplicity of each prime p, ascending p.
    std::map<u64, u64> prime_multiplicity;
};

namespace detail {

inline double log_weighted_total(const std::map<u64, u64>& mult)
{
    CompensatedSum<double> acc;
    for (const auto& [p, k] : mult)
        acc.add(static_cast<double>(k) * std::log(static_cast<double>(p)));
    return acc.value();
}

inline void check_weighted_args(const SieveTables& tables, u64 x, u64 y)
{
    if (y == 0)
        throw InvalidArgument("weighted_sum: y must be >= 1");
    if (checked_add(checked_mul(2, x, "2x"), 1, "2x+1") > tables.x_max())
        throw OutOfTable("weighted_sum: 2x+1 exceeds table bound " + std::to_string(tables.x_max()));
}

inline WeightedSumReport weighted_report(u64 x, u64 y, std::map<u64, u64> mult)
{
    WeightedSumReport r;
    r.x = x;
    r.y = y;
    r.prime_multiplicity = std::move(mult);
    r.lhs = log_weighted_total(r.prime_multiplicity);
    r.main = static_cast<double>(x) / (2.0 * kZeta2 * static_cast<double>(y));
    r.ratio = r.lhs / r.main;
    r.main_corrected = static_cast<double>(x) * kZeta2 * kZeta3 / (2.0 * kZeta6 * static_cast<double>(y));
    return r;
}

} // namespace detail

// q-major: for each y < q <= 2y, the k = 1 mod q^2 in (x+1, 2x+1].
inline WeightedSumReport weighted_sum(const SieveTables& tables, u64 x, u64 y)
{
    detail::check_weighted_args(tables, x, y);
    std::map<u64, u64> mult;
    for (u64 q = y + 1; q <= 2 * y; ++q) {
        const u64 q2 = checked_mul(q, q, "q^2");
        // smallest k > x+1 with k = 1 mod q^2
        u64 k = (x / q2 + 1) * q2 + 1;
        for (; k <= 2 * x + 1; k += q2)
            if (tables.lambda(k) > 0.0)
                ++mult[tables.spf(k)];
    }
    return detail::weighted_report(x, y, std::move(mult));
}

// n-major brute force over x < n <= 2x; the test oracle for weighted_sum.
inline WeightedSumReport weighted_sum_bruteforce(const SieveTables& tables, u64 x, u64 y)
{
    detail::check_weighted_args(tables, x, y);
    std::map<u64, u64> mult;
    for (u64 n = x + 1; n <= 2 * x; ++n) {
        if (tables.lambda(n + 1) <= 0.0)
            continue;
        for (u64 q = y + 1; q <= 2 * y; ++q)
            if (n % (q * q) == 0)
                ++mult[tables.spf(n + 1)];
    }
    return detail::weighted_report(x, y, std::move(mult));
}

// #{n <= x : s(n) <= n^theta} through the unique representation n = a m^2
// with a squarefree: count pairs (a, m), a <= x^theta, a m^2 <= x, that pass
// the same admissibility test the kernel table would apply.
inline u64 sparsity_count(u64 x, double theta)
{
    if (x == 0)
        throw InvalidArgument("sparsity_count: x must be >= 1");
    if (theta < 0)
        throw InvalidArgument("sparsity_count: theta must be >= 0");
    const u64 a_max = std::min<u64>(x, static_cast<u64>(std::floor(std::pow(static_cast<double>(x), theta) * (1.0 + 1e-12))));
    std::vector<bool> squareful(static_cast<std::size_t>(a_max) + 1, false);
    for (u64 d = 2; d * d <= a_max; ++d)
        for (u64 k = d * d; k <= a_max; k += d * d)
            squareful[k] = true;
    u64 count = 0;
    for (u64 a = 1; a <= a_max; ++a) {
        if (squareful[a])
            continue;
        for (u64 m = 1; a * m * m <= x; ++m)
            if (kernel_admissible(a, a * m * m, theta))
                ++count;
    }
    return count;
}

// Same count by scanning the kernel table.
inline u64 sparsity_count_scan(const SieveTables& tables, u64 x, double theta)
{
    if (x > tables.x_max())
        throw OutOfTable("sparsity scan: x exceeds table bound");
    u64 count = 0;
    for (u64 n = 1; n <= x; ++n)
        if (kernel_admissible(tables.kernel(n), n, theta))
            ++count;
    return count;
}

} // namespace sievelab
