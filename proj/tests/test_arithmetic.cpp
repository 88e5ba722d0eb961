#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "sievelab/arithmetic.hpp"

using namespace sievelab;

namespace {

bool is_prime_trial(u64 n)
{
    if (n < 2)
        return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

// log lcm(1..x) = sum over primes p <= x of floor(log_p x) log p, with p^k
// found by repeated multiplication.
double log_lcm_oracle(u64 x)
{
    double s = 0;
    for (u64 p = 2; p <= x; ++p) {
        if (!is_prime_trial(p))
            continue;
        for (u64 pk = p; pk <= x; pk *= p)
            s += std::log(static_cast<double>(p));
    }
    return s;
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("sievelab_test_" + name);
}

} // namespace

TEST(Tables, SmallValues)
{
    EXPECT_EQ(build_tables(10).phi(9), 6u);
    const auto t = build_tables(100);
    EXPECT_DOUBLE_EQ(t.lambda(8), std::log(2.0));
    EXPECT_EQ(t.kernel(50), 2u);
    EXPECT_EQ(t.mu(30), -1);
    EXPECT_EQ(t.mu(12), 0);
    EXPECT_EQ(t.tau(36), 9u);
    EXPECT_EQ(t.lambda(1), 0.0);
    EXPECT_EQ(t.lambda(6), 0.0);
}

TEST(Tables, KernelExamples)
{
    EXPECT_EQ(squarefree_kernel(49), 1u);
    EXPECT_EQ(squarefree_kernel(12), 3u);
    EXPECT_EQ(squarefree_kernel(360), 10u);
    EXPECT_EQ(squarefree_kernel(1), 1u);
}

TEST(Tables, PhiOfSquares)
{
    EXPECT_EQ(euler_phi_qsq(6), 12u);
    EXPECT_EQ(euler_phi_qsq(1), 1u);
    EXPECT_EQ(euler_phi_qsq(10), 40u);
    // direct count of units mod 100
    u64 units = 0;
    for (u64 a = 1; a <= 100; ++a)
        units += std::gcd(a, u64{100}) == 1;
    EXPECT_EQ(units, 40u);
    EXPECT_THROW(euler_phi_qsq(u64{1} << 40), ResourceLimit);
}

TEST(Tables, DivisorSumIdentities)
{
    const auto t = build_tables(2000);
    for (u64 n = 1; n <= 2000; ++n) {
        u64 phi_sum = 0;
        int mu_sum = 0;
        u64 tau = 0;
        for (u64 d : divisors(n)) {
            phi_sum += t.phi(d);
            mu_sum += t.mu(d);
            ++tau;
        }
        ASSERT_EQ(phi_sum, n) << n;
        ASSERT_EQ(mu_sum, n == 1 ? 1 : 0) << n;
        ASSERT_EQ(t.tau(n), tau) << n;
        ASSERT_EQ(t.phi(n), euler_phi(n)) << n;
    }
}

TEST(Tables, KernelTimesSquare)
{
    const auto t = build_tables(5000);
    for (u64 n = 1; n <= 5000; ++n) {
        const u64 s = t.kernel(n);
        ASSERT_EQ(n % s, 0u);
        const u64 m2 = n / s;
        const u64 m = isqrt(m2);
        ASSERT_EQ(m * m, m2) << n;
        ASSERT_NE(t.mu(s), 0) << n;
        ASSERT_EQ(s, squarefree_kernel(n));
    }
}

TEST(Tables, PsiIsLogLcm)
{
    const auto t = build_tables(300);
    double psi = 0;
    for (u64 x = 1; x <= 300; ++x) {
        psi += t.lambda(x);
        ASSERT_NEAR(psi, log_lcm_oracle(x), 1e-9 * (1 + psi)) << x;
    }
}

TEST(Tables, PrimesMatchTrialDivision)
{
    const auto t = build_tables(100000);
    u64 count = 0;
    for (u64 n = 1; n <= 100000; ++n) {
        ASSERT_EQ(t.is_prime(n), is_prime_trial(n)) << n;
        count += is_prime_trial(n);
    }
    EXPECT_EQ(t.primes().size(), count);
    EXPECT_EQ(count, 9592u);
}

TEST(Tables, SegmentedAgreesWithLinear)
{
    BuildOptions seg;
    seg.segment_threshold = 0;
    seg.segment_size = 1000;
    const auto a = build_tables(200000);
    const auto b = build_tables(200000, seg);
    EXPECT_TRUE(a == b);
}

TEST(Tables, KernelBeyondTable)
{
    const auto t = build_tables(100);
    EXPECT_EQ(squarefree_kernel(t, 50), 2u);
    EXPECT_EQ(squarefree_kernel(t, 360), 10u);
    EXPECT_EQ(squarefree_kernel(t, 1009u * 1009u * 3u), 3u);
    EXPECT_EQ(squarefree_kernel(t, 2u * 1013u), 2026u);
}

TEST(Tables, Errors)
{
    EXPECT_THROW(build_tables(1), InvalidArgument);
    const auto t = build_tables(100);
    EXPECT_THROW(t.phi(101), OutOfTable);
    BuildOptions tiny;
    tiny.memory_budget_bytes = 1000;
    EXPECT_THROW(build_tables(100000, tiny), ResourceLimit);
}

TEST(Tables, CacheRoundTrip)
{
    const auto path = temp_file("cache.slab");
    const auto t = build_tables(50000);
    save_tables(t, path);
    const auto back = load_tables(path, 50000);
    ASSERT_TRUE(back.has_value());
    EXPECT_TRUE(*back == t);
    EXPECT_FALSE(load_tables(path, 40000).has_value());
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << "NOPE";
    }
    EXPECT_FALSE(load_tables(path, 50000).has_value());
    EXPECT_FALSE(load_tables(temp_file("missing.slab"), 50000).has_value());
    std::filesystem::remove(path);
}

TEST(Tables, PrimePowers)
{
    const auto t = build_tables(100);
    const auto pp = prime_powers_upto(t, 30);
    std::vector<u64> ns;
    for (const auto& p : pp)
        ns.push_back(p.n);
    const std::vector<u64> want{2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29};
    EXPECT_EQ(ns, want);
}
