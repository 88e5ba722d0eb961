#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <gtest/gtest.h>

#include "sievelab/arithmetic.hpp"
#include "sievelab/dirichlet.hpp"

using namespace sievelab;

namespace {

// By value: iterating characters() of a temporary group would dangle.
std::vector<Character> characters_mod(u64 q) { return character_group(q).characters(); }

constexpr double kTol = 1e-9;

bool near(cplx a, cplx b, double tol = kTol) { return std::abs(a - b) <= tol; }

// Smallest d | q for which chi is trivial on all units = 1 mod d.
u64 brute_conductor(const Character& chi)
{
    const u64 q = chi.modulus();
    for (u64 d : divisors(q)) {
        bool trivial = true;
        for (u64 a = 1; a < q && trivial; ++a)
            if (std::gcd(a, q) == 1 && a % d == 1 % d)
                trivial = near(chi(static_cast<i64>(a)), 1.0);
        if (trivial)
            return d;
    }
    return q;
}

// Number of primitive characters mod q: multiplicative, with
// f(p) = p - 2, f(p^k) = p^(k-2) (p-1)^2 for k >= 2.
u64 primitive_count_formula(u64 q)
{
    u64 r = 1;
    for (const auto& f : factorize(q)) {
        u64 pk2 = 1;
        for (unsigned i = 2; i < f.exponent; ++i)
            pk2 *= f.prime;
        r *= f.exponent == 1 ? f.prime - 2 : pk2 * (f.prime - 1) * (f.prime - 1);
    }
    return r;
}

cplx gauss_direct(const Character& chi)
{
    const u64 q = chi.modulus();
    cplx s = 0;
    for (u64 a = 1; a <= q; ++a)
        s += chi(static_cast<i64>(a)) * std::polar(1.0, kTwoPi * static_cast<double>(a) / static_cast<double>(q));
    return s;
}

} // namespace

TEST(Characters, GroupSizes)
{
    const auto G1 = character_group(1);
    ASSERT_EQ(G1.size(), 1u);
    EXPECT_TRUE(G1.principal().is_principal());
    EXPECT_EQ(G1.principal().conductor(), 1u);
    for (u64 q = 1; q <= 200; ++q)
        ASSERT_EQ(character_group(q).size(), euler_phi(q)) << q;
}

TEST(Characters, ModFive)
{
    const auto G = character_group(5);
    ASSERT_EQ(G.size(), 4u);
    std::vector<cplx> at2;
    for (const auto& chi : G.characters())
        at2.push_back(chi(2));
    for (cplx r : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)})
        EXPECT_EQ(std::count_if(at2.begin(), at2.end(), [&](cplx v) { return near(v, r); }), 1);
    for (const auto& chi : G.characters())
        if (chi.order() == 4)
            EXPECT_TRUE(near(eval_char(chi, 4), -1.0));
}

TEST(Characters, ModEightConductors)
{
    const auto G = character_group(8);
    std::vector<u64> cond;
    for (const auto& chi : G.characters()) {
        cond.push_back(chi.conductor());
        EXPECT_EQ(chi.conductor(), brute_conductor(chi));
    }
    std::sort(cond.begin(), cond.end());
    EXPECT_EQ(cond, (std::vector<u64>{1, 4, 8, 8}));
}

TEST(Characters, Evaluation)
{
    const auto G6 = character_group(6);
    EXPECT_TRUE(near(eval_char(G6.principal(), 35), 1.0));
    for (const auto& chi : G6.characters())
        EXPECT_EQ(eval_char(chi, 3), cplx(0));
    const auto G7 = character_group(7);
    for (const auto& chi : G7.characters())
        EXPECT_TRUE(near(chi(-1), chi(6)));
}

TEST(Characters, ConductorMatchesBruteForce)
{
    for (u64 q = 1; q <= 60; ++q)
        for (const auto& chi : characters_mod(q))
            ASSERT_EQ(chi.conductor(), brute_conductor(chi)) << "q=" << q;
}

TEST(Characters, PrimitiveCount)
{
    for (u64 q = 1; q <= 100; ++q)
        ASSERT_EQ(character_group(q).primitive_count(), primitive_count_formula(q)) << q;
}

TEST(Characters, Multiplicative)
{
    for (u64 q : {12u, 15u, 16u, 27u, 40u}) {
        for (const auto& chi : characters_mod(q))
            for (i64 m = 0; m < static_cast<i64>(q); ++m)
                for (i64 n = 0; n < static_cast<i64>(q); ++n)
                    ASSERT_TRUE(near(chi(m * n), chi(m) * chi(n)));
    }
}

TEST(Characters, Orthogonality)
{
    for (u64 q = 1; q <= 60; ++q) {
        const auto G = character_group(q);
        const auto& chars = G.characters();
        const double phi = static_cast<double>(G.size());
        for (std::size_t i = 0; i < chars.size(); ++i)
            for (std::size_t j = i; j < chars.size(); ++j) {
                cplx s = 0;
                for (u64 n = 0; n < q; ++n)
                    s += chars[i](static_cast<i64>(n)) * std::conj(chars[j](static_cast<i64>(n)));
                ASSERT_TRUE(near(s, i == j ? phi : 0.0, 1e-8)) << q << " " << i << " " << j;
            }
        // second relation
        for (u64 a = 0; a < q; ++a) {
            cplx s = 0;
            for (const auto& chi : chars)
                s += chi(static_cast<i64>(a));
            ASSERT_TRUE(near(s, (q == 1 || a == 1) ? phi : 0.0, 1e-8)) << q << " " << a;
        }
    }
}

TEST(Characters, InducingPrimitive)
{
    for (u64 q : {1u, 9u, 12u, 20u, 36u, 45u}) {
        const auto G = character_group(q);
        const auto triv = inducing_primitive(G.principal());
        EXPECT_EQ(triv.modulus(), 1u);
        for (const auto& chi : G.characters()) {
            const auto star = inducing_primitive(chi);
            EXPECT_EQ(star.modulus(), chi.conductor());
            EXPECT_TRUE(star.is_primitive());
            if (chi.is_primitive())
                EXPECT_TRUE(star == chi);
            for (i64 n = 1; n <= static_cast<i64>(q); ++n)
                if (std::gcd(static_cast<u64>(n), q) == 1)
                    ASSERT_TRUE(near(star(n), chi(n))) << q << " " << n;
        }
    }
    const auto G8 = character_group(8);
    for (const auto& chi : G8.characters())
        if (chi.conductor() == 4) {
            const auto star = inducing_primitive(chi);
            EXPECT_EQ(star.modulus(), 4u);
            for (i64 n : {1, 3, 5, 7})
                EXPECT_TRUE(near(star(n), chi(n)));
            EXPECT_TRUE(near(star(3), -1.0));
        }
}

TEST(Characters, GaussSums)
{
    for (const auto& chi : characters_mod(5))
        if (chi.order() == 2)
            EXPECT_TRUE(near(gauss_sum(chi), std::sqrt(5.0)));
    EXPECT_TRUE(near(gauss_sum(character_group(4).principal()), 0.0));
    for (const auto& chi : characters_mod(7))
        if (chi.is_primitive())
            EXPECT_NEAR(std::abs(gauss_sum(chi)), std::sqrt(7.0), 1e-6);
    for (u64 q = 1; q <= 60; ++q)
        for (const auto& chi : characters_mod(q)) {
            const cplx g = gauss_sum(chi);
            ASSERT_TRUE(near(g, gauss_direct(chi), 1e-8)) << q;
            if (chi.is_primitive())
                ASSERT_NEAR(std::abs(g), std::sqrt(static_cast<double>(q)), 1e-8) << q;
        }
}

TEST(Characters, IntervalSums)
{
    for (const auto& chi : characters_mod(3))
        if (!chi.is_principal())
            EXPECT_TRUE(near(char_interval_sum(chi, 0, 3), 0.0));
    EXPECT_TRUE(near(char_interval_sum(character_group(1).principal(), 0, 5), 5.0));
    for (const auto& chi : characters_mod(7))
        if (chi.order() == 2)
            EXPECT_TRUE(near(char_interval_sum(chi, 0, 3), 1.0));
    EXPECT_THROW(char_interval_sum(character_group(3).principal(), 0, 0), InvalidArgument);
    // period trick against a direct sum, including negative starts
    for (const auto& chi : characters_mod(20))
        for (i64 M : {-37, -1, 0, 5, 123})
            for (u64 N : {1u, 19u, 20u, 47u, 100u}) {
                cplx s = 0;
                for (u64 i = 1; i <= N; ++i)
                    s += chi(M + static_cast<i64>(i));
                ASSERT_TRUE(near(char_interval_sum(chi, M, N), s, 1e-8));
            }
}

TEST(Characters, PolyaVinogradovExhaustive)
{
    u64 violations = 0;
    for (u64 q = 2; q <= 50; ++q)
        for (const auto& chi : characters_mod(q)) {
            if (chi.is_principal())
                continue;
            for (i64 M = 0; M < static_cast<i64>(q); ++M)
                for (u64 N = 1; N <= 3 * q; ++N)
                    violations += !polya_vinogradov_check(chi, M, N).holds;
        }
    EXPECT_EQ(violations, 0u);
    EXPECT_THROW(polya_vinogradov_check(character_group(5).principal(), 0, 3), InvalidArgument);
}
