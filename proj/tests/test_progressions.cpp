#include <cmath>
#include <complex>
#include <numeric>

#include <gtest/gtest.h>

#include "sievelab/arithmetic.hpp"
#include "sievelab/dirichlet.hpp"
#include "sievelab/progressions.hpp"

using namespace sievelab;

namespace {

// By value: iterating characters() of a temporary group would dangle.
std::vector<Character> characters_mod(u64 q) { return character_group(q).characters(); }

const SieveTables& tables()
{
    static const SieveTables t = build_tables(20000);
    return t;
}

double psi_direct(u64 y, u64 q, u64 a)
{
    double s = 0;
    for (u64 n = 1; n <= y; ++n)
        if (n % q == a % q)
            s += tables().lambda(n);
    return s;
}

} // namespace

TEST(Psi, Examples)
{
    const auto& t = tables();
    EXPECT_NEAR(psi_progression(t, 10, 1, 0), std::log(8.0 * 9 * 5 * 7), 1e-12);
    EXPECT_NEAR(psi_progression(t, 10, 3, 1), std::log(2.0) + std::log(7.0), 1e-12);
    EXPECT_NEAR(psi_progression(t, 10, 100, 3), std::log(3.0), 1e-12);
    EXPECT_NEAR(psi_progression(t, 10.9, 3, 1), psi_progression(t, 10, 3, 1), 0.0);
    EXPECT_THROW(psi_progression(t, 30000, 1, 0), OutOfTable);
}

TEST(Psi, CharacterExamples)
{
    const auto& t = tables();
    const auto G1 = character_group(1);
    EXPECT_NEAR(std::abs(psi_character(t, 20, G1.principal(), true) - cplx(psi(t, 20) - 20)), 0.0, 1e-12);
    for (const auto& chi : characters_mod(4)) {
        if (chi.is_principal())
            continue;
        cplx want = 0;
        for (i64 n = 1; n <= 10; ++n)
            want += chi(n) * t.lambda(static_cast<u64>(n));
        EXPECT_LT(std::abs(psi_character(t, 10, chi) - want), 1e-12);
        const double by_hand = -std::log(3.0) + std::log(5.0) - std::log(7.0) + std::log(3.0);
        EXPECT_NEAR(psi_character(t, 10, chi).real(), by_hand, 1e-12);
    }
}

TEST(Psi, OrthogonalityReconstruction)
{
    const auto& t = tables();
    for (u64 q = 1; q <= 20; ++q) {
        const auto G = character_group(q);
        for (u64 y : {1u, 17u, 100u, 555u, 1000u}) {
            std::vector<cplx> psis;
            for (const auto& chi : G.characters())
                psis.push_back(psi_character(t, static_cast<double>(y), chi));
            for (u64 a = 1; a <= q; ++a) {
                if (std::gcd(a, q) != 1)
                    continue;
                cplx s = 0;
                for (std::size_t i = 0; i < psis.size(); ++i)
                    s += std::conj(G.characters()[i](static_cast<i64>(a))) * psis[i];
                s /= static_cast<double>(G.size());
                ASSERT_LT(std::abs(s - psi_direct(y, q, a)), 1e-8) << q << " " << y << " " << a;
            }
        }
    }
}

TEST(Psi, ResiduePartition)
{
    // sum over all residues a mod q of psi(y;q,a) = psi(y), and the non-coprime
    // residues carry only powers of primes dividing q
    const auto& t = tables();
    const auto powers = prime_powers_upto(t, 5000);
    for (u64 q = 1; q <= 60; ++q) {
        const auto parts = residue_psi(powers, 5000, q);
        double total = 0, noncoprime = 0;
        for (u64 a = 0; a < q; ++a) {
            total += parts[a];
            if (std::gcd(a, q) != 1)
                noncoprime += parts[a];
        }
        double want = 0;
        for (const auto& f : factorize(q))
            for (u64 pk = f.prime; pk <= 5000; pk *= f.prime)
                want += std::log(static_cast<double>(f.prime));
        ASSERT_NEAR(total, psi(t, 5000), 1e-9 * total);
        ASSERT_NEAR(noncoprime, want, 1e-9 * (1 + want)) << q;
    }
}

TEST(ErrorSums, Bdh)
{
    const auto& t = tables();
    ModuliChoice sq;
    sq.square = true;
    const auto one = bdh_sum(t, 10000, sq, 1);
    const double d = psi(t, 10000) - 10000;
    EXPECT_NEAR(one.lhs, d * d, 1e-9 * d * d);
    EXPECT_EQ(one.rows.size(), 1u);

    ModuliChoice empty;
    empty.set = explicit_set({});
    EXPECT_EQ(bdh_sum(t, 10000, empty, 50).lhs, 0.0);
    EXPECT_EQ(bv_sum(t, 10000, empty, 50).lhs, 0.0);

    // classical mode brute force
    const auto r = bdh_sum(t, 3000, ModuliChoice{}, 12);
    double want = 0;
    for (u64 q = 1; q <= 12; ++q)
        for (u64 a = 1; a <= q; ++a)
            if (std::gcd(a, q) == 1) {
                const double e = psi_direct(3000, q, a) - 3000.0 / static_cast<double>(euler_phi(q));
                want += e * e;
            }
    EXPECT_NEAR(r.lhs, want, 1e-9 * want);
    EXPECT_NEAR(r.normalizer, 3000.0 * 3000.0 / std::pow(std::log(3000.0), 2), 1e-6);
}

TEST(ErrorSums, RowsSumToLhs)
{
    const auto& t = tables();
    ModuliChoice sq;
    sq.square = true;
    for (const auto& r : {bv_sum(t, 20000, sq, 9), bdh_sum(t, 20000, sq, 9)}) {
        CompensatedSum<double> acc;
        for (const auto& row : r.rows) {
            EXPECT_EQ(row.modulus, row.q * row.q);
            acc.add(row.contribution);
        }
        EXPECT_EQ(acc.value(), r.lhs);
    }
}

TEST(ErrorSums, BvBruteForce)
{
    const auto& t = tables();
    ModuliChoice squarefree;
    squarefree.set = squarefree_set();
    const auto r = bv_sum(t, 5000, squarefree, 20);
    EXPECT_EQ(r.set_count, moduli_window(squarefree_set(), 20, 1).size());
    double want = 0;
    for (u64 q : moduli_window(squarefree_set(), 20, 1)) {
        double best = -1;
        for (u64 a = 1; a <= q; ++a)
            if (std::gcd(a, q) == 1)
                best = std::max(best, std::abs(psi_direct(5000, q, a) - 5000.0 / static_cast<double>(euler_phi(q))));
        want += best;
    }
    EXPECT_NEAR(r.lhs, want, 1e-9 * want);
}

TEST(ErrorSums, ExactSupDominatesGrid)
{
    const auto& t = tables();
    ModuliChoice sq;
    sq.square = true;
    ErrorSumOptions grid;
    for (double y = 1; y <= 3000; y += 0.5)
        grid.y_grid.push_back(y);
    ErrorSumOptions exact;
    exact.exact_sup = true;
    const auto g = bv_sum(t, 3000, sq, 6, grid);
    const auto e = bv_sum(t, 3000, sq, 6, exact);
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        EXPECT_GE(e.rows[i].contribution, g.rows[i].contribution - 1e-9);
        // the sup is a left limit at some jump; the half-integer grid comes within q(1/phi(q^2))/2 of it
        EXPECT_LE(e.rows[i].contribution - g.rows[i].contribution,
                  static_cast<double>(g.rows[i].q) / static_cast<double>(euler_phi(g.rows[i].modulus)) + 1e-9);
    }
    ErrorSumOptions bad;
    bad.y_grid = {5000};
    EXPECT_THROW(bv_sum(t, 3000, sq, 6, bad), InvalidArgument);
}

TEST(Vaughan, ExactOnManyInputs)
{
    const auto& t = tables();
    const double xs[] = {50, 999, 4321, 10000};
    const double uv[][2] = {{1, 1}, {2, 3}, {10, 10}, {7, 31}, {100, 1}, {1, 100}};
    for (double x : xs)
        for (const auto& p : uv) {
            if (p[0] * p[1] > x)
                continue;
            for (u64 q : {1u, 5u, 12u}) {
                const auto G = character_group(q);
                const Character& chi = G.characters().back();
                const auto d = vaughan_decompose(t, x, p[0], p[1], [&](u64 n) { return chi(static_cast<i64>(n)); });
                ASSERT_LT(d.relative_residual(), 1e-9) << x << " " << p[0] << " " << p[1] << " " << q;
                ASSERT_TRUE(d.coefficient_bounds_hold);
                ASSERT_TRUE(d.ranges_hold);
                ASSERT_LT(std::abs(d.total - psi_character(t, x, chi)), 1e-8);
            }
        }
    EXPECT_THROW(vaughan_decompose(t, 100, 0.5, 2, [](u64) { return cplx(1); }), InvalidArgument);
    EXPECT_THROW(vaughan_decompose(t, 100, 20, 20, [](u64) { return cplx(1); }), InvalidArgument);
}

TEST(PhiSum, MatchesDirectSum)
{
    for (u64 y : {1u, 10u, 100u, 1000u}) {
        double s = 0;
        for (u64 q = y + 1; q <= 2 * y; ++q)
            s += 1.0 / static_cast<double>(euler_phi(q * q));
        const auto r = phi_square_sum(y);
        EXPECT_NEAR(r.sum, s, 1e-12 * s);
        EXPECT_DOUBLE_EQ(r.main, 3.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(y)));
        EXPECT_DOUBLE_EQ(r.error, r.sum - r.main);
    }
    // the sum tends to zeta(2) zeta(3) / (2 zeta(6) y), not 1/(2 zeta(2) y)
    const auto big = phi_square_sum(100000);
    EXPECT_NEAR(big.sum / big.main_corrected, 1.0, 1e-3);
    EXPECT_THROW(phi_square_sum(0), InvalidArgument);
}
