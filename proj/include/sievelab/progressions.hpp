#pragma once

// Chebyshev sums in progressions and twisted by characters, the
// Barban-Davenport-Halberstam and Bombieri-Vinogradov error sums over sparse
// and square moduli, the exact four-term Vaughan decomposition, and the
// sum of 1/phi(q^2) over a dyadic range.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "sievelab/arithmetic.hpp"
#include "sievelab/dirichlet.hpp"
#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/sparse_sets.hpp"

namespace sievelab {

namespace detail {
inline u64 table_floor(const SieveTables& tables, double y)
{
    if (y > static_cast<double>(tables.x_max()))
        throw OutOfTable("y = " + std::to_string(y) + " exceeds table bound " + std::to_string(tables.x_max()));
    return y < 1.0 ? 0 : static_cast<u64>(std::floor(y));
}
} // namespace detail

// psi(y; q, a) = sum_{n <= y, n = a mod q} Lambda(n).
inline double psi_progression(const SieveTables& tables, double y, u64 q, u64 a)
{
    if (q == 0)
        throw InvalidArgument("psi_progression: q must be >= 1");
    const u64 Y = detail::table_floor(tables, y);
    auto lam = tables.lambda_table();
    CompensatedSum<double> acc;
    u64 n = a % q;
    if (n == 0)
        n = q;
    for (; n <= Y; n += q)
        acc.add(lam[n]);
    return acc.value();
}

inline double psi(const SieveTables& tables, double y) { return psi_progression(tables, y, 1, 0); }

// psi(y, chi) = sum_{n<=y} Lambda(n) chi(n); with primed set and chi
// principal, y is subtracted (psi').
inline cplx psi_character(const SieveTables& tables, double y, const Character& chi, bool primed = false)
{
    const u64 Y = detail::table_floor(tables, y);
    auto lam = tables.lambda_table();
    CompensatedSum<cplx> acc;
    for (u64 n = 2; n <= Y; ++n)
        if (lam[n] > 0.0)
            acc.add(lam[n] * chi(static_cast<i64>(n)));
    if (primed && chi.is_principal())
        acc.add(cplx(-y, 0.0));
    return acc.value();
}

// psi(y; m, a) for every residue a in [0, m), from a prime-power list.
inline std::vector<double> residue_psi(std::span<const PrimePower> powers, double y, u64 m)
{
    std::vector<CompensatedSum<double>> acc(static_cast<std::size_t>(m));
    for (const PrimePower& pp : powers) {
        if (static_cast<double>(pp.n) > y)
            break;
        acc[static_cast<std::size_t>(pp.n % m)].add(pp.log_p);
    }
    std::vector<double> out(acc.size());
    for (std::size_t a = 0; a < acc.size(); ++a)
        out[a] = acc[a].value();
    return out;
}

enum class ErrorSumKind { bdh_general, bdh_square, bv_general, bv_square, classical_bv, classical_bdh };

inline const char* to_string(ErrorSumKind k)
{
    switch (k) {
    case ErrorSumKind::bdh_general: return "BDH-general";
    case ErrorSumKind::bdh_square: return "BDH-square";
    case ErrorSumKind::bv_general: return "BV-general";
    case ErrorSumKind::bv_square: return "BV-square";
    case ErrorSumKind::classical_bv: return "classical-BV";
    case ErrorSumKind::classical_bdh: return "classical-BDH";
    }
    return "?";
}

struct ErrorRow {
    u64 q = 0;
    u64 modulus = 0; // q, or q^2 in square mode
    double contribution = 0;
    std::optional<u64> argmax_a; // BV only
    std::optional<double> argmax_y;
};

struct ErrorSumReport {
    ErrorSumKind kind = ErrorSumKind::classical_bdh;
    double x = 0;
    u64 Q = 0;
    std::string set_id;
    double A = 2;
    u64 set_count = 0; // |S(Q)| in general mode
    double lhs = 0;
    double normalizer = 0;
    std::vector<double> y_grid;
    bool exact_sup = false;
    std::vector<ErrorRow> rows;
};

struct ErrorSumOptions {
    double A = 2.0;
    // BV only. Empty grid means {x}.
    std::vector<double> y_grid;
    // BV only: exact sup over real y in [1, x] (supported for x <= 1e6).
    bool exact_sup = false;
};

// Which moduli an error sum runs over. No set means the classical range
// 1..Q; square mode always runs over q = 1..Q with modulus q^2.
struct ModuliChoice {
    std::optional<ModuliSet> set;
    bool square = false;
};

namespace detail {

inline std::vector<std::pair<u64, u64>> error_moduli(const ModuliChoice& choice, u64 Q)
{
    std::vector<std::pair<u64, u64>> out; // (q, modulus)
    if (choice.square) {
        for (u64 q = 1; q <= Q; ++q)
            out.emplace_back(q, checked_mul(q, q, "q^2"));
    } else if (choice.set) {
        for (u64 q : moduli_window(*choice.set, Q, 1))
            out.emplace_back(q, q);
    } else {
        for (u64 q = 1; q <= Q; ++q)
            out.emplace_back(q, q);
    }
    return out;
}

inline void finish_report(ErrorSumReport& r)
{
    CompensatedSum<double> total;
    for (const ErrorRow& row : r.rows)
        total.add(row.contribution);
    r.lhs = total.value();
}

} // namespace detail

// Sum over moduli of sum_{(a,m)=1} |psi(x;m,a) - x/phi(m)|^2, weighted by q in
// square mode.
inline ErrorSumReport bdh_sum(const SieveTables& tables, double x, const ModuliChoice& choice, u64 Q,
                              const ErrorSumOptions& opts = {})
{
    const u64 X = detail::table_floor(tables, x);
    ErrorSumReport r;
    r.kind = choice.square ? ErrorSumKind::bdh_square : (choice.set ? ErrorSumKind::bdh_general : ErrorSumKind::classical_bdh);
    r.x = x;
    r.Q = Q;
    r.set_id = choice.square ? "squares" : (choice.set ? choice.set->id() : "classical");
    r.A = opts.A;
    const auto moduli = detail::error_moduli(choice, Q);
    const auto powers = prime_powers_upto(tables, X);
    r.rows = parallel_map(moduli.size(), [&](std::size_t i) {
        const auto [q, m] = moduli[i];
        const double expected = x / static_cast<double>(euler_phi(m));
        const auto psi_a = residue_psi(powers, x, m);
        CompensatedSum<double> acc;
        for (u64 a = 1; a <= m; ++a) {
            if (std::gcd(a, m) != 1)
                continue;
            const double d = psi_a[static_cast<std::size_t>(a % m)] - expected;
            acc.add(d * d);
        }
        return ErrorRow{q, m, (choice.square ? static_cast<double>(q) : 1.0) * acc.value(), std::nullopt, std::nullopt};
    });
    detail::finish_report(r);
    const double logA = std::pow(std::log(x), opts.A);
    if (r.kind == ErrorSumKind::bdh_general) {
        r.set_count = moduli.size();
        r.normalizer = static_cast<double>(r.set_count) / static_cast<double>(Q) * x * x / logA;
    } else {
        r.normalizer = x * x / logA;
    }
    return r;
}

namespace detail {

struct ResidueMax {
    double value = -1.0;
    u64 a = 0;
    double y = 0;
};

// max over coprime a of |psi(y;m,a) - y/phi(m)|, smallest a on ties.
inline ResidueMax residue_max_at(std::span<const PrimePower> powers, double y, u64 m)
{
    const double expected = y / static_cast<double>(euler_phi(m));
    const auto psi_a = residue_psi(powers, y, m);
    ResidueMax best;
    for (u64 a = 1; a <= m; ++a) {
        if (std::gcd(a, m) != 1)
            continue;
        const double d = std::abs(psi_a[static_cast<std::size_t>(a % m)] - expected);
        if (d > best.value)
            best = {d, a, y};
    }
    return best;
}

// Exact sup over real y in [1, x]. Each f_a(y) = psi(y;m,a) - y/phi(m)
// decreases between jumps at n = a mod m, so its extremes sit at y = 1, just
// before and just after each jump, and at y = x.
inline ResidueMax residue_sup(std::span<const PrimePower> powers, double x, u64 m)
{
    const double phi = static_cast<double>(euler_phi(m));
    const std::size_t mm = static_cast<std::size_t>(m);
    std::vector<CompensatedSum<double>> psi_a(mm);
    std::vector<double> best(mm, 1.0 / phi);
    std::vector<double> best_y(mm, 1.0);
    auto consider = [&](std::size_t a, double v, double y) {
        if (std::abs(v) > best[a]) {
            best[a] = std::abs(v);
            best_y[a] = y;
        }
    };
    for (const PrimePower& pp : powers) {
        const double n = static_cast<double>(pp.n);
        if (n > x)
            break;
        const std::size_t a = static_cast<std::size_t>(pp.n % m);
        consider(a, psi_a[a].value() - n / phi, n);
        psi_a[a].add(pp.log_p);
        consider(a, psi_a[a].value() - n / phi, n);
    }
    ResidueMax out;
    for (u64 a = 1; a <= m; ++a) {
        if (std::gcd(a, m) != 1)
            continue;
        const std::size_t i = static_cast<std::size_t>(a % m);
        consider(i, psi_a[i].value() - x / phi, x);
        if (best[i] > out.value)
            out = {best[i], a, best_y[i]};
    }
    return out;
}

} // namespace detail

// Sum over moduli of max_{(a,m)=1} |psi(y;m,a) - y/phi(m)|, maximized over
// the y grid (default {x}) or exactly over y <= x, weighted by q in square mode.
inline ErrorSumReport bv_sum(const SieveTables& tables, double x, const ModuliChoice& choice, u64 Q,
                             const ErrorSumOptions& opts = {})
{
    const u64 X = detail::table_floor(tables, x);
    ErrorSumReport r;
    r.kind = choice.square ? ErrorSumKind::bv_square : (choice.set ? ErrorSumKind::bv_general : ErrorSumKind::classical_bv);
    r.x = x;
    r.Q = Q;
    r.set_id = choice.square ? "squares" : (choice.set ? choice.set->id() : "classical");
    r.A = opts.A;
    r.exact_sup = opts.exact_sup;
    if (opts.exact_sup && x > 1e6)
        throw ResourceLimit("exact sup over y is limited to x <= 1e6");
    r.y_grid = opts.y_grid.empty() ? std::vector<double>{x} : opts.y_grid;
    for (double y : r.y_grid)
        if (y > x || y < 0)
            throw InvalidArgument("y grid points must lie in [0, x]");
    const auto moduli = detail::error_moduli(choice, Q);
    const auto powers = prime_powers_upto(tables, X);
    r.rows = parallel_map(moduli.size(), [&](std::size_t i) {
        const auto [q, m] = moduli[i];
        detail::ResidueMax best;
        if (opts.exact_sup) {
            best = detail::residue_sup(powers, x, m);
        } else {
            for (double y : r.y_grid) {
                auto cand = detail::residue_max_at(powers, y, m);
                if (cand.value > best.value)
                    best = cand;
            }
        }
        const double weight = choice.square ? static_cast<double>(q) : 1.0;
        return ErrorRow{q, m, weight * best.value, best.a, best.y};
    });
    detail::finish_report(r);
    const double logA = std::pow(std::log(x), opts.A);
    if (r.kind == ErrorSumKind::bv_general) {
        r.set_count = moduli.size();
        r.normalizer = static_cast<double>(r.set_count) / static_cast<double>(Q) * x / logA;
    } else {
        r.normalizer = x / logA;
    }
    return r;
}

// Exact Vaughan decomposition with F(s) = sum_{r<=U} Lambda(r) r^-s and
// G(s) = sum_{d<=V} mu(d) d^-s:
//   S1 =  sum_{n<=U} Lambda(n) f(n)
//   S2 = -sum_{m<=UV} c(m) sum_{k<=x/m} f(mk),   c(m) = sum_{dr=m, d<=V, r<=U} mu(d) Lambda(r)
//   S3 =  sum_{d<=V} mu(d) sum_{h<=x/d} f(dh) log h
//   S4 = -sum_{U<r<=x/V} Lambda(r) sum_{V<k<=x/r} b(k) f(rk),   b(k) = sum_{d|k, d<=V} mu(d)
struct VaughanDecomposition {
    double x = 0, U = 0, V = 0;
    cplx s1, s2, s3, s4;
    cplx total;     // sum_{n<=x} Lambda(n) f(n), directly
    double residual = 0; // |S1+S2+S3+S4 - total|
    double scale = 0;    // 1 + sum |S_i|
    // |c(m)| <= log m and |b(k)| <= tau(k) on every computed coefficient.
    bool coefficient_bounds_hold = false;
    double type1_limit = 0;    // max(U, V)
    double bilinear_upper = 0; // max(x/V, UV)
    bool ranges_hold = false;

    cplx sum() const { return s1 + s2 + s3 + s4; }
    double relative_residual() const { return residual / scale; }
};

template <typename F>
VaughanDecomposition vaughan_decompose(const SieveTables& tables, double x, double U, double V, F&& f)
{
    if (U < 1 || V < 1)
        throw InvalidArgument("vaughan_decompose: need U >= 1 and V >= 1");
    if (U * V > x)
        throw InvalidArgument("vaughan_decompose: need U*V <= x");
    const u64 X = detail::table_floor(tables, x);
    const u64 Ui = static_cast<u64>(std::floor(U));
    const u64 Vi = static_cast<u64>(std::floor(V));
    auto lam = tables.lambda_table();

    std::vector<cplx> fv(static_cast<std::size_t>(X) + 1);
    for (u64 n = 1; n <= X; ++n)
        fv[n] = cplx(f(n));

    VaughanDecomposition d;
    d.x = x;
    d.U = U;
    d.V = V;
    d.type1_limit = std::max(U, V);
    d.bilinear_upper = std::max(x / V, U * V);

    CompensatedSum<cplx> direct;
    for (u64 n = 2; n <= X; ++n)
        if (lam[n] > 0)
            direct.add(lam[n] * fv[n]);
    d.total = direct.value();

    CompensatedSum<cplx> s1;
    for (u64 n = 2; n <= std::min(Ui, X); ++n)
        if (lam[n] > 0)
            s1.add(lam[n] * fv[n]);
    d.s1 = s1.value();

    bool bounds_ok = true;

    // c(m) for m <= min(UV, X)
    const u64 cmax = std::min(X, Ui * Vi);
    std::vector<CompensatedSum<double>> c_acc(static_cast<std::size_t>(cmax) + 1);
    for (u64 dd = 1; dd <= Vi && dd <= cmax; ++dd) {
        const int mu = tables.mu(dd);
        if (mu == 0)
            continue;
        for (u64 r = 2; r <= Ui && dd * r <= cmax; ++r)
            if (lam[r] > 0)
                c_acc[dd * r].add(mu * lam[r]);
    }
    CompensatedSum<cplx> s2;
    for (u64 m = 1; m <= cmax; ++m) {
        const double c = c_acc[m].value();
        if (c == 0.0)
            continue;
        if (std::abs(c) > std::log(static_cast<double>(m)) * (1 + 1e-12))
            bounds_ok = false;
        CompensatedSum<cplx> inner;
        for (u64 k = 1; k <= X / m; ++k)
            inner.add(fv[m * k]);
        s2.add(-c * inner.value());
    }
    d.s2 = s2.value();

    CompensatedSum<cplx> s3;
    for (u64 dd = 1; dd <= std::min(Vi, X); ++dd) {
        const int mu = tables.mu(dd);
        if (mu == 0)
            continue;
        CompensatedSum<cplx> inner;
        for (u64 h = 2; h <= X / dd; ++h)
            inner.add(std::log(static_cast<double>(h)) * fv[dd * h]);
        s3.add(static_cast<double>(mu) * inner.value());
    }
    d.s3 = s3.value();

    // b(k) for k <= X/(U+1)
    const u64 kmax = X / (Ui + 1);
    std::vector<i64> b(static_cast<std::size_t>(kmax) + 1, 0);
    for (u64 dd = 1; dd <= Vi && dd <= kmax; ++dd) {
        const int mu = tables.mu(dd);
        if (mu == 0)
            continue;
        for (u64 k = dd; k <= kmax; k += dd)
            b[k] += mu;
    }
    for (u64 k = 1; k <= kmax; ++k)
        if (static_cast<u64>(std::llabs(b[k])) > tables.tau(k))
            bounds_ok = false;
    bool ranges_ok = true;
    CompensatedSum<cplx> s4;
    for (u64 r = Ui + 1; r <= X / (Vi + 1); ++r) {
        if (lam[r] <= 0)
            continue;
        if (!(static_cast<double>(r) > U && static_cast<double>(r) <= d.bilinear_upper))
            ranges_ok = false;
        CompensatedSum<cplx> inner;
        for (u64 k = Vi + 1; k <= X / r; ++k)
            if (b[k] != 0)
                inner.add(static_cast<double>(b[k]) * fv[r * k]);
        s4.add(-lam[r] * inner.value());
    }
    d.s4 = s4.value();

    d.coefficient_bounds_hold = bounds_ok;
    d.ranges_hold = ranges_ok && static_cast<double>(cmax) <= U * V;
    d.residual = std::abs(d.sum() - d.total);
    d.scale = 1.0 + std::abs(d.s1) + std::abs(d.s2) + std::abs(d.s3) + std::abs(d.s4);
    return d;
}

struct PhiSquareSum {
    u64 y = 0;
    double sum = 0;  // sum_{y<q<=2y} 1/phi(q^2)
    double main = 0; // 1/(2 zeta(2) y)
    double error = 0;
    // zeta(2) zeta(3) / (2 zeta(6) y): the constant the sum actually tends to,
    // since 1/(q phi(q)) = q^-2 sum_{d|q} mu(d)^2/phi(d).
    double main_corrected = 0;
};


inline PhiSquareSum phi_square_sum(u64 y)
{
    if (y == 0)
        throw InvalidArgument("phi_square_sum: y must be >= 1");
    const u64 top = checked_mul(2, y, "2y");
    std::vector<u64> phi(static_cast<std::size_t>(top) + 1);
    std::iota(phi.begin(), phi.end(), u64{0});
    for (u64 p = 2; p <= top; ++p)
        if (phi[p] == p)
            for (u64 k = p; k <= top; k += p)
                phi[k] -= phi[k] / p;
    CompensatedSum<double> acc;
    for (u64 q = y + 1; q <= top; ++q)
        acc.add(1.0 / static_cast<double>(checked_mul(q, phi[q], "q*phi(q)")));
    PhiSquareSum r;
    r.y = y;
    r.sum = acc.value();
    r.main = 1.0 / (2.0 * kZeta2 * static_cast<double>(y));
    r.error = r.sum - r.main;
    r.main_corrected = kZeta2 * kZeta3 / (2.0 * kZeta6 * static_cast<double>(y));
    return r;
}

} // namespace sievelab
