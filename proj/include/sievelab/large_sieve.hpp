#pragma once

// Both sides of the large-sieve inequalities: Farey-point energies over
// sparse moduli windows, primitive-character energies, the truncated
// bilinear form, and the candidate right-hand sides they are compared to.
// All "<<" bounds are evaluated with implied constant 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sievelab/arithmetic.hpp"
#include "sievelab/dirichlet.hpp"
#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/sparse_sets.hpp"

namespace sievelab {

enum class SeqKind { all_ones, single_spike, random_unit, random_gaussian, zero, user };

inline const char* to_string(SeqKind k)
{
    switch (k) {
    case SeqKind::all_ones: return "all-ones";
    case SeqKind::single_spike: return "single-spike";
    case SeqKind::random_unit: return "random-unit";
    case SeqKind::random_gaussian: return "random-gaussian";
    case SeqKind::zero: return "zero";
    case SeqKind::user: return "user";
    }
    return "?";
}

inline SeqKind parse_seq_kind(const std::string& s)
{
    for (SeqKind k : {SeqKind::all_ones, SeqKind::single_spike, SeqKind::random_unit, SeqKind::random_gaussian,
                      SeqKind::zero, SeqKind::user})
        if (s == to_string(k))
            return k;
    throw InvalidArgument("unknown sequence kind '" + s + "'");
}

// a_n for n = offset+1 .. offset+N.
struct CoeffSequence {
    i64 offset = 0;
    std::vector<cplx> values;
    SeqKind kind = SeqKind::user;
    std::optional<u64> seed;

    u64 length() const noexcept { return values.size(); }
    i64 index_of(std::size_t i) const noexcept { return offset + 1 + static_cast<i64>(i); }

    double norm() const
    {
        CompensatedSum<double> z;
        for (const cplx& v : values)
            z.add(std::norm(v));
        return z.value();
    }
};

namespace detail {
// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }
} // namespace detail

inline CoeffSequence all_ones_sequence(u64 N, i64 M = 0)
{
    return {M, std::vector<cplx>(static_cast<std::size_t>(N), cplx{1.0, 0.0}), SeqKind::all_ones, std::nullopt};
}

inline CoeffSequence zero_sequence(u64 N, i64 M = 0)
{
    return {M, std::vector<cplx>(static_cast<std::size_t>(N)), SeqKind::zero, std::nullopt};
}

// a_{n0} = 1, all other a_n = 0. n0 must lie in (M, M+N].
inline CoeffSequence spike_sequence(u64 N, i64 n0, i64 M = 0)
{
    if (n0 <= M || n0 > M + static_cast<i64>(N))
        throw InvalidArgument("spike position outside (M, M+N]");
    CoeffSequence s = zero_sequence(N, M);
    s.kind = SeqKind::single_spike;
    s.values[static_cast<std::size_t>(n0 - M - 1)] = 1.0;
    return s;
}

inline CoeffSequence random_unit_sequence(u64 N, u64 seed, i64 M = 0)
{
    std::mt19937_64 rng(seed);
    CoeffSequence s{M, {}, SeqKind::random_unit, seed};
    s.values.reserve(static_cast<std::size_t>(N));
    for (u64 i = 0; i < N; ++i) {
        const double angle = kTwoPi * detail::unit_uniform(rng);
        s.values.emplace_back(std::cos(angle), std::sin(angle));
    }
    return s;
}

// Standard complex Gaussian entries (re, im ~ N(0,1)) by Box-Muller.
inline CoeffSequence random_gaussian_sequence(u64 N, u64 seed, i64 M = 0)
{
    std::mt19937_64 rng(seed);
    CoeffSequence s{M, {}, SeqKind::random_gaussian, seed};
    s.values.reserve(static_cast<std::size_t>(N));
    for (u64 i = 0; i < N; ++i) {
        const double u1 = detail::unit_uniform(rng);
        const double u2 = detail::unit_uniform(rng);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        s.values.emplace_back(r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2));
    }
    return s;
}

// Factory keyed by tag; spikes sit at n = M+1.
inline CoeffSequence make_sequence(SeqKind kind, u64 N, u64 seed, i64 M = 0)
{
    switch (kind) {
    case SeqKind::all_ones: return all_ones_sequence(N, M);
    case SeqKind::single_spike: return spike_sequence(N, M + 1, M);
    case SeqKind::random_unit: return random_unit_sequence(N, seed, M);
    case SeqKind::random_gaussian: return random_gaussian_sequence(N, seed, M);
    case SeqKind::zero: return zero_sequence(N, M);
    case SeqKind::user: break;
    }
    throw InvalidArgument("user sequences carry explicit values; no factory");
}

namespace detail {

// c_r = sum_{n = r mod q} a_n.
inline std::vector<cplx> fold_mod(const CoeffSequence& seq, u64 q)
{
    std::vector<CompensatedSum<cplx>> acc(static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < seq.values.size(); ++i)
        acc[static_cast<std::size_t>(mod_floor(seq.index_of(i), q))].add(seq.values[i]);
    std::vector<cplx> out(acc.size());
    for (std::size_t r = 0; r < acc.size(); ++r)
        out[r] = acc[r].value();
    return out;
}

inline double checked_window_t(u64 Q, u64 t)
{
    if (t == 0 || t > Q)
        throw InvalidArgument("need 1 <= t <= Q");
    return static_cast<double>(Q) / static_cast<double>(t);
}

} // namespace detail

// sum_{a mod q, (a,q)=1} |sum_n a_n e(an/q)|^2 for one modulus.
inline double farey_energy(const CoeffSequence& seq, u64 q)
{
    const auto c = detail::fold_mod(seq, q);
    std::vector<cplx> roots(static_cast<std::size_t>(q));
    for (u64 k = 0; k < q; ++k)
        roots[k] = unit_root(k, q);
    std::vector<u64> support; // at most N residues carry mass
    for (u64 r = 0; r < q; ++r)
        if (c[r] != cplx{})
            support.push_back(r);
    CompensatedSum<double> total;
    for (u64 a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1)
            continue;
        CompensatedSum<cplx> s;
        for (u64 r : support)
            s.add(c[r] * roots[static_cast<std::size_t>(a % q * r % q)]);
        total.add(std::norm(s.value()));
    }
    return total.value();
}

// (q/phi(q)) sum over primitive chi mod q of |sum_n a_n chi(n)|^2.
inline double primitive_energy(const CoeffSequence& seq, u64 q)
{
    const CharacterGroup G(q);
    const auto c = detail::fold_mod(seq, q);
    CompensatedSum<double> total;
    for (const Character& chi : G.characters()) {
        if (!chi.is_primitive())
            continue;
        CompensatedSum<cplx> s;
        for (u64 r = 0; r < q; ++r)
            if (c[r] != cplx{})
                s.add(c[r] * chi(static_cast<i64>(r)));
        total.add(std::norm(s.value()));
    }
    return static_cast<double>(q) / static_cast<double>(G.size()) * total.value();
}

struct EnergyBreakdown {
    std::vector<u64> moduli;
    std::vector<double> per_modulus;
    double total = 0;
};

template <typename PerModulus>
EnergyBreakdown energy_over(std::vector<u64> moduli, PerModulus&& per_modulus)
{
    EnergyBreakdown out;
    out.per_modulus = parallel_map(moduli.size(), [&](std::size_t i) { return per_modulus(moduli[i]); });
    out.total = compensated_total<double>(out.per_modulus);
    out.moduli = std::move(moduli);
    return out;
}

inline double additive_lhs(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& seq)
{
    detail::checked_window_t(Q, t);
    return energy_over(moduli_window(S, Q, t), [&](u64 q) { return farey_energy(seq, q); }).total;
}

inline double multiplicative_lhs(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& seq)
{
    detail::checked_window_t(Q, t);
    return energy_over(moduli_window(S, Q, t), [&](u64 q) { return primitive_energy(seq, q); }).total;
}

// Delta(Y, Q, t) = Y + (Q/t)(QY)^eps (sqrt(Y) + |S_t(Q/t)|).
inline double sieve_delta(double Y, u64 Q, u64 t, u64 window_size, double eps)
{
    const double Qd = static_cast<double>(Q);
    return Y + Qd / static_cast<double>(t) * std::pow(Qd * Y, eps) * (std::sqrt(Y) + static_cast<double>(window_size));
}

struct BilinearOptions {
    u64 work_budget = 10'000'000; // ceiling on M*N
};

// Sum over q in S_t(Q/t) of (q/phi(q)) sum over primitive chi of
// max_X |sum_{m<=M, n<=N, mn<=X} a_m b_n chi(mn)|. The max is exact: the
// partial sums only change at the distinct products mn.
inline double bilinear_maxX_lhs(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& a, const CoeffSequence& b,
                                const BilinearOptions& opts = {})
{
    detail::checked_window_t(Q, t);
    if (a.offset != 0 || b.offset != 0)
        throw InvalidArgument("bilinear sequences are indexed from 1 (offset 0)");
    const u64 M = a.length(), N = b.length();
    if (M == 0 || N == 0)
        throw InvalidArgument("bilinear sequences must be non-empty");
    u64 work;
    if (__builtin_mul_overflow(M, N, &work) || work > opts.work_budget)
        throw ResourceLimit("bilinear form: M*N exceeds work budget of " + std::to_string(opts.work_budget));

    struct Term {
        u64 product;
        std::uint32_t m, n;
    };
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(work));
    for (u64 m = 1; m <= M; ++m)
        for (u64 n = 1; n <= N; ++n)
            if (a.values[m - 1] != cplx{} && b.values[n - 1] != cplx{})
                terms.push_back({m * n, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n)});
    std::sort(terms.begin(), terms.end(),
              [](const Term& x, const Term& y) { return x.product != y.product ? x.product < y.product : x.m < y.m; });

    auto per_q = [&](u64 q) {
        const CharacterGroup G(q);
        const u64 L = G.principal().phase_denominator();
        CompensatedSum<double> weighted;
        std::vector<i64> pa(M + 1), pb(N + 1);
        std::vector<cplx> roots(static_cast<std::size_t>(L));
        for (u64 k = 0; k < L; ++k)
            roots[k] = unit_root(k, L);
        for (const Character& chi : G.characters()) {
            if (!chi.is_primitive())
                continue;
            for (u64 m = 1; m <= M; ++m) {
                auto k = chi.phase(static_cast<i64>(m));
                pa[m] = k ? static_cast<i64>(*k) : -1;
            }
            for (u64 n = 1; n <= N; ++n) {
                auto k = chi.phase(static_cast<i64>(n));
                pb[n] = k ? static_cast<i64>(*k) : -1;
            }
            CompensatedSum<cplx> partial;
            double best = 0.0;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const Term& tm = terms[i];
                if (pa[tm.m] >= 0 && pb[tm.n] >= 0)
                    partial.add(a.values[tm.m - 1] * b.values[tm.n - 1] *
                                roots[static_cast<std::size_t>((pa[tm.m] + pb[tm.n]) % static_cast<i64>(L))]);
                if (i + 1 == terms.size() || terms[i + 1].product != tm.product)
                    best = std::max(best, std::abs(partial.value()));
            }
            weighted.add(best);
        }
        return static_cast<double>(q) / static_cast<double>(G.size()) * weighted.value();
    };
    return energy_over(moduli_window(S, Q, t), per_q).total;
}

// log(2MN) (Delta(M,Q,t) Delta(N,Q,t) Z_a Z_b)^(1/2) with constant 1.
inline double bilinear_bound(u64 Q, u64 t, u64 window_size, const CoeffSequence& a, const CoeffSequence& b, double eps)
{
    const double M = static_cast<double>(a.length()), N = static_cast<double>(b.length());
    return std::log(2.0 * M * N) *
           std::sqrt(sieve_delta(M, Q, t, window_size, eps) * sieve_delta(N, Q, t, window_size, eps) * a.norm() *
                     b.norm());
}

struct ClassicalCheck {
    double lhs;
    double rhs; // (Q^2 + N) sum |a_n|^2
    bool holds;
};

// sum_{q<=Q} (q/phi(q)) sum* |sum a_n chi(n)|^2 <= (Q^2+N) Z, checked with
// 1e-6 relative slack for rounding.
inline ClassicalCheck classical_ls_check(u64 Q, const CoeffSequence& seq)
{
    if (Q == 0)
        throw InvalidArgument("classical_ls_check: Q must be >= 1");
    std::vector<u64> moduli(static_cast<std::size_t>(Q));
    std::iota(moduli.begin(), moduli.end(), u64{1});
    const double lhs = energy_over(std::move(moduli), [&](u64 q) { return primitive_energy(seq, q); }).total;
    const double Qd = static_cast<double>(Q);
    const double rhs = (Qd * Qd + static_cast<double>(seq.length())) * seq.norm();
    return {lhs, rhs, lhs <= rhs * (1.0 + 1e-6)};
}

// Q^eps (Q/t |S_t(Q/t)| + N) Z for S = squares.
inline double conjecture_bound(u64 Q, u64 t, u64 window_size, const CoeffSequence& seq, double eps)
{
    const double Qd = static_cast<double>(Q);
    return std::pow(Qd, eps) *
           (Qd / static_cast<double>(t) * static_cast<double>(window_size) + static_cast<double>(seq.length())) *
           seq.norm();
}

// (N + (Q/t)(QN)^eps (sqrt(N) + |S_t(Q/t)|)) Z.
inline double sparse_bound(u64 Q, u64 t, u64 window_size, const CoeffSequence& seq, double eps)
{
    return sieve_delta(static_cast<double>(seq.length()), Q, t, window_size, eps) * seq.norm();
}

inline double safe_ratio(double lhs, double bound)
{
    if (bound > 0)
        return lhs / bound;
    return lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// additive_lhs over the squares window divided by the conjectured bound.
inline double conjecture_ratio(u64 Q, u64 t, const CoeffSequence& seq, double eps)
{
    detail::checked_window_t(Q, t);
    const ModuliSet squares = squares_set();
    const u64 window = moduli_window(squares, Q, t).size();
    return safe_ratio(additive_lhs(squares, Q, t, seq), conjecture_bound(Q, t, window, seq, eps));
}

struct SieveRatioExperiment {
    std::string experiment;
    std::string moduli; // set id or "classical 1..Q"
    u64 Q = 0;
    u64 t = 1;
    u64 moduli_count = 0;
    double eps = 0;
    SeqKind seq_kind = SeqKind::user;
    i64 offset = 0;
    u64 N = 0;
    std::optional<u64> seed;
    double lhs = 0;
    std::map<std::string, double> bounds;
    std::map<std::string, double> ratios;

    void add_bound(const std::string& name, double value)
    {
        bounds[name] = value;
        ratios[name] = safe_ratio(lhs, value);
    }
};

namespace detail {
inline SieveRatioExperiment experiment_header(std::string name, const ModuliSet& S, u64 Q, u64 t,
                                              const CoeffSequence& seq, double eps)
{
    SieveRatioExperiment e;
    e.experiment = std::move(name);
    e.moduli = S.id();
    e.Q = Q;
    e.t = t;
    e.eps = eps;
    e.seq_kind = seq.kind;
    e.offset = seq.offset;
    e.N = seq.length();
    e.seed = seq.seed;
    return e;
}
} // namespace detail

// Additive (Farey) energy against the classical, sparse and, for squares,
// conjectured bounds.
inline SieveRatioExperiment additive_experiment(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& seq, double eps)
{
    auto e = detail::experiment_header("additive", S, Q, t, seq, eps);
    detail::checked_window_t(Q, t);
    const auto window = moduli_window(S, Q, t);
    e.moduli_count = window.size();
    e.lhs = additive_lhs(S, Q, t, seq);
    const double Qd = static_cast<double>(Q);
    e.add_bound("classical", (Qd * Qd + static_cast<double>(seq.length())) * seq.norm());
    e.add_bound("sparse", sparse_bound(Q, t, window.size(), seq, eps));
    if (S.kind() == SetKind::squares)
        e.add_bound("conjecture", conjecture_bound(Q, t, window.size(), seq, eps));
    return e;
}

inline SieveRatioExperiment multiplicative_experiment(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& seq,
                                                      double eps)
{
    auto e = detail::experiment_header("multiplicative", S, Q, t, seq, eps);
    detail::checked_window_t(Q, t);
    const auto window = moduli_window(S, Q, t);
    e.moduli_count = window.size();
    e.lhs = multiplicative_lhs(S, Q, t, seq);
    const double Qd = static_cast<double>(Q);
    e.add_bound("classical", (Qd * Qd + static_cast<double>(seq.length())) * seq.norm());
    e.add_bound("sparse", sparse_bound(Q, t, window.size(), seq, eps));
    return e;
}

inline SieveRatioExperiment bilinear_experiment(const ModuliSet& S, u64 Q, u64 t, const CoeffSequence& a,
                                                const CoeffSequence& b, double eps, const BilinearOptions& opts = {})
{
    auto e = detail::experiment_header("bilinear", S, Q, t, b, eps);
    detail::checked_window_t(Q, t);
    const auto window = moduli_window(S, Q, t);
    e.moduli_count = window.size();
    e.lhs = bilinear_maxX_lhs(S, Q, t, a, b, opts);
    e.add_bound("sparse", bilinear_bound(Q, t, window.size(), a, b, eps));
    return e;
}

} // namespace sievelab
