#pragma once

// Sparse moduli sets S, their dilates S_t = {q : qt in S}, dyadic windows
// S_t(R) = {q in S_t : R < q <= 2R}, and empirical scans of the
// well-distribution and density hypotheses on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sievelab/errors.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

enum class SetKind { squares, all, squarefree, explicit_list };

inline const char* to_string(SetKind k)
{
    switch (k) {
    case SetKind::squares: return "squares";
    case SetKind::all: return "all";
    case SetKind::squarefree: return "squarefree";
    case SetKind::explicit_list: return "explicit-list";
    }
    return "?";
}

class ModuliSet {
public:
    using Contains = std::function<bool(u64)>;
    // Members in (a, b], strictly increasing.
    using Enumerate = std::function<std::vector<u64>(u64, u64)>;

    ModuliSet(std::string id, SetKind kind, Contains contains, Enumerate enumerate)
        : id_(std::move(id)), kind_(kind), contains_(std::move(contains)), enumerate_(std::move(enumerate))
    {
    }

    const std::string& id() const noexcept { return id_; }
    SetKind kind() const noexcept { return kind_; }
    bool contains(u64 n) const { return n >= 1 && contains_(n); }
    std::vector<u64> enumerate(u64 a, u64 b) const
    {
        if (b <= a)
            return {};
        return enumerate_(a, b);
    }

private:
    std::string id_;
    SetKind kind_;
    Contains contains_;
    Enumerate enumerate_;
};

inline ModuliSet squares_set()
{
    return ModuliSet(
        "squares", SetKind::squares, [](u64 n) { return is_square(n); },
        [](u64 a, u64 b) {
            std::vector<u64> out;
            for (u64 m = isqrt(a) + 1; m <= isqrt(b); ++m)
                out.push_back(m * m);
            return out;
        });
}

inline ModuliSet all_naturals()
{
    return ModuliSet(
        "all", SetKind::all, [](u64) { return true; },
        [](u64 a, u64 b) {
            std::vector<u64> out(static_cast<std::size_t>(b - a));
            std::iota(out.begin(), out.end(), a + 1);
            return out;
        });
}

namespace detail {
inline bool is_squarefree(u64 n)
{
    for (u64 p = 2; p <= n / p; ++p) {
        if (n % (p * p) == 0)
            return false;
        if (n % p == 0)
            n /= p;
    }
    return true;
}
} // namespace detail

inline ModuliSet squarefree_set()
{
    return ModuliSet(
        "squarefree", SetKind::squarefree, [](u64 n) { return detail::is_squarefree(n); },
        [](u64 a, u64 b) {
            const std::size_t len = static_cast<std::size_t>(b - a);
            std::vector<bool> hit(len, false);
            for (u64 d = 2; d <= b / d; ++d) {
                const u64 d2 = d * d;
                for (u64 n = (a / d2 + 1) * d2; n <= b; n += d2)
                    hit[static_cast<std::size_t>(n - a - 1)] = true;
            }
            std::vector<u64> out;
            for (std::size_t i = 0; i < len; ++i)
                if (!hit[i])
                    out.push_back(a + 1 + i);
            return out;
        });
}

// members must be strictly increasing and >= 1.
inline ModuliSet explicit_set(std::vector<u64> members, std::string id = "explicit")
{
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i] == 0)
            throw InvalidArgument("explicit set members must be >= 1");
        if (i > 0 && members[i] <= members[i - 1])
            throw InvalidArgument("explicit set members must be strictly increasing");
    }
    auto shared = std::make_shared<const std::vector<u64>>(std::move(members));
    return ModuliSet(
        std::move(id), SetKind::explicit_list,
        [shared](u64 n) { return std::binary_search(shared->begin(), shared->end(), n); },
        [shared](u64 a, u64 b) {
            auto lo = std::upper_bound(shared->begin(), shared->end(), a);
            auto hi = std::upper_bound(shared->begin(), shared->end(), b);
            return std::vector<u64>(lo, hi);
        });
}

// One natural per line, strictly ascending. Blank lines are skipped; any
// other malformed line is reported with its 1-based line number.
inline ModuliSet load_explicit_set(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open moduli list: " + path.string());
    std::vector<u64> members;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        auto last = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(first, last - first + 1);
        auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
        if (!std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) || tok.size() > 19)
            throw InvalidArgument(where() + "expected a natural number, got '" + tok + "'");
        const u64 v = std::stoull(tok);
        if (v == 0)
            throw InvalidArgument(where() + "members must be >= 1");
        if (!members.empty() && v <= members.back())
            throw InvalidArgument(where() + "values must be strictly ascending");
        members.push_back(v);
    }
    return explicit_set(std::move(members), "file:" + path.string());
}

// S_t for a fixed dilation t.
class DerivedSet {
public:
    DerivedSet(ModuliSet base, u64 t) : base_(std::move(base)), t_(t)
    {
        if (t == 0)
            throw InvalidArgument("derived set: t must be >= 1");
    }

    const ModuliSet& base() const noexcept { return base_; }
    u64 t() const noexcept { return t_; }

    bool contains(u64 q) const
    {
        u64 qt;
        if (__builtin_mul_overflow(q, t_, &qt))
            return false;
        return base_.contains(qt);
    }

    // Members q of S_t in (a, b].
    std::vector<u64> enumerate(u64 a, u64 b) const
    {
        std::vector<u64> out;
        for (u64 n : base_.enumerate(checked_mul(a, t_, "derived window"), checked_mul(b, t_, "derived window")))
            if (n % t_ == 0)
                out.push_back(n / t_);
        return out;
    }

    // S_t viewed as a set in its own right, so it can be dilated again.
    ModuliSet as_set() const
    {
        auto self = std::make_shared<const DerivedSet>(*this);
        return ModuliSet(
            base_.id() + "/" + std::to_string(t_), base_.kind(), [self](u64 q) { return self->contains(q); },
            [self](u64 a, u64 b) { return self->enumerate(a, b); });
    }

private:
    ModuliSet base_;
    u64 t_;
};

// S_t(Q/t) = {q : Q < qt <= 2Q, qt in S}, exact for integer Q and t.
inline std::vector<u64> moduli_window(const ModuliSet& S, u64 Q, u64 t)
{
    if (t == 0)
        throw InvalidArgument("moduli_window: t must be >= 1");
    std::vector<u64> out;
    for (u64 n : S.enumerate(Q, checked_mul(2, Q, "2Q")))
        if (n % t == 0)
            out.push_back(n / t);
    return out;
}

// |S(Q)| with S(Q) = S cap (Q, 2Q].
inline u64 dyadic_count(const ModuliSet& S, u64 Q) { return moduli_window(S, Q, 1).size(); }

inline u64 count_in_progression(const DerivedSet& D, double x, double y, u64 k, u64 l)
{
    if (k == 0)
        throw InvalidArgument("count_in_progression: k must be >= 1");
    if (y < 0)
        throw InvalidArgument("count_in_progression: y must be >= 0");
    if (std::gcd(k, l) != 1)
        throw InvalidArgument("count_in_progression: gcd(k, l) must be 1");
    const double lo_real = std::max(1.0, std::ceil(x));
    const double hi_real = std::floor(x + y);
    if (hi_real < lo_real)
        return 0;
    const u64 lo = static_cast<u64>(lo_real);
    const u64 hi = static_cast<u64>(hi_real);
    const u64 target = l % k;
    u64 count = 0;
    for (u64 q : D.enumerate(lo - 1, hi))
        if (q % k == target)
            ++count;
    return count;
}

struct WellDistReport {
    u64 t = 0;
    u64 R = 0;
    u64 k = 0;
    u64 l = 0;
    double x = 0; // window [x, x+y] attaining the max ratio
    double y = 0;
    u64 observed = 0;
    u64 window_size = 0; // |S_t(R)|
    double majorant = 0; // (|S_t(R)| y/(kR) + 1)(Rt)^eps
    double ratio = 0;
};

struct WellDistScan {
    double eps = 0;
    std::vector<WellDistReport> reports; // ordered by (t, R, k, l)
    double max_ratio = 0;
};

// Windows per (t, R): lengths y = R/2^j (j = 0..3, y >= 1), starts x = R + i*y/2
// while x + y <= 2R. Every coprime residue l mod k for k <= k_max is tried.
inline WellDistScan well_distribution_scan(const ModuliSet& S, const std::vector<u64>& R_list,
                                           const std::vector<u64>& t_list, u64 k_max, double eps = 0.1)
{
    if (!(eps > 0))
        throw InvalidArgument("well_distribution_scan: eps must be positive");
    if (k_max == 0)
        throw InvalidArgument("well_distribution_scan: k_max must be >= 1");
    std::vector<std::pair<u64, u64>> grid;
    for (u64 t : t_list)
        for (u64 R : R_list) {
            if (t == 0 || R == 0)
                throw InvalidArgument("well_distribution_scan: t and R must be >= 1");
            grid.emplace_back(t, R);
        }

    auto per_cell = parallel_map(grid.size(), [&](std::size_t gi) {
        const auto [t, R] = grid[gi];
        const DerivedSet D(S, t);
        const std::vector<u64> closed = D.enumerate(R - 1, 2 * R); // [R, 2R]
        const u64 window = static_cast<u64>(closed.end() - std::upper_bound(closed.begin(), closed.end(), R));
        const double scale = std::pow(static_cast<double>(R) * static_cast<double>(t), eps);

        std::vector<std::pair<double, double>> windows;
        for (int j = 0; j <= 3; ++j) {
            const double y = static_cast<double>(R) / static_cast<double>(1 << j);
            if (y < 1.0)
                break;
            for (double x = static_cast<double>(R); x + y <= 2.0 * static_cast<double>(R); x += y / 2.0)
                windows.emplace_back(x, y);
        }

        std::vector<WellDistReport> out;
        std::vector<u64> residue_members;
        for (u64 k = 1; k <= k_max; ++k) {
            for (u64 l = 0; l < k; ++l) {
                if (std::gcd(k, l) != 1)
                    continue;
                residue_members.clear();
                for (u64 q : closed)
                    if (q % k == l % k)
                        residue_members.push_back(q);
                WellDistReport best{t, R, k, l, 0, 0, 0, window, 0, -1.0};
                for (const auto& [x, y] : windows) {
                    const u64 lo = static_cast<u64>(std::ceil(x));
                    const u64 hi = static_cast<u64>(std::floor(x + y));
                    const u64 observed = static_cast<u64>(
                        std::upper_bound(residue_members.begin(), residue_members.end(), hi) -
                        std::lower_bound(residue_members.begin(), residue_members.end(), lo));
                    const double majorant =
                        (static_cast<double>(window) * y / (static_cast<double>(k) * static_cast<double>(R)) + 1.0) *
                        scale;
                    const double ratio = static_cast<double>(observed) / majorant;
                    if (ratio > best.ratio)
                        best = {t, R, k, l, x, y, observed, window, majorant, ratio};
                }
                out.push_back(best);
            }
        }
        return out;
    });

    WellDistScan scan;
    scan.eps = eps;
    for (auto& cell : per_cell)
        for (auto& r : cell) {
            scan.max_ratio = std::max(scan.max_ratio, r.ratio);
            scan.reports.push_back(r);
        }
    return scan;
}

// |S_q(Q/q)| q^eps / |S(Q)|: the constant the hypothesis on S_q needs here.
inline double condition_23_ratio(const ModuliSet& S, u64 Q, u64 q, double eps)
{
    if (q < 1 || q > Q)
        throw InvalidArgument("condition_23_ratio: need 1 <= q <= Q");
    const u64 total = dyadic_count(S, Q);
    if (total == 0)
        throw DegenerateInput("condition_23_ratio: |S(Q)| = 0, ratio undefined");
    const u64 part = moduli_window(S, Q, q).size();
    return static_cast<double>(part) * std::pow(static_cast<double>(q), eps) / static_cast<double>(total);
}

struct DensityRow {
    u64 Q;
    u64 count; // |S(Q)|
    double per_sqrt;
    double per_three_quarters;
};

inline std::vector<DensityRow> condition_24_check(const ModuliSet& S, const std::vector<u64>& Q_list)
{
    if (Q_list.empty())
        throw InvalidArgument("condition_24_check: Q list is empty");
    std::vector<DensityRow> rows;
    for (u64 Q : Q_list) {
        if (Q == 0)
            throw InvalidArgument("condition_24_check: Q must be >= 1");
        const u64 c = dyadic_count(S, Q);
        const double qd = static_cast<double>(Q);
        rows.push_back({Q, c, static_cast<double>(c) / std::sqrt(qd), static_cast<double>(c) / std::pow(qd, 0.75)});
    }
    return rows;
}

} // namespace sievelab
