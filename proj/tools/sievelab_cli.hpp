#pragma once

// Command-line front end: one subcommand per experiment. Output is a JSON
// document, a CSV table, or a plain-text listing; identical flags give
// byte-identical output regardless of --threads.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sievelab.hpp"

namespace sievelab::cli {

struct RunConfig {
    std::string subcommand;
    u64 x_max = 0; // 0: derived from the experiment
    std::string format = "json";
    std::string out;
    u64 seed = 1;
    unsigned threads = 1;

    double x = 1e5;
    u64 Q = 10;
    u64 qmax = 0; // 0: floor(x^(2/9)) for bv-square, floor(x^(1/2)) for bdh-square
    u64 t = 1;
    u64 y = 100;
    u64 N = 50;
    u64 M = 0;
    i64 offset = 0;
    double eps = 0.1;
    double A = 2.0;
    double theta = 5.0 / 9.0;
    double U = 3;
    double V = 3;
    u64 q = 1;
    std::optional<u64> chi_index;
    u64 k_max = 6;
    u64 trials = 1;
    std::string set;
    std::string seq = "random-unit";
    std::string form = "additive";
    std::vector<u64> R_list;
    std::vector<u64> t_list;
    std::vector<double> y_grid;
    u64 y_log_points = 0;
    bool exact = false;
    std::string cache;
};

// What a subcommand produced: a JSON summary and optionally a row table.
struct Output {
    json summary;
    std::optional<Table> table;
};

namespace detail {

inline std::filesystem::path cache_path(const std::string& dir, u64 x_max)
{
    return std::filesystem::path(dir) / ("sievelab_" + std::to_string(x_max) + ".slab");
}

// Loads from $SIEVELAB_CACHE when a matching file exists, else builds (and
// stores the result there when the variable is set).
inline SieveTables obtain_tables(u64 x_max)
{
    const char* dir = std::getenv("SIEVELAB_CACHE");
    if (dir && *dir) {
        const auto path = cache_path(dir, x_max);
        if (auto cached = load_tables(path, x_max))
            return std::move(*cached);
        auto built = build_tables(x_max);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        save_tables(built, path);
        return built;
    }
    return build_tables(x_max);
}

inline u64 needed(const RunConfig& c, u64 minimum) { return c.x_max ? c.x_max : std::max<u64>(minimum, 2); }

inline u64 x_floor(double x)
{
    if (!(x >= 1))
        throw InvalidArgument("--x must be >= 1");
    return static_cast<u64>(std::floor(x));
}

inline ModuliSet resolve_set(const std::string& name)
{
    if (name == "squares")
        return squares_set();
    if (name == "all")
        return all_naturals();
    if (name == "squarefree")
        return squarefree_set();
    if (name.rfind("file:", 0) == 0)
        return load_explicit_set(name.substr(5));
    throw InvalidArgument("--set must be squares, all, squarefree or file:PATH (got '" + name + "')");
}

inline json metadata(const RunConfig& c, const std::string& anchor, json params)
{
    return json{{"experiment", c.subcommand}, {"paper_anchor", anchor}, {"params", std::move(params)}, {"seed", c.seed}};
}

inline CoeffSequence sequence_for(const RunConfig& c, const std::string& kind, u64 N, u64 seed)
{
    if (N == 0)
        throw InvalidArgument("--N must be >= 1");
    return make_sequence(parse_seq_kind(kind), N, seed, c.offset);
}

inline void put(Output& o, json body)
{
    for (auto& [k, v] : body.items())
        o.summary[k] = v;
}

} // namespace detail

// ------------------------------------------------------------ anchors/help

inline const std::map<std::string, std::string>& anchors()
{
    static const std::map<std::string, std::string> a = {
        {"sieve-build", "von Mangoldt, Euler phi, Moebius, divisor and squarefree-kernel tables"},
        {"char-table", "Dirichlet characters mod q: conductors, primitivity and Gauss sums"},
        {"ls-classical",
         "classical large sieve for primitive characters: sum_{q<=Q} q/phi(q) sum* |sum a_n chi(n)|^2 <= (Q^2+N) Z"},
        {"ls-sparse", "large sieve over S_t(Q/t): additive (Farey) or multiplicative (primitive characters) form"},
        {"ls-bilinear",
         "bilinear large sieve max_X |sum_{mn<=X} a_m b_n chi(mn)| against log(2MN)(Delta(M)Delta(N)Z_a Z_b)^(1/2)"},
        {"ls-conjecture", "conjectured square-moduli large sieve Q^eps (Q/t |S_t(Q/t)| + N) Z"},
        {"bdh", "Barban-Davenport-Halberstam mean square over q in S(Q) (or q <= Q without --set)"},
        {"bdh-square", "Barban-Davenport-Halberstam mean square over square moduli q^2 with weight q"},
        {"bv", "Bombieri-Vinogradov sum of max_a |psi(y;q,a) - y/phi(q)| over q in S(Q) (or q <= Q without --set)"},
        {"bv-square", "Bombieri-Vinogradov sum over square moduli q^2 with weight q, q <= x^(2/9)"},
        {"vaughan-check", "Vaughan identity: exact four-part decomposition of sum_{n<=x} Lambda(n) f(n)"},
        {"phi-sum", "sum_{y<q<=2y} 1/phi(q^2) against 1/(2 zeta(2) y)"},
        {"well-dist", "well-distribution of S_t in short progressions against (|S_t(R)| y/(kR) + 1)(Rt)^eps"},
        {"census-am2", "primes p = a m^2 + 1 with a = s(p-1) <= p^theta"},
        {"weighted-sum", "sum_{x<n<=2x} Lambda(n+1) #{y<q<=2y : q^2 | n} against x/(2 zeta(2) y)"},
        {"sparsity", "#{n <= x : s(n) <= n^theta} via n = a m^2, a squarefree"},
    };
    return a;
}

// ----------------------------------------------------------- subcommands

namespace commands {

inline Output sieve_build(const RunConfig& c)
{
    if (c.x_max == 0)
        throw InvalidArgument("--xmax is required");
    const SieveTables tables = detail::obtain_tables(c.x_max);
    if (!c.cache.empty())
        save_tables(tables, c.cache);
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"xmax", c.x_max}}), std::nullopt};
    detail::put(o, {{"prime_count", tables.primes().size()},
                    {"largest_prime", tables.primes().empty() ? 0 : tables.primes().back()},
                    {"psi_xmax", real(psi(tables, static_cast<double>(c.x_max)))}});
    return o;
}

inline Output char_table(const RunConfig& c)
{
    const CharacterGroup G(c.q);
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"q", c.q}}), Table{}};
    json gens = json::array();
    for (const auto& g : G.generators())
        gens.push_back({{"residue", g.residue}, {"order", g.order}});
    detail::put(o, {{"characters", G.size()}, {"primitive", G.primitive_count()}, {"generators", gens}});
    o.table->columns = {"index", "exponents", "order", "conductor", "primitive", "principal", "gauss_re", "gauss_im",
                        "gauss_abs"};
    for (std::size_t i = 0; i < G.size(); ++i) {
        const Character& chi = G.characters()[i];
        std::string exps;
        for (std::size_t k = 0; k < chi.exponents().size(); ++k)
            exps += (k ? ";" : "") + std::to_string(chi.exponents()[k]);
        const cplx g = gauss_sum(chi);
        o.table->rows.push_back({i, exps, chi.order(), chi.conductor(), chi.is_primitive(), chi.is_principal(),
                                 real(g.real()), real(g.imag()), real(std::abs(g))});
    }
    return o;
}

inline Output ls_classical(const RunConfig& c)
{
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"Q", c.Q}, {"N", c.N}, {"M", c.offset}, {"seq", c.seq}, {"trials", c.trials}}),
             Table{}};
    o.table->columns = {"trial", "seed", "lhs", "rhs", "ratio", "holds"};
    u64 violations = 0;
    double max_ratio = 0;
    for (u64 i = 0; i < std::max<u64>(c.trials, 1); ++i) {
        const u64 seed = c.seed + i;
        const auto seq = detail::sequence_for(c, c.seq, c.N, seed);
        const auto chk = classical_ls_check(c.Q, seq);
        const double ratio = safe_ratio(chk.lhs, chk.rhs);
        violations += chk.holds ? 0 : 1;
        max_ratio = std::max(max_ratio, ratio);
        o.table->rows.push_back({i, seq.seed ? json(*seq.seed) : json(nullptr), real(chk.lhs), real(chk.rhs),
                                 real(ratio), chk.holds});
    }
    detail::put(o, {{"violations", violations}, {"max_ratio", real(max_ratio)}});
    return o;
}

inline Table experiments_table(const std::vector<SieveRatioExperiment>& runs)
{
    Table t;
    std::vector<std::string> names;
    for (const auto& r : runs)
        for (const auto& [k, v] : r.bounds)
            if (std::find(names.begin(), names.end(), k) == names.end())
                names.push_back(k);
    std::sort(names.begin(), names.end());
    t.columns = {"trial", "seq", "seed", "moduli_count", "lhs"};
    for (const auto& n : names) {
        t.columns.push_back("bound_" + n);
        t.columns.push_back("ratio_" + n);
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        std::vector<json> row{i, to_string(r.seq_kind), r.seed ? json(*r.seed) : json(nullptr), r.moduli_count,
                              real(r.lhs)};
        for (const auto& n : names) {
            auto b = r.bounds.find(n);
            row.push_back(b == r.bounds.end() ? json(nullptr) : real(b->second));
            row.push_back(b == r.bounds.end() ? json(nullptr) : real(r.ratios.at(n)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline json max_ratios(const std::vector<SieveRatioExperiment>& runs)
{
    std::map<std::string, double> best;
    for (const auto& r : runs)
        for (const auto& [k, v] : r.ratios)
            best[k] = std::max(best.count(k) ? best[k] : 0.0, v);
    json j = json::object();
    for (const auto& [k, v] : best)
        j[k] = real(v);
    return j;
}

inline std::vector<std::string> battery_or(const std::string& seq)
{
    if (seq == "battery")
        return {"all-ones", "single-spike", "random-unit", "random-gaussian"};
    return {seq};
}

inline Output ls_sparse(const RunConfig& c)
{
    if (c.form != "additive" && c.form != "multiplicative")
        throw InvalidArgument("--form must be additive or multiplicative");
    const ModuliSet S = detail::resolve_set(c.set.empty() ? "squares" : c.set);
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"set", S.id()},
                               {"form", c.form},
                               {"Q", c.Q},
                               {"t", c.t},
                               {"N", c.N},
                               {"M", c.offset},
                               {"eps", real(c.eps)},
                               {"seq", c.seq},
                               {"trials", c.trials}}),
             std::nullopt};
    std::vector<SieveRatioExperiment> runs;
    for (const auto& kind : battery_or(c.seq))
        for (u64 i = 0; i < std::max<u64>(c.trials, 1); ++i) {
            const auto seq = detail::sequence_for(c, kind, c.N, c.seed + i);
            runs.push_back(c.form == "additive" ? additive_experiment(S, c.Q, c.t, seq, c.eps)
                                                : multiplicative_experiment(S, c.Q, c.t, seq, c.eps));
        }
    o.table = experiments_table(runs);
    detail::put(o, {{"max_ratios", max_ratios(runs)}, {"moduli_count", runs.front().moduli_count}});
    return o;
}

inline Output ls_bilinear(const RunConfig& c)
{
    const ModuliSet S = detail::resolve_set(c.set.empty() ? "squares" : c.set);
    if (c.M == 0)
        throw InvalidArgument("--M must be >= 1");
    const auto kind = parse_seq_kind(c.seq);
    const auto a = make_sequence(kind, c.M, c.seed, 0);
    const auto b = make_sequence(kind, c.N, c.seed + 1, 0);
    const auto e = bilinear_experiment(S, c.Q, c.t, a, b, c.eps);
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"set", S.id()}, {"Q", c.Q}, {"t", c.t}, {"M", c.M}, {"N", c.N}, {"eps", real(c.eps)},
                               {"seq", c.seq}}),
             std::nullopt};
    detail::put(o, {{"lhs", real(e.lhs)},
                    {"bounds", to_json(e)["bounds"]},
                    {"ratios", to_json(e)["ratios"]},
                    {"moduli_count", e.moduli_count},
                    {"Z_a", real(a.norm())},
                    {"Z_b", real(b.norm())}});
    return o;
}

inline Output ls_conjecture(const RunConfig& c)
{
    const ModuliSet S = squares_set();
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"set", "squares"}, {"Q", c.Q}, {"t", c.t}, {"N", c.N}, {"M", c.offset},
                               {"eps", real(c.eps)}, {"seq", c.seq}, {"trials", c.trials}}),
             std::nullopt};
    std::vector<SieveRatioExperiment> runs;
    for (const auto& kind : battery_or(c.seq))
        for (u64 i = 0; i < std::max<u64>(c.trials, 1); ++i)
            runs.push_back(additive_experiment(S, c.Q, c.t, detail::sequence_for(c, kind, c.N, c.seed + i), c.eps));
    o.table = experiments_table(runs);
    detail::put(o, {{"max_ratios", max_ratios(runs)}, {"moduli_count", runs.front().moduli_count}});
    return o;
}

inline Output error_sum(const RunConfig& c, bool bv, bool square)
{
    const u64 X = detail::x_floor(c.x);
    const SieveTables tables = detail::obtain_tables(detail::needed(c, X));
    ModuliChoice choice;
    choice.square = square;
    u64 Q = c.Q;
    if (square) {
        Q = c.qmax ? c.qmax : static_cast<u64>(std::floor(std::pow(c.x, bv ? 2.0 / 9.0 : 0.5)));
    } else if (!c.set.empty()) {
        choice.set = detail::resolve_set(c.set);
    }
    ErrorSumOptions opts;
    opts.A = c.A;
    opts.exact_sup = c.exact;
    opts.y_grid = c.y_grid;
    if (c.y_log_points > 1) {
        for (u64 i = 0; i < c.y_log_points; ++i)
            opts.y_grid.push_back(std::exp(std::log(c.x) * static_cast<double>(i + 1) / static_cast<double>(c.y_log_points)));
        opts.y_grid.back() = c.x;
    }
    const auto report = bv ? bv_sum(tables, c.x, choice, Q, opts) : bdh_sum(tables, c.x, choice, Q, opts);
    json params = {{"x", real(c.x)}, {"A", real(c.A)}};
    params[square ? "qmax" : "Q"] = Q;
    if (!square)
        params["set"] = c.set.empty() ? "classical" : c.set;
    if (bv)
        params["exact"] = c.exact;
    Output o{detail::metadata(c, anchors().at(c.subcommand), params), error_rows_table(report)};
    json body = to_json(report);
    body.erase("rows");
    detail::put(o, body);
    return o;
}

inline Output vaughan_check(const RunConfig& c)
{
    const u64 X = detail::x_floor(c.x);
    const SieveTables tables = detail::obtain_tables(detail::needed(c, X));
    const CharacterGroup G(c.q);
    std::size_t idx = c.chi_index ? static_cast<std::size_t>(*c.chi_index) : (G.size() > 1 ? 1 : 0);
    if (idx >= G.size())
        throw InvalidArgument("--chi index out of range for modulus " + std::to_string(c.q));
    const Character& chi = G.characters()[idx];
    const auto d = vaughan_decompose(tables, c.x, c.U, c.V, [&](u64 n) { return chi(static_cast<i64>(n)); });
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"x", real(c.x)}, {"U", real(c.U)}, {"V", real(c.V)}, {"q", c.q}, {"chi", idx}}),
             vaughan_table(d)};
    detail::put(o, to_json(d));
    return o;
}

inline Output phi_sum(const RunConfig& c)
{
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"y", c.y}}), std::nullopt};
    detail::put(o, to_json(phi_square_sum(c.y)));
    return o;
}

inline Output well_dist(const RunConfig& c)
{
    const ModuliSet S = detail::resolve_set(c.set.empty() ? "squares" : c.set);
    const std::vector<u64> R = c.R_list.empty() ? std::vector<u64>{1000, 10000} : c.R_list;
    const std::vector<u64> T = c.t_list.empty() ? std::vector<u64>{c.t} : c.t_list;
    const auto scan = well_distribution_scan(S, R, T, c.k_max, c.eps);
    Output o{detail::metadata(c, anchors().at(c.subcommand),
                              {{"set", S.id()}, {"R", R}, {"t", T}, {"kmax", c.k_max}, {"eps", real(c.eps)}}),
             well_dist_table(scan)};
    detail::put(o, {{"max_ratio", real(scan.max_ratio)}, {"eps", real(scan.eps)}});
    return o;
}

inline Output census_am2(const RunConfig& c)
{
    const u64 X = detail::x_floor(c.x);
    const SieveTables tables = detail::obtain_tables(detail::needed(c, X));
    const auto cen = census(tables, X, c.theta);
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"x", X}, {"theta", real(c.theta)}}),
             census_table(cen)};
    detail::put(o, {{"count", cen.count()},
                    {"normalized_count", real(static_cast<double>(cen.count()) / std::pow(static_cast<double>(X), 7.0 / 9.0))},
                    {"exploratory", c.theta <= 5.0 / 9.0}});
    return o;
}

inline Output weighted(const RunConfig& c)
{
    const u64 X = detail::x_floor(c.x);
    const SieveTables tables = detail::obtain_tables(detail::needed(c, 2 * X + 1));
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"x", X}, {"y", c.y}}), std::nullopt};
    detail::put(o, to_json(weighted_sum(tables, X, c.y)));
    return o;
}

inline Output sparsity(const RunConfig& c)
{
    const u64 X = detail::x_floor(c.x);
    const u64 count = sparsity_count(X, c.theta);
    Output o{detail::metadata(c, anchors().at(c.subcommand), {{"x", X}, {"theta", real(c.theta)}}), std::nullopt};
    detail::put(o, {{"count", count},
                    {"normalized_count",
                     real(static_cast<double>(count) / std::pow(static_cast<double>(X), (1.0 + c.theta) / 2.0))}});
    return o;
}

} // namespace commands

// ------------------------------------------------------------ rendering

inline void render(const Output& o, const std::string& format, std::ostream& os)
{
    if (format == "json") {
        json doc = o.summary;
        if (o.table)
            doc["rows"] = o.table->to_json();
        os << doc.dump(2) << '\n';
    } else if (format == "csv") {
        if (o.table) {
            o.table->write_csv(os);
        } else {
            Table t;
            std::vector<json> row;
            for (const auto& [k, v] : o.summary.items()) {
                if (v.is_object() || v.is_array())
                    continue;
                t.columns.push_back(k);
                row.push_back(v);
            }
            t.rows.push_back(std::move(row));
            t.write_csv(os);
        }
    } else {
        for (const auto& [k, v] : o.summary.items())
            os << k << ": " << (v.is_number_float() ? format_real(v.get<double>()) : v.dump()) << '\n';
        if (o.table) {
            os << '\n';
            for (std::size_t i = 0; i < o.table->columns.size(); ++i)
                os << (i ? "  " : "") << std::setw(14) << o.table->columns[i];
            os << '\n';
            for (const auto& row : o.table->rows) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    os << (i ? "  " : "") << std::setw(14) << csv_cell(row[i]);
                os << '\n';
            }
        }
    }
}

// Exit status: 0 success, 2 argument errors, 1 resource limits and other
// runtime failures.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"sievelab: desk-scale experiments on primes in progressions to sparse moduli"};
    app.require_subcommand(1);
    RunConfig cfg;

    using Runner = std::function<Output(const RunConfig&)>;
    std::map<std::string, Runner> runners = {
        {"sieve-build", commands::sieve_build},
        {"char-table", commands::char_table},
        {"ls-classical", commands::ls_classical},
        {"ls-sparse", commands::ls_sparse},
        {"ls-bilinear", commands::ls_bilinear},
        {"ls-conjecture", commands::ls_conjecture},
        {"bdh", [](const RunConfig& c) { return commands::error_sum(c, false, false); }},
        {"bdh-square", [](const RunConfig& c) { return commands::error_sum(c, false, true); }},
        {"bv", [](const RunConfig& c) { return commands::error_sum(c, true, false); }},
        {"bv-square", [](const RunConfig& c) { return commands::error_sum(c, true, true); }},
        {"vaughan-check", commands::vaughan_check},
        {"phi-sum", commands::phi_sum},
        {"well-dist", commands::well_dist},
        {"census-am2", commands::census_am2},
        {"weighted-sum", commands::weighted},
        {"sparsity", commands::sparsity},
    };

    // Flags each subcommand accepts beyond the common ones.
    const std::map<std::string, std::vector<std::string>> flags = {
        {"sieve-build", {"cache"}},
        {"char-table", {"q"}},
        {"ls-classical", {"Q", "N", "M", "seq", "trials"}},
        {"ls-sparse", {"set", "Q", "t", "N", "M", "eps", "seq", "trials", "form"}},
        {"ls-bilinear", {"set", "Q", "t", "N", "Mlen", "eps", "seq"}},
        {"ls-conjecture", {"Q", "t", "N", "M", "eps", "seq", "trials"}},
        {"bdh", {"x", "Q", "set", "A"}},
        {"bdh-square", {"x", "qmax", "A"}},
        {"bv", {"x", "Q", "set", "A", "ygrid", "ylog", "exact"}},
        {"bv-square", {"x", "qmax", "A", "ygrid", "ylog", "exact"}},
        {"vaughan-check", {"x", "U", "V", "q", "chi"}},
        {"phi-sum", {"y"}},
        {"well-dist", {"set", "R", "tlist", "kmax", "eps"}},
        {"census-am2", {"x", "theta"}},
        {"weighted-sum", {"x", "y"}},
        {"sparsity", {"x", "theta"}},
    };

    for (const auto& [name, anchor] : anchors()) {
        CLI::App* sub = app.add_subcommand(name, anchor);
        sub->add_option("--xmax", cfg.x_max, "sieve table bound (default: what the experiment needs)");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json", "pretty"}));
        sub->add_option("--out", cfg.out, "output file (default: stdout)");
        sub->add_option("--seed", cfg.seed, "RNG seed, recorded in every report");
        sub->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
        for (const auto& f : flags.at(name)) {
            if (f == "x")
                sub->add_option("--x", cfg.x, "x");
            else if (f == "Q")
                sub->add_option("--Q", cfg.Q, "Q");
            else if (f == "qmax")
                sub->add_option("--qmax", cfg.qmax, "largest q (modulus q^2)");
            else if (f == "t")
                sub->add_option("--t", cfg.t, "dilation t <= Q");
            else if (f == "y")
                sub->add_option("--y", cfg.y, "y");
            else if (f == "N")
                sub->add_option("--N", cfg.N, "sequence length N");
            else if (f == "M")
                sub->add_option("--M", cfg.offset, "sequence offset M (n runs over M+1..M+N)");
            else if (f == "Mlen")
                sub->add_option("--M", cfg.M, "length M of the a_m sequence");
            else if (f == "eps")
                sub->add_option("--eps", cfg.eps, "epsilon in the bounds");
            else if (f == "A")
                sub->add_option("--A", cfg.A, "log power A in the normalizer");
            else if (f == "theta")
                sub->add_option("--theta", cfg.theta, "exponent theta");
            else if (f == "U")
                sub->add_option("--U", cfg.U, "U >= 1");
            else if (f == "V")
                sub->add_option("--V", cfg.V, "V >= 1, UV <= x");
            else if (f == "q")
                sub->add_option("--q", cfg.q, "character modulus");
            else if (f == "chi")
                sub->add_option("--chi", cfg.chi_index, "character index in the group listing (default: 1 if q > 1)");
            else if (f == "set")
                sub->add_option("--set", cfg.set, "moduli set: squares | all | squarefree | file:PATH");
            else if (f == "seq")
                sub->add_option("--seq", cfg.seq,
                                "all-ones | single-spike | random-unit | random-gaussian | zero" +
                                    std::string(name == "ls-sparse" || name == "ls-conjecture" ? " | battery" : ""));
            else if (f == "trials")
                sub->add_option("--trials", cfg.trials, "number of seeded trials (seeds seed, seed+1, ...)");
            else if (f == "form")
                sub->add_option("--form", cfg.form, "additive | multiplicative");
            else if (f == "R")
                sub->add_option("--R", cfg.R_list, "dyadic scales R")->delimiter(',');
            else if (f == "tlist")
                sub->add_option("--t", cfg.t_list, "dilations t")->delimiter(',');
            else if (f == "kmax")
                sub->add_option("--kmax", cfg.k_max, "largest progression modulus k");
            else if (f == "ygrid")
                sub->add_option("--ygrid", cfg.y_grid, "explicit y grid for max over y <= x")->delimiter(',');
            else if (f == "ylog")
                sub->add_option("--ylog", cfg.y_log_points, "log-spaced y grid with this many points");
            else if (f == "exact")
                sub->add_flag("--exact", cfg.exact, "exact sup over real y <= x (x <= 1e6)");
            else if (f == "cache")
                sub->add_option("--cache", cfg.cache, "also write the binary table cache to this path");
        }
    }

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "sievelab: " << e.what() << '\n';
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();

    try {
        set_thread_count(cfg.threads);
        const Output result = runners.at(cfg.subcommand)(cfg);
        if (cfg.out.empty()) {
            render(result, cfg.format, out);
            if (cfg.format == "csv" && result.table)
                err << result.summary.dump() << '\n';
        } else {
            std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
            if (!file)
                throw InvalidArgument("cannot open output file " + cfg.out);
            render(result, cfg.format, file);
            if (cfg.format == "csv" && result.table) {
                std::ofstream side(cfg.out + ".summary.json", std::ios::binary | std::ios::trunc);
                side << result.summary.dump(2) << '\n';
            }
        }
        return 0;
    } catch (const ResourceLimit& e) {
        err << "sievelab: resource limit: " << e.what() << '\n';
        return 1;
    } catch (const InvalidArgument& e) {
        err << "sievelab: " << e.what() << '\n';
        return 2;
    } catch (const OutOfTable& e) {
        err << "sievelab: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateInput& e) {
        err << "sievelab: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "sievelab: " << e.what() << '\n';
        return 1;
    }
}

} // namespace sievelab::cli
