#pragma once

// JSON and CSV renderings of experiment reports. CSV has a mandatory header
// row and prints reals with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sievelab/am2.hpp"
#include "sievelab/large_sieve.hpp"
#include "sievelab/progressions.hpp"
#include "sievelab/sparse_sets.hpp"

namespace sievelab {

using json = nlohmann::json;

inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_cell(const json& v)
{
    if (v.is_null())
        return "";
    if (v.is_number_float())
        return format_real(v.get<double>());
    if (v.is_string())
        return csv_field(v.get<std::string>());
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    return csv_field(v.dump());
}

// Column-ordered table; cells are JSON scalars.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;

    void write_csv(std::ostream& os) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << csv_field(columns[i]);
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
    }

    json to_json() const
    {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < columns.size(); ++i)
                obj[columns[i]] = row[i];
            arr.push_back(std::move(obj));
        }
        return arr;
    }
};

// Non-finite reals become null so documents stay valid JSON.
inline json real(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

inline json complex_json(cplx z) { return json{{"re", real(z.real())}, {"im", real(z.imag())}}; }

// ---------------------------------------------------------------- error sums

inline Table error_rows_table(const ErrorSumReport& r)
{
    Table t;
    t.columns = {"q", "modulus", "contribution", "argmax_a", "argmax_y"};
    for (const auto& row : r.rows)
        t.rows.push_back({row.q, row.modulus, real(row.contribution),
                          row.argmax_a ? json(*row.argmax_a) : json(nullptr),
                          row.argmax_y ? real(*row.argmax_y) : json(nullptr)});
    return t;
}

inline json to_json(const ErrorSumReport& r)
{
    json j;
    j["kind"] = to_string(r.kind);
    j["x"] = real(r.x);
    j["Q"] = r.Q;
    j["set"] = r.set_id;
    j["A"] = real(r.A);
    if (r.kind == ErrorSumKind::bdh_general || r.kind == ErrorSumKind::bv_general)
        j["set_count"] = r.set_count;
    j["lhs"] = real(r.lhs);
    j["normalizer"] = real(r.normalizer);
    j["lhs_over_normalizer"] = real(r.lhs / r.normalizer);
    j["lhs_over_x"] = real(r.lhs / r.x);
    if (r.kind == ErrorSumKind::bv_general || r.kind == ErrorSumKind::bv_square ||
        r.kind == ErrorSumKind::classical_bv) {
        json grid = json::array();
        for (double y : r.y_grid)
            grid.push_back(real(y));
        j["y_grid"] = r.exact_sup ? json("exact") : grid;
    }
    j["rows"] = error_rows_table(r).to_json();
    return j;
}

inline void write_csv(std::ostream& os, const ErrorSumReport& r) { error_rows_table(r).write_csv(os); }

// ------------------------------------------------------------------- Vaughan

inline Table vaughan_table(const VaughanDecomposition& d)
{
    Table t;
    t.columns = {"component", "re", "im"};
    auto add = [&](const char* name, cplx z) { t.rows.push_back({name, real(z.real()), real(z.imag())}); };
    add("S1", d.s1);
    add("S2", d.s2);
    add("S3", d.s3);
    add("S4", d.s4);
    add("sum", d.sum());
    add("direct", d.total);
    return t;
}

inline json to_json(const VaughanDecomposition& d)
{
    return json{{"x", real(d.x)},
                {"U", real(d.U)},
                {"V", real(d.V)},
                {"S1", complex_json(d.s1)},
                {"S2", complex_json(d.s2)},
                {"S3", complex_json(d.s3)},
                {"S4", complex_json(d.s4)},
                {"direct", complex_json(d.total)},
                {"residual", real(d.residual)},
                {"relative_residual", real(d.relative_residual())},
                {"coefficient_bounds_hold", d.coefficient_bounds_hold},
                {"ranges_hold", d.ranges_hold},
                {"type1_limit", real(d.type1_limit)},
                {"bilinear_upper", real(d.bilinear_upper)}};
}

inline void write_csv(std::ostream& os, const VaughanDecomposition& d) { vaughan_table(d).write_csv(os); }

// --------------------------------------------------------------- large sieve

inline json to_json(const SieveRatioExperiment& e)
{
    json bounds = json::object(), ratios = json::object();
    for (const auto& [k, v] : e.bounds)
        bounds[k] = real(v);
    for (const auto& [k, v] : e.ratios)
        ratios[k] = real(v);
    return json{{"experiment", e.experiment},
                {"params",
                 {{"moduli", e.moduli},
                  {"Q", e.Q},
                  {"t", e.t},
                  {"moduli_count", e.moduli_count},
                  {"eps", real(e.eps)},
                  {"seq", to_string(e.seq_kind)},
                  {"M", e.offset},
                  {"N", e.N}}},
                {"seed", e.seed ? json(*e.seed) : json(nullptr)},
                {"lhs", real(e.lhs)},
                {"bounds", bounds},
                {"ratios", ratios},
                {"empty_window", e.moduli_count == 0}};
}

// ----------------------------------------------------------------- sparse sets

inline Table well_dist_table(const WellDistScan& s)
{
    Table t;
    t.columns = {"t", "R", "k", "l", "x", "y", "observed", "window_size", "majorant", "ratio"};
    for (const auto& r : s.reports)
        t.rows.push_back({r.t, r.R, r.k, r.l, real(r.x), real(r.y), r.observed, r.window_size, real(r.majorant),
                          real(r.ratio)});
    return t;
}

// ------------------------------------------------------------------ am^2 + 1

inline Table census_table(const Am2Census& c)
{
    Table t;
    t.columns = {"p", "s", "m"};
    for (const auto& r : c.rows)
        t.rows.push_back({r.p, r.s, r.m});
    return t;
}

inline json to_json(const WeightedSumReport& r)
{
    return json{{"x", r.x},
                {"y", r.y},
                {"lhs", real(r.lhs)},
                {"main", real(r.main)},
                {"ratio", real(r.ratio)},
                {"main_corrected", real(r.main_corrected)},
                {"ratio_corrected", real(r.lhs / r.main_corrected)}};
}

inline json to_json(const PhiSquareSum& r)
{
    return json{{"y", r.y},
                {"sum", real(r.sum)},
                {"main", real(r.main)},
                {"error", real(r.error)},
                {"main_corrected", real(r.main_corrected)},
                {"error_corrected", real(r.sum - r.main_corrected)}};
}

} // namespace sievelab
