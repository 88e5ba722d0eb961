#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sievelab_cli.hpp"

using namespace sievelab;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "sievelab");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(Cli, PhiSumJson)
{
    const auto r = run({"phi-sum", "--y", "100", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    const auto ref = phi_square_sum(100);
    EXPECT_EQ(j["sum"].get<double>(), ref.sum);
    EXPECT_EQ(j["main"].get<double>(), ref.main);
    EXPECT_EQ(j["error"].get<double>(), ref.error);
}

TEST(Cli, EverySubcommandCarriesMetadata)
{
    const std::vector<std::vector<std::string>> cmds = {
        {"sieve-build", "--xmax", "1000"},
        {"char-table", "--q", "12"},
        {"ls-classical", "--Q", "5", "--N", "10"},
        {"ls-sparse", "--Q", "100", "--N", "10", "--set", "squares"},
        {"ls-sparse", "--Q", "50", "--N", "10", "--set", "all", "--form", "multiplicative"},
        {"ls-bilinear", "--Q", "50", "--M", "5", "--N", "6"},
        {"ls-conjecture", "--Q", "100", "--N", "10", "--seq", "battery"},
        {"bdh", "--x", "2000", "--Q", "10"},
        {"bdh-square", "--x", "2000"},
        {"bv", "--x", "2000", "--Q", "10", "--set", "squarefree"},
        {"bv-square", "--x", "2000", "--exact"},
        {"vaughan-check", "--x", "500", "--U", "4", "--V", "6", "--q", "5"},
        {"phi-sum", "--y", "10"},
        {"well-dist", "--R", "100,200", "--t", "1,2"},
        {"census-am2", "--x", "1000"},
        {"weighted-sum", "--x", "1000", "--y", "3"},
        {"sparsity", "--x", "1000"},
    };
    for (auto args : cmds) {
        args.push_back("--seed");
        args.push_back("9");
        const auto r = run(args);
        ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
        const auto j = json::parse(r.out);
        EXPECT_EQ(j["experiment"], args[0]);
        EXPECT_TRUE(j.contains("paper_anchor") && j["paper_anchor"].is_string());
        EXPECT_TRUE(j.contains("params") && j["params"].is_object());
        EXPECT_EQ(j["seed"], 9);
    }
}

TEST(Cli, BvSquareCsvMatchesLibrary)
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / "sievelab_cli_bvsq.csv";
    const auto r = run({"bv-square", "--x", "100000", "--qmax", "10", "--A", "2", "--format", "csv", "--out",
                        out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "q,modulus,contribution,argmax_a,argmax_y");
    int rows = 0;
    while (std::getline(csv, line))
        ++rows;
    EXPECT_EQ(rows, 10);
    const auto summary = json::parse(slurp(out.string() + ".summary.json"));
    ModuliChoice sq;
    sq.square = true;
    const auto ref = bv_sum(build_tables(100000), 100000, sq, 10);
    EXPECT_EQ(summary["lhs"].get<double>(), ref.lhs);
}

TEST(Cli, ClassicalTrialsHold)
{
    const auto r = run({"ls-classical", "--Q", "20", "--N", "50", "--seq", "random-unit", "--seed", "7", "--trials",
                        "100"});
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["violations"], 0);
    EXPECT_EQ(j["rows"].size(), 100u);
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"bv", "--help"}).code, 0);
    EXPECT_NE(run({"bv", "--help"}).out.find("Bombieri"), std::string::npos);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"no-such"}).code, 2);
    EXPECT_EQ(run({"phi-sum", "--y", "abc"}).code, 2);
    EXPECT_EQ(run({"phi-sum", "--y", "0"}).code, 2);
    EXPECT_EQ(run({"bv", "--set", "cubes"}).code, 2);
    EXPECT_EQ(run({"bv", "--set", "file:/nonexistent/list"}).code, 2);
    EXPECT_EQ(run({"ls-sparse", "--Q", "5", "--t", "9"}).code, 2);
    EXPECT_EQ(run({"weighted-sum", "--x", "1000", "--xmax", "100"}).code, 2);
    EXPECT_EQ(run({"phi-sum", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"bv-square", "--x", "2000000", "--exact"}).code, 1);
    EXPECT_EQ(run({"ls-bilinear", "--M", "5000", "--N", "5000"}).code, 1);
    const auto bad = run({"phi-sum", "--y", "0"});
    EXPECT_EQ(std::count(bad.err.begin(), bad.err.end(), '\n'), 1);
}

TEST(Cli, ThreadsDoNotChangeOutput)
{
    for (std::vector<std::string> args : {std::vector<std::string>{"bdh", "--x", "30000", "--Q", "40"},
                                          {"census-am2", "--x", "200000"},
                                          {"ls-sparse", "--Q", "2000", "--N", "40", "--seq", "battery"},
                                          {"well-dist", "--R", "1000,5000", "--t", "1,2,3"}}) {
        auto one = args, many = args;
        one.insert(one.end(), {"--threads", "1"});
        many.insert(many.end(), {"--threads", "6"});
        const auto a = run(one), b = run(many);
        ASSERT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out) << args[0];
    }
}

TEST(Cli, TableCache)
{
    const auto dir = std::filesystem::temp_directory_path() / "sievelab_cli_cache";
    std::filesystem::remove_all(dir);
    ::setenv("SIEVELAB_CACHE", dir.c_str(), 1);
    const auto first = run({"census-am2", "--x", "5000"});
    EXPECT_TRUE(std::filesystem::exists(dir / "sievelab_5000.slab"));
    const auto second = run({"census-am2", "--x", "5000"});
    ::unsetenv("SIEVELAB_CACHE");
    EXPECT_EQ(first.out, second.out);
    std::filesystem::remove_all(dir);
}

TEST(Cli, ExplicitListFile)
{
    const auto p = std::filesystem::temp_directory_path() / "sievelab_cli_list.txt";
    std::ofstream(p) << "12\n15\n18\n";
    const auto r = run({"bdh", "--x", "1000", "--Q", "10", "--set", "file:" + p.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["set_count"], 3);
    EXPECT_EQ(j["rows"].size(), 3u);
}
