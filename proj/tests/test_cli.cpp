#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using farey_lab::cli::run_cli;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "farey_lab_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, VerifyPasses) {
    const auto r = run({"verify", "--order", "300", "--k-max", "8"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).front(), "identity,order,k_min,k_max,checked,failure_count,pass");
}

TEST(Cli, VerifyRejectsOrderZero) {
    EXPECT_EQ(run({"verify", "--order", "0"}).code, 2);
    EXPECT_EQ(run({"verify"}).code, 2);
    EXPECT_EQ(run({"verify", "--order", "5", "--from", "9"}).code, 2);
}

TEST(Cli, VerifyJson) {
    const auto r = run({"verify", "--order", "3", "--k-max", "3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["command"], "verify");
    EXPECT_EQ(j["summary"]["failures"], Json::array());
    EXPECT_TRUE(j["summary"]["pass"].get<bool>());
    for (const auto& row : j["rows"]) EXPECT_EQ(row["failure_count"], 0);
}

TEST(Cli, VerifySweep) {
    const auto r = run({"verify", "--from", "1", "--order", "12", "--k-max", "5", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["rows"].front()["order"], 1);
    EXPECT_EQ(j["rows"].back()["order"], 12);
}

TEST(Cli, Avg) {
    auto r = run({"avg", "--order", "3", "--k", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], "order,k,count,sum,average,average_approx");
    EXPECT_EQ(l[1], "3,2,4,11,11/4,2.75");

    r = run({"avg", "--order", "3", "--k", "1", "--format", "json"});
    EXPECT_EQ(Json::parse(r.out)["rows"][0]["average"], "1/1");
}

TEST(Cli, AvgDeterministicAcrossChunks) {
    const auto a = run({"avg", "--order", "10000", "--k", "3", "--chunks", "64"});
    const auto b = run({"avg", "--order", "10000", "--k", "3", "--chunks", "1"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, Constants) {
    auto r = run({"constants", "--k", "2", "--kappa-max", "40", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto row = Json::parse(r.out)["rows"][0];
    EXPECT_EQ(row["lo"], "3/1");
    EXPECT_EQ(row["hi"], "3/1");

    r = run({"constants", "--k", "1", "--format", "json"});
    row = Json::parse(r.out)["rows"][0];
    EXPECT_EQ(row["lo"], "1/1");
    EXPECT_EQ(row["hi"], "1/1");

    r = run({"constants", "--k", "4", "--kappa-max", "60", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    row = Json::parse(r.out)["rows"][0];
    const auto hi = farey_lab::parse_rat(row["hi"].get<std::string>());
    EXPECT_LT(hi, farey_lab::Rat(farey_lab::BigInt(row["trivial_bound"].get<std::string>())));
    EXPECT_EQ(row["star_lo"], row["lo"]);

    r = run({"constants", "--k-max", "3", "--kappa-max", "20"});
    EXPECT_EQ(lines(r.out).size(), 4u);
    EXPECT_EQ(run({"constants", "--k", "5", "--kappa-max", "4"}).code, 2);
}

TEST(Cli, Corr) {
    const auto r = run({"corr", "--order", "3", "--h", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["rows"][0]["average"], "9/2");
}

TEST(Cli, Dist) {
    const auto r = run({"dist", "--k", "2", "--order", "3", "--kappa-max", "10", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    std::map<std::int64_t, Json> by;
    for (const auto& row : j["rows"]) by[row["value"].get<std::int64_t>()] = row;
    for (std::int64_t v : {1, 2, 3, 6}) EXPECT_TRUE(by.count(v)) << v;
    EXPECT_EQ(by[1]["measure"], "1/3");
    EXPECT_EQ(by[1]["empirical"], "1/2");
    EXPECT_EQ(j["summary"]["deficit"], "1/33");
    EXPECT_EQ(run({"dist", "--k", "1", "--order", "3"}).code, 2);
}

TEST(Cli, Latcount) {
    auto r = run({"latcount", "--order", "5", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto row = Json::parse(r.out)["rows"][0];
    EXPECT_EQ(row["count"], 10);
    EXPECT_EQ(row["farey_count"], 10);
    r = run({"latcount", "--order", "50", "--region", "tk-star", "--index", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["rows"][0]["area"], "1/3");
    EXPECT_EQ(run({"latcount", "--order", "5", "--region", "disc"}).code, 2);
}

TEST(Cli, Converge) {
    const auto r = run({"converge", "--k", "2", "--orders", "10,100,1000", "--kappa-max", "20", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["rows"].size(), 3u);
    EXPECT_FALSE(j["summary"]["violation"].get<bool>());
    EXPECT_EQ(run({"converge", "--k", "2", "--orders", "100,10"}).code, 2);
}

TEST(Cli, Cells) {
    const auto file = temp_dir() / "cells.txt";
    const auto r = run({"cells", "--depth", "1", "--kappa-max", "3", "--cell-cache", file.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "itinerary,area,area_approx,vertices");
    EXPECT_EQ(l[1].substr(0, 6), "1,1/6,");
    EXPECT_TRUE(farey_lab::read_cell_cache(file, 1, 3));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"avg", "--order", "3", "--bogus"}).code, 2);
    EXPECT_EQ(run({"avg", "--order", "abc"}).code, 2);
    EXPECT_EQ(run({"avg", "--order", "3", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, OutputFile) {
    const auto file = temp_dir() / "avg.csv";
    const auto r = run({"avg", "--order", "3", "--k", "2", "--output", file.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(file);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(row, "3,2,4,11,11/4,2.75");
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
    const auto file = temp_dir() / "run.cfg";
    std::ofstream(file) << "# experiment\norder = 3\nk = 2\nformat = json\n";
    auto r = run({"avg", "--config", file.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["rows"][0]["sum"], "11");
    r = run({"avg", "--config", file.string(), "--k", "1", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out)[1], "3,1,4,4,1/1,1.0");
    std::ofstream(file) << "order 3\n";
    EXPECT_EQ(run({"avg", "--config", file.string()}).code, 2);
    EXPECT_EQ(run({"avg", "--config", (temp_dir() / "none.cfg").string()}).code, 2);
}

TEST(Cli, JsonRoundTripsThroughSchema) {
    for (const auto& args : std::vector<std::vector<std::string>>{{"avg", "--order", "7", "--k", "3"},
                                                                  {"corr", "--order", "7", "--h", "2"},
                                                                  {"dist", "--order", "7", "--k", "3", "--kappa-max", "12"},
                                                                  {"constants", "--k", "3", "--kappa-max", "12"}}) {
        auto json_args = args;
        json_args.insert(json_args.end(), {"--format", "json"});
        const auto j = Json::parse(run(json_args).out);
        for (const char* key : {"command", "params", "columns", "rows", "summary"}) EXPECT_TRUE(j.contains(key)) << key;
        EXPECT_EQ(j["command"], args[0]);
        const auto csv = lines(run(args).out);
        ASSERT_EQ(csv.size(), j["rows"].size() + 1);
        std::string header;
        for (const auto& c : j["columns"]) header += (header.empty() ? "" : ",") + c.get<std::string>();
        EXPECT_EQ(csv[0], header);
        for (const auto& row : j["rows"]) {
            EXPECT_EQ(row.size(), j["columns"].size());
            for (const auto& c : j["columns"]) {
                const auto name = c.get<std::string>();
                ASSERT_TRUE(row.contains(name));
                const bool approx = name.size() > 7 && name.substr(name.size() - 7) == "_approx";
                if (!approx) { EXPECT_FALSE(row[name].is_number_float()) << name; }
            }
        }
    }
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = FAREY_LAB_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("latcount --order 5"), 0);
    EXPECT_EQ(status("verify --order 0"), 2);
    EXPECT_EQ(status("avg"), 2);
}
