#pragma once

// Command implementations behind the farey_lab executable. Kept in a header
// so the test suite can drive run_cli() in-process.
//
// Every command produces a Document: fixed columns plus rows. CSV prints the
// rows under a header line; JSON prints
//
//     {"command": ..., "params": {...}, "columns": [...], "rows": [{...}], "summary": {...}}
//
// Exact rationals are always "p/q" strings; floating-point values appear only
// in columns whose name ends in _approx.

#include "farey_lab/constants.hpp"
#include "farey_lab/farey_core.hpp"
#include "farey_lab/geometry.hpp"
#include "farey_lab/identities.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace farey_lab::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct RunConfig {
    std::string command;
    std::int64_t order = 0;
    std::int64_t order_from = 0;  // verify: sweep from this order up to order
    int k = 2;
    int k_max = 0;
    std::int64_t h = 1;
    std::int64_t kappa_max = kDefaultKappaMax;
    std::int64_t chunks = 64;
    std::int64_t depth = 1;
    std::vector<std::int64_t> orders;
    std::string region = "triangle";
    std::int64_t region_index = 2;
    std::string format = "csv";
    std::optional<std::string> output_path;
    std::optional<std::string> cell_cache;
    bool skip_star_form = false;
};

struct Document {
    std::string command;
    Json params = Json::object();
    std::vector<std::string> columns;
    std::vector<Json> rows;
    Json summary = Json::object();
    bool check_failed = false;
};

inline double approx_value(const Rat& r) { return rat_to_double(r); }

inline std::string csv_cell(const Json& v) {
    std::string s;
    if (v.is_string())
        s = v.get<std::string>();
    else if (v.is_null())
        s = "";
    else
        s = v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

inline void write_csv(std::ostream& out, const Document& doc) {
    for (std::size_t i = 0; i < doc.columns.size(); ++i) out << (i ? "," : "") << doc.columns[i];
    out << '\n';
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < doc.columns.size(); ++i) out << (i ? "," : "") << csv_cell(row.at(doc.columns[i]));
        out << '\n';
    }
}

inline Json to_json(const Document& doc) {
    Json j;
    j["command"] = doc.command;
    j["params"] = doc.params;
    j["columns"] = doc.columns;
    j["rows"] = Json::array();
    for (const auto& r : doc.rows) j["rows"].push_back(r);
    j["summary"] = doc.summary;
    return j;
}

// ---------------------------------------------------------------------------
// Commands

inline Json report_json(const VerificationReport& r) {
    Json failures = Json::array();
    for (const auto& f : r.failures) failures.push_back({{"index", f.index}, {"k", f.k}, {"expected", f.expected}, {"got", f.got}});
    return {{"identity", r.identity_name}, {"order", r.order},           {"k_min", r.k_min},       {"k_max", r.k_max},
            {"checked", r.checked},        {"failure_count", r.failure_count}, {"pass", r.pass()}, {"failures", failures}};
}

inline Document cmd_verify(const RunConfig& cfg) {
    Document doc{"verify"};
    const std::int64_t from = cfg.order_from > 0 ? cfg.order_from : cfg.order;
    if (from > cfg.order) throw std::domain_error("--from must not exceed --order");
    const int k_max = cfg.k_max > 0 ? cfg.k_max : 8;
    doc.params = {{"order", cfg.order}, {"from", from}, {"k_max", k_max}, {"chunks", cfg.chunks}};
    doc.columns = {"identity", "order", "k_min", "k_max", "checked", "failure_count", "pass"};
    Json failures = Json::array();
    std::uint64_t checked = 0, failed = 0;
    for (std::int64_t q = from; q <= cfg.order; ++q) {
        for (const auto& r : verify_all(q, k_max, cfg.chunks)) {
            Json row = report_json(r);
            for (const auto& f : row["failures"]) {
                if (failures.size() < VerificationReport::kMaxStoredFailures) {
                    Json g = f;
                    g["identity"] = r.identity_name;
                    g["order"] = r.order;
                    failures.push_back(g);
                }
            }
            row.erase("failures");
            checked += r.checked;
            failed += r.failure_count;
            doc.rows.push_back(std::move(row));
        }
    }
    doc.summary = {{"checked", checked}, {"failure_count", failed}, {"pass", failed == 0}, {"failures", failures}};
    doc.check_failed = failed != 0;
    return doc;
}

inline Document cmd_avg(const RunConfig& cfg) {
    Document doc{"avg"};
    doc.params = {{"order", cfg.order}, {"k", cfg.k}, {"chunks", cfg.chunks}};
    doc.columns = {"order", "k", "count", "sum", "average", "average_approx"};
    const BigInt sum = sum_nu_k(cfg.order, cfg.k, cfg.chunks);
    const auto n = count_farey(static_cast<std::uint64_t>(cfg.order));
    const Rat avg = make_rat(sum, to_big(n));
    doc.rows.push_back(
        {{"order", cfg.order}, {"k", cfg.k}, {"count", n}, {"sum", sum.get_str()}, {"average", rat_text(avg)}, {"average_approx", approx_value(avg)}});
    if (cfg.order < cfg.k) doc.summary["note"] = "window spans more than one period (Q < k)";
    return doc;
}

inline Document cmd_constants(const RunConfig& cfg) {
    Document doc{"constants"};
    const int k_last = cfg.k_max > 0 ? cfg.k_max : cfg.k;
    const int k_first = cfg.k_max > 0 ? 1 : cfg.k;
    doc.params = {{"k_first", k_first}, {"k_last", k_last}, {"kappa_max", cfg.kappa_max}, {"star_form", !cfg.skip_star_form}};
    doc.columns = {"k",      "kappa_max", "depth",      "lo",      "hi",      "lo_approx",     "hi_approx",
                   "width",  "tail_bound", "exact_tail", "cells",   "star_lo", "star_hi",       "trivial_bound"};
    BkOptions opts;
    opts.check_star_form = !cfg.skip_star_form;
    if (cfg.cell_cache) opts.cell_cache = *cfg.cell_cache;
    for (int k = k_first; k <= k_last; ++k) {
        const auto b = bk_exact(k, cfg.kappa_max, opts);
        doc.rows.push_back({{"k", k},
                            {"kappa_max", b.kappa_max},
                            {"depth", b.depth},
                            {"lo", rat_text(b.lo)},
                            {"hi", rat_text(b.hi)},
                            {"lo_approx", approx_value(b.lo)},
                            {"hi_approx", approx_value(b.hi)},
                            {"width", rat_text(b.width())},
                            {"tail_bound", rat_text(b.tail_bound)},
                            {"exact_tail", b.exact_tail},
                            {"cells", b.cell_count},
                            {"star_lo", b.star_lo ? Json(rat_text(*b.star_lo)) : Json()},
                            {"star_hi", b.star_hi ? Json(rat_text(*b.star_hi)) : Json()},
                            {"trivial_bound", k >= 2 ? Json(bk_trivial_bound(k).get_str()) : Json()}});
    }
    return doc;
}

inline Document cmd_corr(const RunConfig& cfg) {
    Document doc{"corr"};
    doc.params = {{"order", cfg.order}, {"h", cfg.h}, {"chunks", cfg.chunks}};
    doc.columns = {"order", "h", "count", "sum", "average", "average_approx"};
    const BigInt sum = correlation_sum(cfg.order, cfg.h, cfg.chunks);
    const auto n = count_farey(static_cast<std::uint64_t>(cfg.order));
    const Rat avg = make_rat(sum, to_big(n));
    doc.rows.push_back(
        {{"order", cfg.order}, {"h", cfg.h}, {"count", n}, {"sum", sum.get_str()}, {"average", rat_text(avg)}, {"average_approx", approx_value(avg)}});
    return doc;
}

inline Document cmd_dist(const RunConfig& cfg) {
    Document doc{"dist"};
    doc.params = {{"k", cfg.k}, {"order", cfg.order}, {"kappa_max", cfg.kappa_max}};
    doc.columns = {"value", "measure", "measure_approx", "count", "empirical", "empirical_approx"};
    BkOptions opts;
    if (cfg.cell_cache) opts.cell_cache = *cfg.cell_cache;
    const auto table = nu_k_distribution(cfg.k, cfg.kappa_max, cfg.order, opts);
    for (const auto& e : table.entries) {
        doc.rows.push_back({{"value", e.value},
                            {"measure", rat_text(e.measure)},
                            {"measure_approx", approx_value(e.measure)},
                            {"count", e.count},
                            {"empirical", rat_text(e.empirical)},
                            {"empirical_approx", approx_value(e.empirical)}});
    }
    doc.summary = {{"period", table.period}, {"deficit", rat_text(table.deficit)}, {"deficit_approx", approx_value(table.deficit)}};
    return doc;
}

inline ConvexPolygon region_by_name(const std::string& name, std::int64_t index) {
    if (name == "triangle") return farey_triangle();
    if (name == "tk") return region_Tk(index);
    if (name == "tk-star") return region_Tk_star(index);
    throw std::domain_error("unknown region '" + name + "' (triangle, tk, tk-star)");
}

inline Document cmd_latcount(const RunConfig& cfg) {
    Document doc{"latcount"};
    doc.params = {{"order", cfg.order}, {"region", cfg.region}, {"index", cfg.region_index}};
    doc.columns = {"order", "region", "count", "area", "expected_approx", "relative_error_approx", "farey_count"};
    const auto poly = region_by_name(cfg.region, cfg.region_index);
    const auto count = visible_count(poly, cfg.order);
    const Rat a = area(poly);
    const double q = static_cast<double>(cfg.order);
    const double expected = 6.0 * q * q * approx_value(a) / (std::numbers::pi * std::numbers::pi);
    doc.rows.push_back({{"order", cfg.order},
                        {"region", cfg.region == "triangle" ? cfg.region : cfg.region + ":" + std::to_string(cfg.region_index)},
                        {"count", count},
                        {"area", rat_text(a)},
                        {"expected_approx", expected},
                        {"relative_error_approx", (static_cast<double>(count) - expected) / (q * q)},
                        {"farey_count", count_farey(static_cast<std::uint64_t>(cfg.order))}});
    return doc;
}

inline Document cmd_converge(const RunConfig& cfg) {
    Document doc{"converge"};
    doc.params = {{"k", cfg.k}, {"orders", cfg.orders}, {"kappa_max", cfg.kappa_max}, {"chunks", cfg.chunks}};
    doc.columns = {"order", "count", "empirical", "empirical_approx", "distance", "distance_approx", "model_approx"};
    BkOptions bk;
    if (cfg.cell_cache) bk.cell_cache = *cfg.cell_cache;
    const auto report = convergence_report(cfg.k, cfg.orders, cfg.kappa_max, {cfg.chunks, 0}, bk);
    for (const auto& r : report.rows) {
        doc.rows.push_back({{"order", r.order},
                            {"count", r.count},
                            {"empirical", rat_text(r.empirical)},
                            {"empirical_approx", approx_value(r.empirical)},
                            {"distance", rat_text(r.distance)},
                            {"distance_approx", approx_value(r.distance)},
                            {"model_approx", r.model}});
    }
    const auto ratio = report.shrink_ratio();
    doc.summary = {{"lo", rat_text(report.interval.lo)},
                   {"hi", rat_text(report.interval.hi)},
                   {"violation", report.violation},
                   {"shrink_ratio_approx", ratio ? Json(*ratio) : Json()}};
    doc.check_failed = report.violation;
    return doc;
}

inline Document cmd_cells(const RunConfig& cfg) {
    Document doc{"cells"};
    doc.params = {{"depth", cfg.depth}, {"kappa_max", cfg.kappa_max}};
    doc.columns = {"itinerary", "area", "area_approx", "vertices"};
    const auto cells = enumerate_cells(static_cast<std::size_t>(cfg.depth), cfg.kappa_max);
    if (cfg.cell_cache) write_cell_cache(*cfg.cell_cache, static_cast<std::size_t>(cfg.depth), cfg.kappa_max, cells);
    Rat covered = 0;
    for (const auto& c : cells) {
        std::string it, verts;
        for (std::size_t j = 0; j < c.itinerary.size(); ++j) it += (j ? " " : "") + std::to_string(c.itinerary[j]);
        for (const auto& v : c.region.vertices()) verts += (verts.empty() ? "" : " ") + rat_text(v.x) + "," + rat_text(v.y);
        const Rat a = area(c.region);
        covered += a;
        doc.rows.push_back({{"itinerary", it}, {"area", rat_text(a)}, {"area_approx", approx_value(a)}, {"vertices", verts}});
    }
    doc.summary = {{"cells", cells.size()}, {"covered", rat_text(covered)}, {"uncovered", rat_text(Rat(1, 2) - covered)}};
    return doc;
}

// ---------------------------------------------------------------------------
// Front end

/// "key = value" lines, '#' comments. Keys are long option names without
/// dashes; a flag is set by "name = true".
inline std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError("cannot read config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ConversionError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw CLI::ConversionError("config line " + std::to_string(lineno) + ": empty key");
        if (value == "true") {
            tokens.push_back("--" + key);
        } else if (value != "false") {
            tokens.push_back("--" + key);
            tokens.push_back(value);
        }
    }
    return tokens;
}

/// Splices config-file options in front of the command-line options so the
/// command line wins (options keep their last value).
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t span = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            span = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            span = 1;
        } else {
            continue;
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
        // Insert right after the subcommand name (the first non-option token).
        std::size_t at = 0;
        while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
        at = std::min(at + 1, args.size());
        const auto extra = config_tokens(path);
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
        break;
    }
    return args;
}

inline int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Farey k-index laboratory: identities, averages, B(k) constants, distributions"};
    app.name("farey_lab");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", cfg.output_path, "Write to this file instead of stdout");
        sub->add_option("--chunks", cfg.chunks, "Parallel chunks for streaming sums")->check(CLI::PositiveNumber);
    };
    const auto positive = CLI::PositiveNumber;

    auto* verify = app.add_subcommand("verify", "Check every k-index identity over full periods");
    verify->add_option("--order", cfg.order, "Farey order Q")->required()->check(positive);
    verify->add_option("--from", cfg.order_from, "Also check every order from this one up to --order")->check(positive);
    verify->add_option("--k-max", cfg.k_max, "Largest k (default 8)")->check(positive);

    auto* avg = app.add_subcommand("avg", "Exact average of nu_k over one period");
    avg->add_option("--order", cfg.order, "Farey order Q")->required()->check(positive);
    avg->add_option("--k", cfg.k, "Index k")->check(positive);

    auto* constants = app.add_subcommand("constants", "B(k) from cell geometry");
    constants->add_option("--k", cfg.k, "Index k")->check(positive);
    constants->add_option("--k-max", cfg.k_max, "Emit rows for k = 1..k-max")->check(positive);
    constants->add_option("--kappa-max", cfg.kappa_max, "Itinerary truncation L")->check(positive);
    constants->add_option("--cell-cache", cfg.cell_cache, "Directory for cached cells");
    constants->add_flag("--no-star-form", cfg.skip_star_form, "Skip the monomial-by-monomial cross-check");

    auto* corr = app.add_subcommand("corr", "Correlation sum of nu_2 at lag h");
    corr->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    corr->add_option("--order", cfg.order, "Farey order Q")->required()->check(positive);
    corr->add_option("--h", cfg.h, "Lag h")->check(positive);

    auto* dist = app.add_subcommand("dist", "Value distribution of nu_k: cell measure vs one period");
    dist->add_option("--order", cfg.order, "Farey order Q")->required()->check(positive);
    dist->add_option("--k", cfg.k, "Index k (>= 2)")->check(CLI::Range(2, 64));
    dist->add_option("--kappa-max", cfg.kappa_max, "Itinerary truncation L")->check(positive);
    dist->add_option("--cell-cache", cfg.cell_cache, "Directory for cached cells");

    auto* latcount = app.add_subcommand("latcount", "Visible lattice points in Q times a region");
    latcount->add_option("--order", cfg.order, "Scale Q")->required()->check(positive);
    latcount->add_option("--region", cfg.region, "triangle, tk or tk-star")->check(CLI::IsMember({"triangle", "tk", "tk-star"}));
    latcount->add_option("--index", cfg.region_index, "k for tk / tk-star")->check(positive);

    auto* converge = app.add_subcommand("converge", "Distance of empirical averages to the B(k) enclosure");
    converge->add_option("--k", cfg.k, "Index k")->check(positive);
    converge->add_option("--orders", cfg.orders, "Ascending list of Q")->required()->check(positive)->delimiter(',');
    converge->add_option("--kappa-max", cfg.kappa_max, "Itinerary truncation L")->check(positive);
    converge->add_option("--cell-cache", cfg.cell_cache, "Directory for cached cells");

    auto* cells = app.add_subcommand("cells", "Enumerate cylinder cells");
    cells->add_option("--depth", cfg.depth, "Itinerary length")->check(CLI::Range(1, 12));
    cells->add_option("--kappa-max", cfg.kappa_max, "Itinerary truncation L")->check(positive);
    cells->add_option("--cell-cache", cfg.cell_cache, "Write the cells to this cache file");

    for (auto* sub : {verify, avg, constants, corr, dist, latcount, converge, cells}) common(sub);
    // Consumed by expand_config(); registered so --help lists it.
    app.add_option("--config", "key = value file; command-line flags override it");

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    Document doc;
    try {
        const auto* chosen = app.get_subcommands().front();
        cfg.command = chosen->get_name();
        if (cfg.command == "verify") doc = cmd_verify(cfg);
        else if (cfg.command == "avg") doc = cmd_avg(cfg);
        else if (cfg.command == "constants") doc = cmd_constants(cfg);
        else if (cfg.command == "corr") doc = cmd_corr(cfg);
        else if (cfg.command == "dist") doc = cmd_dist(cfg);
        else if (cfg.command == "latcount") doc = cmd_latcount(cfg);
        else if (cfg.command == "converge") doc = cmd_converge(cfg);
        else doc = cmd_cells(cfg);
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (cfg.output_path) {
        file.open(*cfg.output_path);
        if (!file) {
            err << "error: cannot write " << *cfg.output_path << '\n';
            return kUsage;
        }
        sink = &file;
    }
    if (cfg.format == "json")
        *sink << to_json(doc).dump(2) << '\n';
    else
        write_csv(*sink, doc);
    return doc.check_failed ? kCheckFailed : kOk;
}

}  // namespace farey_lab::cli
