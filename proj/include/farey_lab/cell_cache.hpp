#pragma once

// Plain-text cell cache. One header line, then one line per cell:
//
//     # farey_lab cells depth=<d> kappa_max=<L>
//     k_1 k_2 ... k_d | x/y,x/y x/y,x/y ...
//
// Vertices are the cell region (not the forward image), counterclockwise,
// every coordinate in exact p/q form.

#include "farey_lab/exact.hpp"
#include "farey_lab/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace farey_lab {

inline std::string cache_header(std::size_t depth, std::int64_t kappa_max) {
    return "# farey_lab cells depth=" + std::to_string(depth) + " kappa_max=" + std::to_string(kappa_max);
}

inline std::string cell_record(const CylinderCell& cell) {
    std::string line;
    for (std::size_t j = 0; j < cell.itinerary.size(); ++j) {
        if (j) line += ' ';
        line += std::to_string(cell.itinerary[j]);
    }
    line += " |";
    for (const auto& v : cell.region.vertices()) line += ' ' + rat_text(v.x) + ',' + rat_text(v.y);
    return line;
}

inline CylinderCell parse_cell_record(const std::string& line) {
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw std::runtime_error("cell record without '|': " + line);
    std::vector<std::int64_t> itinerary;
    {
        std::istringstream in(line.substr(0, bar));
        std::int64_t k;
        while (in >> k) itinerary.push_back(k);
        if (!in.eof()) throw std::runtime_error("bad itinerary in cell record: " + line);
    }
    std::vector<Point> vertices;
    {
        std::istringstream in(line.substr(bar + 1));
        std::string token;
        while (in >> token) {
            const auto comma = token.find(',');
            if (comma == std::string::npos) throw std::runtime_error("bad vertex '" + token + "'");
            vertices.push_back({parse_rat(token.substr(0, comma)), parse_rat(token.substr(comma + 1))});
        }
    }
    if (itinerary.empty() || vertices.size() < 3) throw std::runtime_error("incomplete cell record: " + line);
    return cell_from_region(std::move(itinerary), ConvexPolygon(std::move(vertices)));
}

inline void write_cell_cache(const std::filesystem::path& path, std::size_t depth, std::int64_t kappa_max,
                             const std::vector<CylinderCell>& cells) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write cell cache " + path.string());
    out << cache_header(depth, kappa_max) << '\n';
    for (const auto& cell : cells) out << cell_record(cell) << '\n';
    if (!out) throw std::runtime_error("error writing cell cache " + path.string());
}

/// Cells from the cache, or nullopt if the file is missing or was written
/// for a different (depth, kappa_max). Malformed records throw.
inline std::optional<std::vector<CylinderCell>> read_cell_cache(const std::filesystem::path& path, std::size_t depth,
                                                                std::int64_t kappa_max) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    if (!std::getline(in, line) || line != cache_header(depth, kappa_max)) return std::nullopt;
    std::vector<CylinderCell> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        cells.push_back(parse_cell_record(line));
        if (cells.back().itinerary.size() != depth) throw std::runtime_error("cell record depth mismatch: " + line);
    }
    return cells;
}

/// Area summaries through the cache: read when it matches, otherwise
/// enumerate and (re)write it.
inline std::vector<CellSummary> cached_cell_summaries(const std::optional<std::filesystem::path>& cache, std::size_t depth,
                                                      std::int64_t kappa_max, unsigned threads = 0) {
    if (!cache) return cell_summaries(depth, kappa_max, threads);
    auto cells = read_cell_cache(*cache, depth, kappa_max);
    if (!cells) {
        cells = enumerate_cells(depth, kappa_max, threads);
        write_cell_cache(*cache, depth, kappa_max, *cells);
    }
    std::vector<CellSummary> out;
    out.reserve(cells->size());
    for (auto& c : *cells) out.push_back({std::move(c.itinerary), area(c.region)});
    return out;
}

}  // namespace farey_lab
