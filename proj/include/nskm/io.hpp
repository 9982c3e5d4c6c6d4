#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "nskm/metric.hpp"

namespace nskm {

// Numeric CSV: comma separated, one point per row, optional single header
// line (recognized by a non-numeric cell in the first row). Errors name the
// 1-based row and column of the offending cell.
std::vector<std::vector<double>> parse_csv(std::istream& in);
std::vector<std::vector<double>> load_dataset(const std::filesystem::path& path);

// Line-based graph instance:
//   nodes N
//   node <id> <probability>      (N lines)
//   edge <i> <j> <weight>        (any number)
// Blank lines and lines starting with '#' are ignored.
struct GraphInstance {
    WeightedGraph graph;
    std::vector<double> probabilities;
};

GraphInstance parse_graph_instance(std::istream& in);
GraphInstance load_graph_instance(const std::filesystem::path& path);
void write_graph_instance(std::ostream& out, const GraphInstance& instance);

// True when the file starts (after comments) with a "nodes" line.
bool looks_like_graph_instance(const std::filesystem::path& path);

}  // namespace nskm
