#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nskm {

using PointId = std::size_t;

// A finite metric space over points 0..size()-1 with a declared upper bound
// on every pairwise distance. Implementations are immutable after
// construction and safe to share between threads.
class MetricSpace {
  public:
    virtual ~MetricSpace() = default;

    virtual std::size_t size() const noexcept = 0;
    virtual double distance(PointId a, PointId b) const = 0;

    // out[i] = distance(from, to[i]). Implementations override this for speed;
    // the value for each pair must equal distance(from, to[i]) bit for bit.
    virtual void distances_from(PointId from, std::span<const PointId> to, std::span<double> out) const;

    double diameter_bound() const noexcept { return diameter_bound_; }

  protected:
    explicit MetricSpace(double diameter_bound) : diameter_bound_(diameter_bound) {}

  private:
    double diameter_bound_;
};

using MetricPtr = std::shared_ptr<const MetricSpace>;

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;
};

struct WeightedGraph {
    std::size_t nodes = 0;
    std::vector<Edge> edges;
};

// Non-tree graphs are materialized as a dense all-pairs matrix; this caps
// their node count. Trees have no such limit.
inline constexpr std::size_t kDenseGraphNodeLimit = 4096;

// Shortest-path metric of a connected, positively weighted undirected graph.
// Without `diameter_bound` the computed diameter is declared; with it, the
// computed diameter must not exceed it.
MetricPtr shortest_path_metric(const WeightedGraph& graph, std::optional<double> diameter_bound = std::nullopt);

// L2 metric over feature rows. With `normalize`, every feature is min-max
// scaled to [0,1] and distances are divided by sqrt(dim), so the diameter
// bound is 1. Otherwise the bound is the bounding-box diagonal.
MetricPtr euclidean_space(const std::vector<std::vector<double>>& rows, bool normalize);

// Explicit symmetric distance matrix (row-major, n*n). Validates the metric
// axioms that can be checked cheaply: zero diagonal, symmetry, nonnegativity.
MetricPtr matrix_metric(std::size_t n, std::vector<double> distances, std::optional<double> diameter_bound = std::nullopt);

}  // namespace nskm
