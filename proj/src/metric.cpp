#include "nskm/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace nskm {

void MetricSpace::distances_from(PointId from, std::span<const PointId> to, std::span<double> out) const {
    for (std::size_t i = 0; i < to.size(); ++i) out[i] = distance(from, to[i]);
}

namespace {

class DenseMetric final : public MetricSpace {
  public:
    DenseMetric(std::size_t n, std::vector<double> d, double diameter)
        : MetricSpace(diameter), n_(n), d_(std::move(d)) {}

    std::size_t size() const noexcept override { return n_; }
    double distance(PointId a, PointId b) const override { return d_[a * n_ + b]; }
    void distances_from(PointId from, std::span<const PointId> to, std::span<double> out) const override {
        const double* row = d_.data() + from * n_;
        for (std::size_t i = 0; i < to.size(); ++i) out[i] = row[to[i]];
    }

  private:
    std::size_t n_;
    std::vector<double> d_;
};

class EuclideanMetric final : public MetricSpace {
  public:
    EuclideanMetric(std::size_t dim, std::vector<double> values, double divisor, double diameter)
        : MetricSpace(diameter), dim_(dim), values_(std::move(values)), divisor_(divisor) {}

    std::size_t size() const noexcept override { return values_.size() / dim_; }

    double distance(PointId a, PointId b) const override {
        const double* x = values_.data() + a * dim_;
        const double* y = values_.data() + b * dim_;
        double sum = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double diff = x[i] - y[i];
            sum += diff * diff;
        }
        return std::sqrt(sum / divisor_);
    }

    void distances_from(PointId from, std::span<const PointId> to, std::span<double> out) const override {
        for (std::size_t i = 0; i < to.size(); ++i) out[i] = distance(from, to[i]);
    }

  private:
    std::size_t dim_;
    std::vector<double> values_;
    double divisor_;
};

// Rooted tree with O(1) lowest common ancestor queries from an Euler tour and
// a sparse table of depth minima. d(a,b) = h(a) + h(b) - 2 h(lca(a,b)) where
// h is the weighted distance from the root.
struct TreeIndex {
    std::vector<double> root_distance;
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> level;
    std::vector<std::vector<std::uint32_t>> table;

    PointId lca(PointId a, PointId b) const {
        std::uint32_t lo = first[a];
        std::uint32_t hi = first[b];
        if (lo > hi) std::swap(lo, hi);
        const std::uint32_t span = hi - lo + 1;
        const unsigned j = 31u - static_cast<unsigned>(__builtin_clz(span));
        const std::uint32_t x = table[j][lo];
        const std::uint32_t y = table[j][hi + 1 - (1u << j)];
        return level[x] <= level[y] ? x : y;
    }

    double distance(PointId a, PointId b) const {
        const PointId l = lca(a, b);
        return (root_distance[a] + root_distance[b]) - 2.0 * root_distance[l];
    }
};

class TreeMetric final : public MetricSpace {
  public:
    TreeMetric(TreeIndex index, double diameter) : MetricSpace(diameter), index_(std::move(index)) {}

    std::size_t size() const noexcept override { return index_.root_distance.size(); }
    double distance(PointId a, PointId b) const override { return index_.distance(a, b); }
    void distances_from(PointId from, std::span<const PointId> to, std::span<double> out) const override {
        for (std::size_t i = 0; i < to.size(); ++i) out[i] = index_.distance(from, to[i]);
    }

  private:
    TreeIndex index_;
};

using Adjacency = std::vector<std::vector<std::pair<std::size_t, double>>>;

Adjacency build_adjacency(const WeightedGraph& g) {
    Adjacency adj(g.nodes);
    for (const auto& e : g.edges) {
        adj[e.a].emplace_back(e.b, e.weight);
        adj[e.b].emplace_back(e.a, e.weight);
    }
    return adj;
}

void validate_graph(const WeightedGraph& g) {
    if (g.nodes == 0) throw std::invalid_argument("graph must have at least one node");
    for (const auto& e : g.edges) {
        if (e.a >= g.nodes || e.b >= g.nodes) {
            std::ostringstream msg;
            msg << "edge (" << e.a << ", " << e.b << ") references a node outside [0, " << g.nodes << ")";
            throw std::invalid_argument(msg.str());
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            std::ostringstream msg;
            msg << "edge (" << e.a << ", " << e.b << ") has nonpositive or non-finite weight " << e.weight;
            throw std::invalid_argument(msg.str());
        }
    }
}

void require_connected(const Adjacency& adj) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, w] : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    for (std::size_t v = 0; v < adj.size(); ++v) {
        if (!seen[v]) {
            std::ostringstream msg;
            msg << "graph is disconnected: node " << v << " is unreachable from node 0";
            throw std::invalid_argument(msg.str());
        }
    }
}

TreeIndex build_tree(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<double> root_distance(n, 0.0);
    std::vector<std::uint32_t> first(n, 0);
    std::vector<std::uint32_t> depth(n, 0);
    std::vector<std::uint32_t> euler;
    euler.reserve(2 * n);

    // Iterative DFS: (node, parent, next-neighbor cursor).
    struct Frame {
        std::size_t node;
        std::size_t parent;
        std::size_t cursor;
    };
    std::vector<Frame> stack{{0, n, 0}};
    first[0] = 0;
    euler.push_back(0);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.cursor < adj[f.node].size()) {
            const auto [child, w] = adj[f.node][f.cursor++];
            if (child == f.parent) continue;
            root_distance[child] = root_distance[f.node] + w;
            depth[child] = depth[f.node] + 1;
            first[child] = static_cast<std::uint32_t>(euler.size());
            euler.push_back(static_cast<std::uint32_t>(child));
            stack.push_back({child, f.node, 0});
        } else {
            stack.pop_back();
            if (!stack.empty()) euler.push_back(static_cast<std::uint32_t>(stack.back().node));
        }
    }

    std::vector<std::uint32_t> level(n);
    for (std::size_t v = 0; v < n; ++v) level[v] = depth[v];

    std::vector<std::vector<std::uint32_t>> table;
    table.push_back(euler);
    for (std::size_t j = 1; (std::size_t{1} << j) <= euler.size(); ++j) {
        const auto& prev = table.back();
        const std::size_t half = std::size_t{1} << (j - 1);
        std::vector<std::uint32_t> row(euler.size() - (std::size_t{1} << j) + 1);
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::uint32_t x = prev[i];
            const std::uint32_t y = prev[i + half];
            row[i] = level[x] <= level[y] ? x : y;
        }
        table.push_back(std::move(row));
    }
    return TreeIndex{std::move(root_distance), std::move(first), std::move(level), std::move(table)};
}

double tree_diameter(const TreeIndex& tree) {
    const std::size_t n = tree.root_distance.size();
    const auto& h = tree.root_distance;
    const PointId far = static_cast<PointId>(std::max_element(h.begin(), h.end()) - h.begin());
    double best = 0.0;
    for (PointId v = 0; v < n; ++v) best = std::max(best, tree.distance(far, v));
    return best;
}

std::vector<double> all_pairs_dijkstra(const Adjacency& adj) {
    const std::size_t n = adj.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(n * n, inf);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        double* row = d.data() + s * n;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        row[s] = 0.0;
        heap.emplace(0.0, s);
        while (!heap.empty()) {
            const auto [du, u] = heap.top();
            heap.pop();
            if (du > row[u]) continue;
            for (const auto& [v, w] : adj[u]) {
                const double alt = du + w;
                if (alt < row[v]) {
                    row[v] = alt;
                    heap.emplace(alt, v);
                }
            }
        }
    }
    // Path sums can differ in the last bit between directions.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::min(d[i * n + j], d[j * n + i]);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    return d;
}

double check_declared_bound(double computed, std::optional<double> declared) {
    if (!declared) return computed;
    if (!(*declared >= 0.0) || !std::isfinite(*declared))
        throw std::invalid_argument("diameter bound must be a finite nonnegative number");
    if (computed > *declared * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "declared diameter bound " << *declared << " is smaller than the computed diameter " << computed;
        throw std::invalid_argument(msg.str());
    }
    return *declared;
}

}  // namespace

MetricPtr shortest_path_metric(const WeightedGraph& graph, std::optional<double> diameter_bound) {
    validate_graph(graph);
    const Adjacency adj = build_adjacency(graph);
    require_connected(adj);

    if (graph.edges.size() + 1 == graph.nodes) {
        TreeIndex tree = build_tree(adj);
        const double bound = check_declared_bound(tree_diameter(tree), diameter_bound);
        return std::make_shared<TreeMetric>(std::move(tree), bound);
    }
    if (graph.nodes > kDenseGraphNodeLimit) {
        std::ostringstream msg;
        msg << "non-tree graph with " << graph.nodes << " nodes exceeds the dense all-pairs limit of "
            << kDenseGraphNodeLimit;
        throw std::invalid_argument(msg.str());
    }
    std::vector<double> d = all_pairs_dijkstra(adj);
    const double diameter = *std::max_element(d.begin(), d.end());
    const double bound = check_declared_bound(diameter, diameter_bound);
    return std::make_shared<DenseMetric>(graph.nodes, std::move(d), bound);
}

MetricPtr euclidean_space(const std::vector<std::vector<double>>& rows, bool normalize) {
    if (rows.empty()) throw std::invalid_argument("euclidean space needs at least one row");
    const std::size_t dim = rows.front().size();
    if (dim == 0) throw std::invalid_argument("feature dimension must be at least 1");

    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    std::vector<double> values;
    values.reserve(rows.size() * dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dim) {
            std::ostringstream msg;
            msg << "row " << r << " has " << rows[r].size() << " features, expected " << dim;
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t c = 0; c < dim; ++c) {
            const double v = rows[r][c];
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite value at row " << r << ", column " << c;
                throw std::invalid_argument(msg.str());
            }
            lo[c] = std::min(lo[c], v);
            hi[c] = std::max(hi[c], v);
            values.push_back(v);
        }
    }

    if (normalize) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::size_t c = i % dim;
            const double range = hi[c] - lo[c];
            values[i] = range > 0.0 ? (values[i] - lo[c]) / range : 0.0;
        }
        return std::make_shared<EuclideanMetric>(dim, std::move(values), static_cast<double>(dim), 1.0);
    }
    double diag = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        const double range = hi[c] - lo[c];
        diag += range * range;
    }
    return std::make_shared<EuclideanMetric>(dim, std::move(values), 1.0, std::sqrt(diag));
}

MetricPtr matrix_metric(std::size_t n, std::vector<double> distances, std::optional<double> diameter_bound) {
    if (n == 0) throw std::invalid_argument("metric needs at least one point");
    if (distances.size() != n * n) throw std::invalid_argument("distance matrix must have n*n entries");
    double diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (distances[i * n + i] != 0.0) throw std::invalid_argument("distance matrix diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = distances[i * n + j];
            if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("distances must be finite and nonnegative");
            if (v != distances[j * n + i]) throw std::invalid_argument("distance matrix must be symmetric");
            diameter = std::max(diameter, v);
        }
    }
    const double bound = check_declared_bound(diameter, diameter_bound);
    return std::make_shared<DenseMetric>(n, std::move(distances), bound);
}

}  // namespace nskm
