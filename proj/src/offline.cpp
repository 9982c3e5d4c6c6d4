#include "nskm/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nskm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exhaustive search over k-subsets of `candidates` (ascending), scored by
// weighted_risk over `support`. Strict improvement keeps the lexicographically
// first minimizer.
class SubsetSearch {
  public:
    SubsetSearch(const MetricSpace& space, std::span<const PointId> candidates, const WeightedSupport& support,
                 std::size_t k)
        : space_(space), candidates_(candidates), support_(support), k_(k), s_(support.points.size()) {}

    std::vector<PointId> run() {
        if (k_ == 1) return run_single();
        rows_.resize(candidates_.size() * s_);
        for (std::size_t c = 0; c < candidates_.size(); ++c)
            space_.distances_from(candidates_[c], support_.points, std::span<double>(rows_.data() + c * s_, s_));
        prefixes_.assign(k_ * s_, kInf);
        chosen_.assign(k_, 0);
        descend(0, 0);
        std::vector<PointId> out;
        for (std::size_t i : best_) out.push_back(candidates_[i]);
        return out;
    }

  private:
    std::vector<PointId> run_single() {
        std::vector<double> row(s_);
        std::size_t best_index = 0;
        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            space_.distances_from(candidates_[c], support_.points, row);
            double total = 0.0;
            for (std::size_t i = 0; i < s_; ++i) total += support_.weights[i] * std::min(kInf, row[i]);
            if (total < best_risk_) {
                best_risk_ = total;
                best_index = c;
            }
        }
        return {candidates_[best_index]};
    }

    void descend(std::size_t depth, std::size_t start) {
        const double* prefix = prefixes_.data() + depth * s_;
        const std::size_t n = candidates_.size();
        if (depth + 1 == k_) {
            for (std::size_t c = start; c < n; ++c) {
                const double* row = rows_.data() + c * s_;
                double total = 0.0;
                for (std::size_t i = 0; i < s_; ++i) total += support_.weights[i] * std::min(prefix[i], row[i]);
                if (total < best_risk_) {
                    best_risk_ = total;
                    chosen_[depth] = c;
                    best_ = chosen_;
                }
            }
            return;
        }
        double* next = prefixes_.data() + (depth + 1) * s_;
        for (std::size_t c = start; c + (k_ - depth) <= n; ++c) {
            const double* row = rows_.data() + c * s_;
            for (std::size_t i = 0; i < s_; ++i) next[i] = std::min(prefix[i], row[i]);
            chosen_[depth] = c;
            descend(depth + 1, c + 1);
        }
    }

    const MetricSpace& space_;
    std::span<const PointId> candidates_;
    const WeightedSupport& support_;
    std::size_t k_;
    std::size_t s_;
    std::vector<double> rows_;
    std::vector<double> prefixes_;
    std::vector<std::size_t> chosen_;
    std::vector<std::size_t> best_;
    double best_risk_ = kInf;
};

std::vector<PointId> best_subset(const MetricSpace& space, std::span<const PointId> candidates,
                                 const WeightedSupport& support, std::size_t k, std::uint64_t budget) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (k >= candidates.size()) return {candidates.begin(), candidates.end()};
    const std::uint64_t count = subset_count(candidates.size(), k);
    if (count > budget) {
        std::ostringstream msg;
        msg << "exhaustive search over " << candidates.size() << " choose " << k << " candidate sets exceeds the budget of "
            << budget << "; use the pam solver instead";
        throw std::runtime_error(msg.str());
    }
    return SubsetSearch(space, candidates, support, k).run();
}

// Distances between the distinct points of a PAM problem: a full matrix when
// small, otherwise recomputed row by row.
class RowCache {
  public:
    RowCache(const MetricSpace& space, const std::vector<PointId>& points) : space_(space), points_(points) {
        const std::size_t n = points.size();
        if (n <= 2048) {
            matrix_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i)
                space.distances_from(points[i], points, std::span<double>(matrix_.data() + i * n, n));
        } else {
            scratch_.resize(n);
        }
    }

    std::span<const double> row(std::size_t i) {
        const std::size_t n = points_.size();
        if (!matrix_.empty()) return {matrix_.data() + i * n, n};
        space_.distances_from(points_[i], points_, scratch_);
        return scratch_;
    }

  private:
    const MetricSpace& space_;
    const std::vector<PointId>& points_;
    std::vector<double> matrix_;
    std::vector<double> scratch_;
};

struct Assignment {
    std::vector<std::size_t> nearest;  // slot of the closest medoid
    std::vector<double> first;
    std::vector<double> second;
};

Assignment assign(RowCache& rows, const std::vector<std::size_t>& medoids, std::size_t n) {
    Assignment a{std::vector<std::size_t>(n, 0), std::vector<double>(n, kInf), std::vector<double>(n, kInf)};
    for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
        const auto row = rows.row(medoids[slot]);
        for (std::size_t o = 0; o < n; ++o) {
            const double d = row[o];
            if (d < a.first[o]) {
                a.second[o] = a.first[o];
                a.first[o] = d;
                a.nearest[o] = slot;
            } else if (d < a.second[o]) {
                a.second[o] = d;
            }
        }
    }
    return a;
}

std::vector<PointId> to_points(const std::vector<std::size_t>& medoids, const WeightedSupport& support) {
    std::vector<PointId> pts;
    for (std::size_t m : medoids) pts.push_back(support.points[m]);
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

std::uint64_t subset_count(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step.
        const std::uint64_t factor = n - k + i;
        if (result > std::numeric_limits<std::uint64_t>::max() / factor) return std::numeric_limits<std::uint64_t>::max();
        result = result * factor / i;
    }
    return result;
}

Clustering exact_discrete_opt(const Sample& sample, std::size_t k, std::uint64_t budget) {
    if (sample.empty()) throw std::invalid_argument("exact_discrete_opt needs a nonempty sample");
    const WeightedSupport support = uniform_support(sample);
    return Clustering(best_subset(sample.space(), support.points, support, k, budget));
}

Clustering exact_continuous_opt(const FiniteDistribution& dist, std::size_t k, std::uint64_t budget) {
    std::vector<PointId> all(dist.space().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return Clustering(best_subset(dist.space(), all, dist.support(), k, budget));
}

PamResult pam_kmedoids_traced(const Sample& sample, std::size_t k, [[maybe_unused]] std::uint64_t seed,
                              std::size_t max_swaps) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (sample.empty()) throw std::invalid_argument("pam_kmedoids needs a nonempty sample");
    const WeightedSupport support = uniform_support(sample);
    const std::size_t n = support.points.size();
    const MetricSpace& space = sample.space();
    PamResult result;
    if (k >= n) {
        result.medoids = Clustering(support.points);
        result.risk_trace.push_back(weighted_risk(space, support, support.points));
        return result;
    }
    const auto& w = support.weights;
    RowCache rows(space, support.points);

    // BUILD: the 1-median, then repeatedly the point with the largest gain.
    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);
    std::vector<double> nearest(n, kInf);
    {
        std::size_t best = 0;
        double best_total = kInf;
        for (std::size_t x = 0; x < n; ++x) {
            const auto row = rows.row(x);
            double total = 0.0;
            for (std::size_t o = 0; o < n; ++o) total += w[o] * row[o];
            if (total < best_total) {
                best_total = total;
                best = x;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        const auto row = rows.row(best);
        for (std::size_t o = 0; o < n; ++o) nearest[o] = row[o];
    }
    while (medoids.size() < k) {
        std::size_t best = n;
        double best_gain = -1.0;
        for (std::size_t x = 0; x < n; ++x) {
            if (is_medoid[x]) continue;
            const auto row = rows.row(x);
            double gain = 0.0;
            for (std::size_t o = 0; o < n; ++o)
                if (row[o] < nearest[o]) gain += w[o] * (nearest[o] - row[o]);
            if (gain > best_gain) {
                best_gain = gain;
                best = x;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        const auto row = rows.row(best);
        for (std::size_t o = 0; o < n; ++o) nearest[o] = std::min(nearest[o], row[o]);
    }

    double current = weighted_risk(space, support, to_points(medoids, support));
    result.risk_trace.push_back(current);

    // SWAP: evaluate every (medoid slot, non-medoid) exchange in O(n) per
    // candidate and apply the single best improvement.
    std::vector<double> loss(k);
    while (result.swaps < max_swaps) {
        const Assignment a = assign(rows, medoids, n);
        double best_delta = 0.0;
        std::size_t best_slot = k;
        std::size_t best_x = n;
        for (std::size_t x = 0; x < n; ++x) {
            if (is_medoid[x]) continue;
            const auto row = rows.row(x);
            std::fill(loss.begin(), loss.end(), 0.0);
            double shared = 0.0;
            for (std::size_t o = 0; o < n; ++o) {
                const double d = row[o];
                if (d < a.first[o]) {
                    shared += w[o] * (d - a.first[o]);
                } else {
                    loss[a.nearest[o]] += w[o] * (std::min(d, a.second[o]) - a.first[o]);
                }
            }
            for (std::size_t slot = 0; slot < k; ++slot) {
                const double delta = shared + loss[slot];
                if (delta < best_delta) {
                    best_delta = delta;
                    best_slot = slot;
                    best_x = x;
                }
            }
        }
        if (best_slot == k || !(best_delta < -1e-12 * std::max(current, 1e-300))) break;

        const std::size_t removed = medoids[best_slot];
        medoids[best_slot] = best_x;
        const double updated = weighted_risk(space, support, to_points(medoids, support));
        if (!(updated < current)) {
            medoids[best_slot] = removed;
            break;
        }
        is_medoid[removed] = 0;
        is_medoid[best_x] = 1;
        current = updated;
        result.risk_trace.push_back(current);
        ++result.swaps;
    }
    result.medoids = Clustering(to_points(medoids, support));
    return result;
}

Clustering pam_kmedoids(const Sample& sample, std::size_t k, std::uint64_t seed, std::size_t max_swaps) {
    return pam_kmedoids_traced(sample, k, seed, max_swaps).medoids;
}

OfflineSolver exact_solver(std::uint64_t budget) {
    return OfflineSolver{"exact", 1.0, [budget](const Sample& s, std::size_t k) { return exact_discrete_opt(s, k, budget); }};
}

OfflineSolver pam_solver(std::uint64_t seed, std::size_t max_swaps) {
    return OfflineSolver{"pam", std::nullopt,
                         [seed, max_swaps](const Sample& s, std::size_t k) { return pam_kmedoids(s, k, seed, max_swaps); }};
}

OfflineSolver make_solver(std::string_view name) {
    if (name == "exact") return exact_solver();
    if (name == "pam") return pam_solver();
    throw std::invalid_argument("unknown solver '" + std::string(name) + "' (expected exact or pam)");
}

std::optional<double> continuous_beta(const OfflineSolver& solver) {
    if (!solver.beta) return std::nullopt;
    return 2.0 * *solver.beta;
}

double risk_ratio(double numerator, double denominator) {
    if (denominator == 0.0) return numerator == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

BetaAudit audit_beta(const OfflineSolver& solver, std::span<const AuditInstance> instances) {
    BetaAudit audit;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const double solver_risk = empirical_risk(inst.sample, solver.solve(inst.sample, inst.k));
        const double exact_risk = empirical_risk(inst.sample, exact_discrete_opt(inst.sample, inst.k));
        const double ratio = risk_ratio(solver_risk, exact_risk);
        audit.ratios.push_back(ratio);
        audit.max_ratio = std::max(audit.max_ratio, ratio);
        if (solver.beta && ratio > *solver.beta) audit.exceeding.push_back(i);
    }
    return audit;
}

}  // namespace nskm
