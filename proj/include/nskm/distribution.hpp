#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nskm/metric.hpp"
#include "nskm/rng.hpp"

namespace nskm {

// Distinct points (ascending) with weights. Every risk in the library is
// evaluated through this one representation so that the same clustering gets
// bit-identical risk values no matter which module computes it.
struct WeightedSupport {
    std::vector<PointId> points;
    std::vector<double> weights;
};

// Sum over the support of weight * min distance to a center. Centers may be
// given in any order and may repeat. Requires at least one center.
double weighted_risk(const MetricSpace& space, const WeightedSupport& support, std::span<const PointId> centers);

class FiniteDistribution {
  public:
    // Weights must be nonnegative and sum to 1 within 1e-9.
    FiniteDistribution(MetricPtr space, std::vector<double> mass);

    static FiniteDistribution uniform(MetricPtr space);
    static FiniteDistribution point_mass(MetricPtr space, PointId point);
    // Uniform over the listed points (duplicates add mass).
    static FiniteDistribution uniform_over(MetricPtr space, std::span<const PointId> points);

    const MetricSpace& space() const noexcept { return *space_; }
    const MetricPtr& space_ptr() const noexcept { return space_; }
    std::span<const double> mass() const noexcept { return mass_; }
    double mass(PointId p) const { return mass_[p]; }
    const WeightedSupport& support() const noexcept { return support_; }

    PointId draw(Rng& rng) const;

  private:
    MetricPtr space_;
    std::vector<double> mass_;
    std::vector<double> cumulative_;
    WeightedSupport support_;
};

// An ordered sequence of point indices; duplicates are distinct items
// identified by their position.
class Sample {
  public:
    Sample(MetricPtr space, std::vector<PointId> items);

    const MetricSpace& space() const noexcept { return *space_; }
    const MetricPtr& space_ptr() const noexcept { return space_; }
    std::span<const PointId> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    PointId operator[](std::size_t position) const { return items_[position]; }

    // Items at positions [begin, end).
    Sample slice(std::size_t begin, std::size_t end) const;

  private:
    MetricPtr space_;
    std::vector<PointId> items_;
};

// Distinct points of the sample with weight count/size.
WeightedSupport uniform_support(const Sample& sample);
// The same support expressed as a distribution over the whole space.
FiniteDistribution empirical_distribution(const Sample& sample);

// Number of distinct points in the sample.
std::size_t distinct_count(const Sample& sample);

// Centers with provenance: the stream position a center was selected at, or
// none for centers chosen offline.
class Clustering {
  public:
    Clustering() = default;
    explicit Clustering(std::vector<PointId> offline_centers);

    // Throws if the point is already a center.
    void add(PointId point, std::optional<std::size_t> stream_position = std::nullopt);
    bool contains(PointId point) const;

    std::span<const PointId> centers() const noexcept { return centers_; }
    std::span<const std::optional<std::size_t>> provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return centers_.size(); }
    bool empty() const noexcept { return centers_.empty(); }

    bool operator==(const Clustering&) const = default;

  private:
    std::vector<PointId> centers_;
    std::vector<std::optional<std::size_t>> provenance_;
};

double risk(const FiniteDistribution& dist, std::span<const PointId> centers);
double risk(const FiniteDistribution& dist, const Clustering& clustering);

double empirical_risk(const Sample& sample, std::span<const PointId> centers);
double empirical_risk(const Sample& sample, const Clustering& clustering);

// m i.i.d. draws; the same (distribution, m, seed) always gives the same items.
Sample sample_stream(const FiniteDistribution& dist, std::size_t m, std::uint64_t seed);
Sample sample_stream(const FiniteDistribution& dist, std::size_t m, Rng& rng);

}  // namespace nskm
