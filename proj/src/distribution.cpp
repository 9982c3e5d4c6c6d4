#include "nskm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nskm {

double weighted_risk(const MetricSpace& space, const WeightedSupport& support, std::span<const PointId> centers) {
    if (centers.empty()) throw std::invalid_argument("risk needs at least one center");
    const std::size_t n = support.points.size();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<double> row(n);
    for (PointId c : centers) {
        if (c >= space.size()) throw std::out_of_range("center index outside the metric space");
        space.distances_from(c, support.points, row);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], row[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += support.weights[i] * nearest[i];
    return total;
}

FiniteDistribution::FiniteDistribution(MetricPtr space, std::vector<double> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
    if (!space_) throw std::invalid_argument("distribution needs a metric space");
    if (mass_.size() != space_->size()) {
        std::ostringstream msg;
        msg << "distribution has " << mass_.size() << " weights for a space of " << space_->size() << " points";
        throw std::invalid_argument(msg.str());
    }
    cumulative_.resize(mass_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        if (!(mass_[i] >= 0.0) || !std::isfinite(mass_[i])) {
            std::ostringstream msg;
            msg << "weight of point " << i << " is negative or non-finite";
            throw std::invalid_argument(msg.str());
        }
        total += mass_[i];
        cumulative_[i] = total;
        if (mass_[i] > 0.0) {
            support_.points.push_back(i);
            support_.weights.push_back(mass_[i]);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weights sum to " << total << ", expected 1";
        throw std::invalid_argument(msg.str());
    }
}

FiniteDistribution FiniteDistribution::uniform(MetricPtr space) {
    const std::size_t n = space->size();
    return FiniteDistribution(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDistribution FiniteDistribution::point_mass(MetricPtr space, PointId point) {
    std::vector<double> mass(space->size(), 0.0);
    mass.at(point) = 1.0;
    return FiniteDistribution(std::move(space), std::move(mass));
}

FiniteDistribution FiniteDistribution::uniform_over(MetricPtr space, std::span<const PointId> points) {
    if (points.empty()) throw std::invalid_argument("uniform distribution over an empty point list");
    std::vector<std::size_t> counts(space->size(), 0);
    for (PointId p : points) counts.at(p) += 1;
    std::vector<double> mass(space->size(), 0.0);
    const double n = static_cast<double>(points.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i]) mass[i] = static_cast<double>(counts[i]) / n;
    return FiniteDistribution(std::move(space), std::move(mass));
}

PointId FiniteDistribution::draw(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) return support_.points.back();
    return static_cast<PointId>(it - cumulative_.begin());
}

Sample::Sample(MetricPtr space, std::vector<PointId> items) : space_(std::move(space)), items_(std::move(items)) {
    if (!space_) throw std::invalid_argument("sample needs a metric space");
    for (PointId p : items_)
        if (p >= space_->size()) {
            std::ostringstream msg;
            msg << "sample item " << p << " is not a point of the space (size " << space_->size() << ")";
            throw std::out_of_range(msg.str());
        }
}

Sample Sample::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > items_.size()) throw std::out_of_range("sample slice out of range");
    return Sample(space_, std::vector<PointId>(items_.begin() + static_cast<std::ptrdiff_t>(begin),
                                               items_.begin() + static_cast<std::ptrdiff_t>(end)));
}

WeightedSupport uniform_support(const Sample& sample) {
    if (sample.empty()) throw std::invalid_argument("empty sample has no uniform distribution");
    std::vector<PointId> sorted(sample.items().begin(), sample.items().end());
    std::sort(sorted.begin(), sorted.end());
    WeightedSupport support;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        support.points.push_back(sorted[i]);
        support.weights.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    return support;
}

FiniteDistribution empirical_distribution(const Sample& sample) {
    return FiniteDistribution::uniform_over(sample.space_ptr(), sample.items());
}

std::size_t distinct_count(const Sample& sample) {
    std::vector<PointId> sorted(sample.items().begin(), sample.items().end());
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Clustering::Clustering(std::vector<PointId> offline_centers) {
    for (PointId p : offline_centers) add(p);
}

void Clustering::add(PointId point, std::optional<std::size_t> stream_position) {
    if (contains(point)) {
        std::ostringstream msg;
        msg << "point " << point << " is already a center";
        throw std::invalid_argument(msg.str());
    }
    centers_.push_back(point);
    provenance_.push_back(stream_position);
}

bool Clustering::contains(PointId point) const {
    return std::find(centers_.begin(), centers_.end(), point) != centers_.end();
}

double risk(const FiniteDistribution& dist, std::span<const PointId> centers) {
    return weighted_risk(dist.space(), dist.support(), centers);
}

double risk(const FiniteDistribution& dist, const Clustering& clustering) { return risk(dist, clustering.centers()); }

double empirical_risk(const Sample& sample, std::span<const PointId> centers) {
    if (centers.empty()) throw std::invalid_argument("risk needs at least one center");
    return weighted_risk(sample.space(), uniform_support(sample), centers);
}

double empirical_risk(const Sample& sample, const Clustering& clustering) {
    return empirical_risk(sample, clustering.centers());
}

Sample sample_stream(const FiniteDistribution& dist, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    return sample_stream(dist, m, rng);
}

Sample sample_stream(const FiniteDistribution& dist, std::size_t m, Rng& rng) {
    if (m == 0) throw std::invalid_argument("stream length must be at least 1");
    std::vector<PointId> items(m);
    for (auto& item : items) item = dist.draw(rng);
    return Sample(dist.space_ptr(), std::move(items));
}

}  // namespace nskm
