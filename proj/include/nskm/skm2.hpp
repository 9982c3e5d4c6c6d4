#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nskm/distribution.hpp"
#include "nskm/skm.hpp"

namespace nskm {

// The first half of an SKM2 stream: S0 (first floor(m/4) items) for risk
// evaluation and k level samples S1..Sk sharing the rest of the half, with
// remainders going to the lowest levels.
struct SubSamples {
    Sample s0;
    std::vector<Sample> levels;
    double q = 0.0;
};

SubSamples split_subsamples(const Sample& stream, std::size_t k, double q);

// (r, q)-goodness with a memo keyed on the sorted center tuple and r.
// A k-tuple Z is good when its S0 risk is <= r. A shorter tuple Z of length j
// is good when at least a 2q fraction of the items x of level j+1 (counted
// with multiplicity) make Z + {x} good. Tuples are multisets.
class GoodnessMemo {
  public:
    explicit GoodnessMemo(const SubSamples& sub);

    bool is_good(std::span<const PointId> z, double r);

    // Verdicts computed (memo misses) over the memo's lifetime, and verdicts
    // stored for the current radius. Asking at a new radius drops the stored ones.
    std::size_t evaluations() const noexcept { return evaluations_; }
    std::size_t entries() const noexcept { return memo_.size(); }

    const SubSamples& subsamples() const noexcept { return sub_; }

  private:
    struct KeyHash {
        std::size_t operator()(const std::vector<PointId>& z) const noexcept;
    };

    bool evaluate(const std::vector<PointId>& sorted, double r);
    double s0_risk(std::span<const PointId> z);
    const std::vector<double>& row(PointId p);
    std::size_t required(std::size_t level_size) const;

    const SubSamples& sub_;
    std::size_t k_;
    WeightedSupport s0_support_;
    std::unordered_map<PointId, std::vector<double>> rows_;
    std::unordered_map<std::vector<PointId>, bool, KeyHash> memo_;
    double radius_ = 0.0;
    std::vector<std::size_t> required_;
    std::size_t evaluations_ = 0;
};

bool is_good(std::span<const PointId> z, double r, GoodnessMemo& memo);

// Grid value D * beta_m * (1 + beta_m)^n with beta_m = 1/sqrt(m).
double grid_value(std::size_t m, double D, std::size_t n);

struct GoodRadius {
    double r = 0.0;
    std::size_t grid_index = 0;
};

// Smallest grid value at which the empty tuple is good. Throws when 2q > 1.
GoodRadius min_good_r(GoodnessMemo& memo, std::size_t m, double D);

// (32 k^2 ln(8m) + 32 k ln(8/delta)) / m. Throws when the value is >= 1/2.
double default_q_skm2(std::size_t m, std::size_t k, double delta);

struct Skm2Options {
    double delta = 0.1;
    std::size_t k_max_guard = 3;
    std::optional<double> q_override;
};

struct Skm2Selection {
    std::size_t position = 0;
    PointId point = 0;
};

struct Skm2Trace {
    double q_used = 0.0;
    double beta_m = 0.0;
    double r_selected = 0.0;
    std::size_t grid_index = 0;
    std::size_t goodness_evaluations = 0;
    std::size_t s0_size = 0;
    std::vector<std::size_t> level_sizes;
    std::vector<Skm2Selection> selections;
    std::size_t shortfall = 0;
};

struct Skm2Result {
    Clustering centers;
    Skm2Trace trace;
};

// Requires m >= 8k and k <= k_max_guard. Phase 2 takes an item whenever the
// selected centers plus that item stay good at the selected radius.
Skm2Result run_skm2(const Sample& stream, std::size_t k, const Skm2Options& options = {});

// coef = (1 + beta_m)(2 + 2 gamma);
// additive = D [(1 + beta_m)(4 q k / gamma + eps) + eps], eps = sqrt((2k ln m + 2 ln(8/delta)) / m).
RiskBound skm2_risk_bound(std::size_t m, std::size_t k, double delta, double gamma, double D);

}  // namespace nskm
