#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nskm/distribution.hpp"
#include "nskm/io.hpp"

namespace nskm {

struct InstanceRoles {
    std::optional<PointId> o;
    std::optional<PointId> v;
    std::vector<PointId> u;
    std::vector<PointId> y;
};

struct AdversarialInstance {
    std::string name;
    WeightedGraph graph;
    MetricPtr space;
    FiniteDistribution p;
    InstanceRoles roles;
    std::size_t m1 = 0;
    double q = 0.0;
    double eta = 0.0;
};

// Hub o = node 0 with m1 - 1 unit spokes; P uniform over all m1 nodes.
AdversarialInstance star_instance(std::size_t m1);

// Nodes o = 0, v = 1, U = 2..m1+1, Y = m1+2..2m1+1. Edges o-u and o-v of
// weight 1, v-y of weight 2 - eta with eta = 1/(4 m1). P(o) = 0,
// P(v) = 1/m1, P(Y) = 2q and P(U) = 1 - 2q - 1/m1, uniform within U and Y.
// Requires m1 >= 4 and 0 < q < (1 - 1/m1)/2.
AdversarialInstance two_hub_instance(std::size_t m1, double q);

GraphInstance to_graph_instance(const AdversarialInstance& instance);

struct TwoHubRisks {
    double risk_o = 0.0;
    double risk_y = 0.0;
    double ratio = 0.0;
};

// Risks of {o} and of a single Y node from the instance's shortest-path
// distances (y to another y is 4 - 2 eta).
TwoHubRisks two_hub_closed_form(std::size_t m1, double q);

// q = 9 ln(2m^2/delta)/m at stream length m = 2 m1, delta = 0.1.
double tightness_q_schedule(std::size_t m1);

struct Factor2Trial {
    std::uint64_t seed = 0;
    std::size_t hub_count_phase1 = 0;
    bool event = false;
    double risk_out = 0.0;
    double risk_blackbox = 0.0;
    double predicted = 0.0;  // 2 risk_blackbox - 1/m1
};

struct Factor2Stats {
    std::size_t m1 = 0;
    std::size_t trials = 0;
    std::size_t events = 0;
    double event_rate = 0.0;
    std::size_t equalities = 0;
    double exact_equality_rate = 0.0;  // among event trials
    double max_abs_error = 0.0;        // among event trials
    std::vector<Factor2Trial> records;
};

// SKM with the exact solver and k = 1 on star streams of length 2 m1. The
// event is: o appears exactly once in phase 1 and the first phase-2 pick is a
// spoke. Equality is checked to 1e-12.
Factor2Stats factor2_experiment(std::size_t m1, std::size_t trials, std::uint64_t seed, std::size_t jobs = 1);

struct TightnessTrial {
    std::uint64_t seed = 0;
    bool selected = false;
    bool in_y = false;
    double risk_out = 0.0;
    double ratio = 0.0;  // risk_out / optimal risk; NaN without a selection
};

struct TightnessStats {
    std::size_t m1 = 0;
    double q = 0.0;
    std::size_t trials = 0;
    double opt_risk = 0.0;
    std::size_t in_y = 0;
    double fraction_in_y = 0.0;
    std::size_t shortfalls = 0;
    std::optional<double> conditional_ratio_median;  // among trials with T_out in Y
    // 0.1, 0.25, 0.5, 0.75, 0.9 quantiles of the ratio over trials with a selection.
    std::vector<double> unconditional_ratio_quantiles;
    double closed_form_ratio = 0.0;
    std::vector<TightnessTrial> records;
};

// SKM with the exact solver and k = 1 on two-hub streams of length 2 m1.
TightnessStats tightness_experiment(std::size_t m1, double q, std::size_t trials, std::uint64_t seed,
                                    std::size_t jobs = 1);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double level);

}  // namespace nskm
