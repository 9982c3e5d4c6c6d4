#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nskm/distribution.hpp"

namespace nskm {

inline constexpr std::uint64_t kDefaultSubsetBudget = 2'000'000;

// Minimizer of empirical_risk(sample, T) over k-subsets T of the sample's
// distinct points; ties go to the lexicographically smallest index tuple.
// Returns all distinct points when there are at most k of them.
Clustering exact_discrete_opt(const Sample& sample, std::size_t k, std::uint64_t budget = kDefaultSubsetBudget);

// Minimizer of risk(dist, T) over k-subsets of the whole space.
Clustering exact_continuous_opt(const FiniteDistribution& dist, std::size_t k,
                                std::uint64_t budget = kDefaultSubsetBudget);

// Number of k-subsets of n items, saturating at UINT64_MAX.
std::uint64_t subset_count(std::size_t n, std::size_t k);

struct PamResult {
    Clustering medoids;
    // Empirical risk after BUILD, then after each accepted swap.
    std::vector<double> risk_trace;
    std::size_t swaps = 0;
};

// k-medoids: greedy BUILD then best-improvement SWAP until no swap lowers the
// empirical risk or max_swaps swaps were made. Works on the weighted distinct
// points of the sample. Both phases are deterministic with lowest-index tie
// breaking, so the result does not depend on `seed`.
PamResult pam_kmedoids_traced(const Sample& sample, std::size_t k, std::uint64_t seed = 0, std::size_t max_swaps = 1000);
Clustering pam_kmedoids(const Sample& sample, std::size_t k, std::uint64_t seed = 0, std::size_t max_swaps = 1000);

// A black-box offline k-median algorithm. `beta` is the declared factor on the
// discrete objective (centers drawn from the sample); a heuristic declares none.
struct OfflineSolver {
    std::string name;
    std::optional<double> beta;
    std::function<Clustering(const Sample&, std::size_t)> solve;
};

OfflineSolver exact_solver(std::uint64_t budget = kDefaultSubsetBudget);
OfflineSolver pam_solver(std::uint64_t seed = 0, std::size_t max_swaps = 1000);
// "exact" or "pam".
OfflineSolver make_solver(std::string_view name);

// Approximation factor against risk over the whole space (OPT_S), as used in
// the streaming risk bounds: a discrete minimizer is a 2-approximation there.
std::optional<double> continuous_beta(const OfflineSolver& solver);

struct AuditInstance {
    Sample sample;
    std::size_t k;
};

struct BetaAudit {
    std::vector<double> ratios;  // solver risk / exact risk; 0/0 -> 1, x/0 -> inf
    double max_ratio = 1.0;
    std::vector<std::size_t> exceeding;  // instances whose ratio exceeds the declared beta
};

BetaAudit audit_beta(const OfflineSolver& solver, std::span<const AuditInstance> instances);

// 0/0 -> 1, x/0 -> +inf.
double risk_ratio(double numerator, double denominator);

}  // namespace nskm
