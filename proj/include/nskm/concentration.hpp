#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nskm/distribution.hpp"

namespace nskm {

struct BoundReport {
    std::string bound_name;
    std::vector<std::pair<std::string, double>> parameters;
    double value = 0.0;
    // Inequality checks only: whether lhs <= rhs held.
    std::optional<bool> verdict;
    double lhs = 0.0;
    double rhs = 0.0;
};

// 16 ln(2/delta) / (n - 1).
double emp_bernstein_threshold(std::size_t n, double delta);

// Whether mu >= 10 ln(1/delta) / n.
bool bernstein_precondition(std::size_t n, double mu, double delta);

// D sqrt((k ln(m/2) + ln(4/delta)) / m).
double uniform_risk_deviation(std::size_t m, std::size_t k, double delta, double D);

// Mass of points strictly closer to c than t is.
double strict_ball_mass(const FiniteDistribution& q, PointId c, PointId t);

// risk(Q,{t}) <= (1 + 1/(1 - tau)) risk(Q,{c}) with tau = strict_ball_mass(Q, c, t).
// No verdict when tau = 1.
BoundReport center_swap_bound_check(const FiniteDistribution& q, PointId c, PointId t);

// risk(Q,T) <= (2 + 2 gamma) risk(Q,O) + k tau D / gamma, tau = max_i strict_ball_mass(Q, o_i, t_i).
// O and T are paired by position.
BoundReport multi_center_swap_check(const FiniteDistribution& q, const Clustering& o, const Clustering& t, double gamma);

// 3 sqrt(delta / trials).
double monte_carlo_slack(double delta, std::size_t trials);

struct MonteCarloReport {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double rate = 0.0;
    double budget = 0.0;  // delta + slack
    bool passed = false;
};

// Bernoulli(mu)^n samples; violation when mean > max(threshold, 2 mu).
MonteCarloReport verify_emp_bernstein(double mu, std::size_t n, double delta, std::size_t trials, std::uint64_t seed,
                                      std::size_t jobs = 1);

// Bernoulli(mu)^n samples; violation when mean < mu / 2. Requires the
// precondition to hold.
MonteCarloReport verify_bernstein(double mu, std::size_t n, double delta, std::size_t trials, std::uint64_t seed,
                                  std::size_t jobs = 1);

// Streams of length m from p; violation when some k-subset T of the space has
// |risk(p,T) - empirical_risk(S,T)| above uniform_risk_deviation. Every
// k-subset is enumerated, so the space must be small.
MonteCarloReport verify_uniform_deviation(const FiniteDistribution& p, std::size_t k, std::size_t m, double delta,
                                          std::size_t trials, std::uint64_t seed, std::size_t jobs = 1);

}  // namespace nskm
