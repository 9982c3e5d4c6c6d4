#include "nskm/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nskm/offline.hpp"
#include "nskm/parallel.hpp"

namespace nskm {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

void check_mu(double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
}

double bernoulli_mean(double mu, std::size_t n, Rng& rng) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) ones += rng.bernoulli(mu) ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(n);
}

template <typename Violated>
MonteCarloReport monte_carlo(std::string name, double delta, std::size_t trials, std::uint64_t seed, std::size_t jobs,
                             Violated&& violated) {
    if (trials == 0) throw std::invalid_argument("Monte Carlo needs at least one trial");
    std::vector<char> outcome(trials, 0);
    parallel_for(trials, jobs, [&](std::size_t t) {
        Rng rng(trial_seed(seed, t));
        outcome[t] = violated(rng) ? 1 : 0;
    });
    MonteCarloReport report;
    report.name = std::move(name);
    report.trials = trials;
    report.violations = static_cast<std::size_t>(std::count(outcome.begin(), outcome.end(), 1));
    report.rate = static_cast<double>(report.violations) / static_cast<double>(trials);
    report.budget = delta + monte_carlo_slack(delta, trials);
    report.passed = report.rate <= report.budget;
    return report;
}

// Calls fn on every k-subset of 0..n-1 (as an ascending index vector).
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k == 0 || k > n) return;
    std::vector<PointId> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        fn(std::span<const PointId>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

double emp_bernstein_threshold(std::size_t n, double delta) {
    if (n < 2) throw std::invalid_argument("empirical Bernstein threshold needs n >= 2");
    check_delta(delta);
    return 16.0 * std::log(2.0 / delta) / static_cast<double>(n - 1);
}

bool bernstein_precondition(std::size_t n, double mu, double delta) {
    if (n == 0) throw std::invalid_argument("Bernstein check needs n >= 1");
    check_delta(delta);
    return mu >= 10.0 * std::log(1.0 / delta) / static_cast<double>(n);
}

double uniform_risk_deviation(std::size_t m, std::size_t k, double delta, double D) {
    if (m < 2) throw std::invalid_argument("uniform deviation needs m >= 2");
    check_delta(delta);
    const double md = static_cast<double>(m);
    return D * std::sqrt((static_cast<double>(k) * std::log(md / 2.0) + std::log(4.0 / delta)) / md);
}

double strict_ball_mass(const FiniteDistribution& q, PointId c, PointId t) {
    const MetricSpace& space = q.space();
    const auto& support = q.support();
    const double radius = space.distance(t, c);
    std::vector<double> dist(support.points.size());
    space.distances_from(c, support.points, dist);
    double mass = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist[i] < radius) mass += support.weights[i];
    return mass;
}

BoundReport center_swap_bound_check(const FiniteDistribution& q, PointId c, PointId t) {
    BoundReport report;
    report.bound_name = "center_swap";
    const double tau = strict_ball_mass(q, c, t);
    report.parameters = {{"c", static_cast<double>(c)}, {"t", static_cast<double>(t)}, {"tau", tau}};
    const PointId cs[] = {c};
    const PointId ts[] = {t};
    report.lhs = risk(q, ts);
    report.value = report.lhs;
    if (tau >= 1.0) return report;
    report.rhs = (1.0 + 1.0 / (1.0 - tau)) * risk(q, cs);
    report.verdict = report.lhs <= report.rhs + 1e-12;
    return report;
}

BoundReport multi_center_swap_check(const FiniteDistribution& q, const Clustering& o, const Clustering& t, double gamma) {
    if (o.size() != t.size() || o.empty()) throw std::invalid_argument("clusterings must be nonempty and of equal size");
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("gamma must lie in (0, 1/2)");
    double tau = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) tau = std::max(tau, strict_ball_mass(q, o.centers()[i], t.centers()[i]));
    const double k = static_cast<double>(o.size());
    const double D = q.space().diameter_bound();
    BoundReport report;
    report.bound_name = "multi_center_swap";
    report.parameters = {{"k", k}, {"gamma", gamma}, {"tau", tau}, {"D", D}};
    report.lhs = risk(q, t);
    report.rhs = (2.0 + 2.0 * gamma) * risk(q, o) + k * tau * D / gamma;
    report.value = report.lhs;
    report.verdict = report.lhs <= report.rhs + 1e-12;
    return report;
}

double monte_carlo_slack(double delta, std::size_t trials) {
    if (trials == 0) throw std::invalid_argument("slack needs at least one trial");
    return 3.0 * std::sqrt(delta / static_cast<double>(trials));
}

MonteCarloReport verify_emp_bernstein(double mu, std::size_t n, double delta, std::size_t trials, std::uint64_t seed,
                                      std::size_t jobs) {
    check_mu(mu);
    const double limit = std::max(emp_bernstein_threshold(n, delta), 2.0 * mu);
    return monte_carlo("emp_bernstein", delta, trials, seed, jobs,
                       [&](Rng& rng) { return bernoulli_mean(mu, n, rng) > limit; });
}

MonteCarloReport verify_bernstein(double mu, std::size_t n, double delta, std::size_t trials, std::uint64_t seed,
                                  std::size_t jobs) {
    check_mu(mu);
    if (!bernstein_precondition(n, mu, delta))
        throw std::invalid_argument("Bernstein precondition mu >= 10 ln(1/delta)/n does not hold");
    return monte_carlo("bernstein", delta, trials, seed, jobs,
                       [&](Rng& rng) { return bernoulli_mean(mu, n, rng) < mu / 2.0; });
}

MonteCarloReport verify_uniform_deviation(const FiniteDistribution& p, std::size_t k, std::size_t m, double delta,
                                          std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    const std::size_t n = p.space().size();
    if (k == 0 || k > n) throw std::invalid_argument("k must lie in [1, space size]");
    if (subset_count(n, k) > 100'000) throw std::invalid_argument("too many subsets to enumerate");
    const double limit = uniform_risk_deviation(m, k, delta, p.space().diameter_bound());
    std::vector<double> true_risk;
    for_each_subset(n, k, [&](std::span<const PointId> t) { true_risk.push_back(risk(p, t)); });
    return monte_carlo("uniform_deviation", delta, trials, seed, jobs, [&](Rng& rng) {
        const Sample s = sample_stream(p, m, rng);
        const WeightedSupport support = uniform_support(s);
        std::size_t i = 0;
        bool violated = false;
        for_each_subset(n, k, [&](std::span<const PointId> t) {
            const double gap = std::abs(true_risk[i++] - weighted_risk(p.space(), support, t));
            violated = violated || gap > limit;
        });
        return violated;
    });
}

}  // namespace nskm
