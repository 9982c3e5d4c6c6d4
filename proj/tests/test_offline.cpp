#include <doctest.h>

#include <cmath>
#include <limits>

#include "nskm/adversarial.hpp"
#include "nskm/offline.hpp"
#include "oracles.hpp"

using namespace nskm;

namespace {

MetricPtr random_plane(std::size_t n, Rng& rng) {
    std::vector<std::vector<double>> rows(n);
    for (auto& r : rows) r = {rng.uniform(), rng.uniform()};
    return euclidean_space(rows, false);
}

Sample random_sample(const MetricPtr& space, std::size_t size, Rng& rng) {
    std::vector<PointId> items(size);
    for (auto& x : items) x = rng.below(space->size());
    return Sample(space, items);
}

std::vector<PointId> distinct(const Sample& s) { return uniform_support(s).points; }

}  // namespace

TEST_CASE("subset counts") {
    CHECK(subset_count(5, 2) == 10);
    CHECK(subset_count(12, 3) == 220);
    CHECK(subset_count(3, 5) == 0);
    CHECK(subset_count(10, 0) == 1);
    CHECK(subset_count(100000, 50) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("exact discrete optimum beats every enumerated subset") {
    Rng rng(1);
    for (int rep = 0; rep < 60; ++rep) {
        const auto space = random_plane(6 + rng.below(7), rng);
        const Sample s = random_sample(space, 5 + rng.below(15), rng);
        const std::size_t k = 1 + rng.below(3);
        const auto pts = distinct(s);
        const Clustering best = exact_discrete_opt(s, k);
        const double best_risk = empirical_risk(s, best);
        CHECK(best.size() == std::min(k, pts.size()));
        double oracle_min = std::numeric_limits<double>::infinity();
        for (const auto& t : oracle::subsets(pts, std::min(k, pts.size()))) {
            REQUIRE(best_risk <= empirical_risk(s, t));
            oracle_min = std::min(oracle_min, oracle::sample_risk(s, t));
        }
        CHECK(best_risk == doctest::Approx(oracle_min).epsilon(1e-12));
    }
}

TEST_CASE("exact optimum breaks ties toward the smallest tuple") {
    const auto line = euclidean_space({{0}, {1}, {2}, {3}}, false);
    // Centers 1 and 2 both give risk 1 on (0,1,2,3).
    const Clustering best = exact_discrete_opt(Sample(line, {0, 1, 2, 3}), 1);
    CHECK(best.centers()[0] == 1);
}

TEST_CASE("exact continuous optimum") {
    const auto star = star_instance(7);
    CHECK(exact_continuous_opt(star.p, 1).centers()[0] == 0);
    const auto hub = two_hub_instance(40, 0.05);
    CHECK(exact_continuous_opt(hub.p, 1).centers()[0] == 0);
}

TEST_CASE("budget guard") {
    Rng rng(2);
    const auto space = random_plane(60, rng);
    std::vector<PointId> all(60);
    for (std::size_t i = 0; i < 60; ++i) all[i] = i;
    const Sample s(space, all);
    CHECK_THROWS_WITH(exact_discrete_opt(s, 5, 1000), doctest::Contains("pam"));
    CHECK_NOTHROW(exact_discrete_opt(s, 2, 10000));
}

TEST_CASE("PAM is never better than exact and never worsens") {
    Rng rng(3);
    for (int rep = 0; rep < 80; ++rep) {
        const auto space = random_plane(5 + rng.below(20), rng);
        const Sample s = random_sample(space, 10 + rng.below(40), rng);
        const std::size_t k = 1 + rng.below(4);
        const PamResult pam = pam_kmedoids_traced(s, k);
        const double exact = empirical_risk(s, exact_discrete_opt(s, k));
        REQUIRE(empirical_risk(s, pam.medoids) >= exact);
        REQUIRE(pam.risk_trace.back() == empirical_risk(s, pam.medoids));
        for (std::size_t i = 1; i < pam.risk_trace.size(); ++i) REQUIRE(pam.risk_trace[i] < pam.risk_trace[i - 1]);
        REQUIRE(pam.swaps + 1 == pam.risk_trace.size());
        for (PointId c : pam.medoids.centers()) REQUIRE(std::count(s.items().begin(), s.items().end(), c) > 0);
    }
}

TEST_CASE("PAM finds separated clusters") {
    std::vector<std::vector<double>> rows;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 5; ++i) rows.push_back({10.0 * c + 0.1 * i, 0.0});
    const auto space = euclidean_space(rows, false);
    std::vector<PointId> all(15);
    for (std::size_t i = 0; i < 15; ++i) all[i] = i;
    const Sample s(space, all);
    const auto medoids = pam_kmedoids(s, 3);
    CHECK(empirical_risk(s, medoids) == doctest::Approx(empirical_risk(s, exact_discrete_opt(s, 3))));
    CHECK(pam_kmedoids(s, 3, 0) == pam_kmedoids(s, 3, 99));
}

TEST_CASE("fewer distinct points than k") {
    const auto line = euclidean_space({{0}, {1}, {2}}, false);
    const Sample s(line, {1, 1, 2});
    CHECK(exact_discrete_opt(s, 3).size() == 2);
    CHECK(pam_kmedoids(s, 3).size() == 2);
    CHECK_THROWS_AS(exact_discrete_opt(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(pam_kmedoids(s, 0), std::invalid_argument);
}

TEST_CASE("solver registry and declared factors") {
    CHECK(make_solver("exact").beta == std::optional<double>(1.0));
    CHECK_FALSE(make_solver("pam").beta.has_value());
    CHECK(continuous_beta(make_solver("exact")) == std::optional<double>(2.0));
    CHECK_FALSE(continuous_beta(make_solver("pam")).has_value());
    CHECK_THROWS_AS(make_solver("birch"), std::invalid_argument);
}

TEST_CASE("beta audit") {
    Rng rng(4);
    std::vector<AuditInstance> instances;
    for (int rep = 0; rep < 20; ++rep) {
        const auto space = random_plane(10, rng);
        instances.push_back({random_sample(space, 20, rng), 1 + rng.below(3)});
    }
    const auto exact = audit_beta(exact_solver(), instances);
    CHECK(exact.max_ratio == 1.0);
    CHECK(exact.exceeding.empty());
    const auto pam = audit_beta(pam_solver(), instances);
    CHECK(pam.ratios.size() == 20);
    for (double r : pam.ratios) CHECK(r >= 1.0);
}

TEST_CASE("ratio conventions") {
    CHECK(risk_ratio(0.0, 0.0) == 1.0);
    CHECK(std::isinf(risk_ratio(1.0, 0.0)));
    CHECK(risk_ratio(3.0, 2.0) == 1.5);
}
