// Acceptance checks. One PASS/FAIL line per criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "nskm/adversarial.hpp"
#include "nskm/concentration.hpp"
#include "nskm/harness.hpp"
#include "nskm/offline.hpp"
#include "nskm/skm.hpp"
#include "nskm/skm2.hpp"
#include "oracles.hpp"

using namespace nskm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

MetricPtr random_plane(std::size_t n, Rng& rng) {
    std::vector<std::vector<double>> rows(n);
    for (auto& r : rows) r = {rng.uniform(), rng.uniform()};
    return euclidean_space(rows, false);
}

FiniteDistribution random_distribution(const MetricPtr& space, Rng& rng, double zero_rate) {
    std::vector<double> mass(space->size());
    double total = 0.0;
    for (auto& w : mass) total += (w = rng.bernoulli(zero_rate) ? 0.0 : rng.uniform());
    if (total == 0.0) {
        mass[0] = 1.0;
        total = 1.0;
    }
    for (auto& w : mass) w /= total;
    return FiniteDistribution(space, mass);
}

MetricPtr line_space(std::vector<double> xs) {
    std::vector<std::vector<double>> rows;
    for (double x : xs) rows.push_back({x});
    return euclidean_space(rows, false);
}

Outcome offline_soundness() {
    Rng rng(1001);
    std::size_t subset_checks = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 2 + rng.below(11);
        const auto space = random_plane(n, rng);
        std::vector<PointId> items(n + rng.below(2 * n));
        for (auto& x : items) x = rng.below(n);
        const Sample s(space, items);
        std::vector<PointId> distinct(items.begin(), items.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        const std::size_t k = 1 + rng.below(3);
        const double exact = empirical_risk(s, exact_discrete_opt(s, k));
        const double pam = empirical_risk(s, pam_kmedoids(s, k));
        if (pam < exact) return {false, fmt("instance %d: pam %.17g < exact %.17g", inst, pam, exact)};
        for (const auto& sub : oracle::subsets(distinct, std::min(k, distinct.size()))) {
            ++subset_checks;
            const double r = empirical_risk(s, Clustering(sub));
            if (r < exact) return {false, fmt("instance %d: subset risk %.17g < exact %.17g", inst, r, exact)};
        }
    }
    return {true, fmt("200 instances, %zu subsets", subset_checks)};
}

Outcome factor_two() {
    const auto stats = factor2_experiment(100, 2000, 2024);
    const bool pass = stats.event_rate >= 0.15 && stats.equalities == stats.events && stats.max_abs_error <= 1e-12;
    return {pass, fmt("events=%zu rate=%.4f equalities=%zu max_err=%.3g", stats.events, stats.event_rate,
                      stats.equalities, stats.max_abs_error)};
}

Outcome factor_four() {
    const std::size_t m1s[] = {500, 2000, 8000};
    const double thresholds[] = {2.8, 3.3, 3.5};
    bool pass = true;
    double prev = -1.0;
    std::string detail;
    for (int i = 0; i < 3; ++i) {
        const auto stats = tightness_experiment(m1s[i], tightness_q_schedule(m1s[i]), 300, 7000 + i);
        const double med = stats.conditional_ratio_median.value_or(std::nan(""));
        pass = pass && med >= thresholds[i] && med >= prev;
        prev = med;
        detail += fmt("m1=%zu median=%.4f (need %.1f, in_y=%zu) ", m1s[i], med, thresholds[i], stats.in_y);
    }
    const double limit = two_hub_closed_form(1000000, tightness_q_schedule(1000000)).ratio;
    pass = pass && std::abs(limit - 4.0) / 4.0 <= 0.02;
    return {pass, detail + fmt("closed form at 1e6=%.4f", limit)};
}

Outcome capture_rate() {
    const auto space = line_space({0, 10, 20, 30});
    const auto p = FiniteDistribution::uniform(space);
    const std::size_t trials = 500;
    const double delta = 0.2;
    std::size_t short_runs = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto run = run_skm(sample_stream(p, 4000, 40000 + t), 4, exact_solver(), SkmOptions{delta, 43.0, std::nullopt});
        if (run.trace.shortfall > 0) ++short_runs;
    }
    const double rate = static_cast<double>(short_runs) / trials;
    const double budget = delta / 2 + 3.0 * std::sqrt(delta / (2.0 * trials));
    return {rate <= budget, fmt("shortfall rate=%.4f budget=%.4f", rate, budget)};
}

Outcome bound_validity() {
    Rng rng(5005);
    const std::size_t m = 10000;
    const double delta = 0.1, gamma = 0.1;
    const double beta = *continuous_beta(exact_solver());
    std::size_t within = 0;
    const std::size_t trials = 100;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t atoms = 2 + rng.below(19);
        const auto space = random_plane(atoms, rng);
        const auto p = random_distribution(space, rng, 0.0);
        const std::size_t k = 1 + rng.below(3);
        const double opt = risk(p, exact_continuous_opt(p, k));
        const auto run = run_skm(sample_stream(p, m, rng), k, exact_solver(), SkmOptions{delta, 43.0, std::nullopt});
        const auto bound = skm_risk_bound(m, k, delta, beta, gamma, space->diameter_bound());
        if (!run.centers.empty() && risk(p, run.centers) <= bound.at(opt)) ++within;
    }
    const double rate = static_cast<double>(within) / trials;
    return {rate >= 0.99, fmt("within bound %zu/%zu", within, trials)};
}

Outcome skm2_guarantee() {
    const std::size_t m = 10000;
    const double delta = 0.2;
    const FiniteDistribution two(line_space({0, 1}), {0.5, 0.5});
    const FiniteDistribution four(line_space({0, 1, 5, 6}), {0.3, 0.2, 0.25, 0.25});
    const FiniteDistribution* dists[] = {&two, &four};
    std::size_t trials = 0, successes = 0, completed = 0;
    for (int d = 0; d < 2; ++d) {
        for (std::size_t k = 1; k <= 2; ++k) {
            for (std::uint64_t t = 0; t < 50; ++t) {
                ++trials;
                const Sample stream = sample_stream(*dists[d], m, 60000 + 1000 * d + 100 * k + t);
                const auto run = run_skm2(stream, k, Skm2Options{delta, 3, std::nullopt});
                if (run.trace.shortfall == 0 && run.centers.size() == k) ++successes;
                if (run.centers.size() != k) continue;
                ++completed;
                const double r0 = empirical_risk(stream.slice(0, m / 4), run.centers);
                if (!(r0 <= run.trace.r_selected))
                    return {false, fmt("R(S0,T)=%.17g > r=%.17g", r0, run.trace.r_selected)};
            }
        }
    }
    const double rate = static_cast<double>(successes) / trials;
    const double need = 1.0 - delta - monte_carlo_slack(delta, trials);
    return {rate >= need, fmt("completed=%zu/%zu success rate=%.4f need=%.4f", completed, trials, rate, need)};
}

std::vector<std::vector<PointId>> all_tuples(std::size_t n, std::size_t k) {
    std::vector<std::vector<PointId>> out{{}};
    for (std::size_t size = 1; size <= k; ++size) {
        std::vector<PointId> cur(size, 0);
        for (;;) {
            out.push_back(cur);
            std::size_t i = size;
            while (i > 0 && cur[i - 1] == n - 1) --i;
            if (i == 0) break;
            ++cur[i - 1];
            for (std::size_t j = i; j < size; ++j) cur[j] = cur[i - 1];
        }
    }
    return out;
}

Outcome goodness_equivalence() {
    Rng rng(7007);
    std::size_t pairs = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rng.below(9);
        const auto space = random_plane(n, rng);
        const std::size_t k = 1 + rng.below(2);
        const std::size_t m = 16 + rng.below(32);
        std::vector<PointId> items(m);
        for (auto& x : items) x = rng.below(n);
        const Sample stream(space, items);
        const double q_low = 0.05 + 0.2 * rng.uniform();
        const double q_high = q_low + 0.2 * rng.uniform();
        const SubSamples low = split_subsamples(stream, k, q_low);
        const SubSamples high = split_subsamples(stream, k, q_high);
        GoodnessMemo memo_low(low), memo_high(high);
        std::vector<double> grid;
        for (std::size_t g = 0;; ++g) {
            grid.push_back(grid_value(m, space->diameter_bound(), g));
            if (grid.back() >= space->diameter_bound()) break;
        }
        for (const auto& z : all_tuples(n, k)) {
            bool prev = false;
            for (double r : grid) {
                ++pairs;
                const bool lo = memo_low.is_good(z, r);
                const bool hi = memo_high.is_good(z, r);
                if (lo != oracle::good(low, z, r) || hi != oracle::good(high, z, r))
                    return {false, fmt("memo disagrees with recursion at instance %d", rep)};
                if (prev && !lo) return {false, fmt("not monotone in r at instance %d", rep)};
                if (hi && !lo) return {false, fmt("not antitone in q at instance %d", rep)};
                prev = lo;
            }
        }
    }
    return {true, fmt("%zu (Z, r) pairs", pairs)};
}

Outcome inequality_fuzz() {
    Rng rng(8008);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 2 + rng.below(9);
        const auto q = random_distribution(random_plane(n, rng), rng, 0.2);
        const auto report = center_swap_bound_check(q, rng.below(n), rng.below(n));
        if (report.verdict && !*report.verdict)
            return {false, fmt("center swap counterexample lhs=%.17g rhs=%.17g", report.lhs, report.rhs)};
    }
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 2 + rng.below(9);
        const auto q = random_distribution(random_plane(n, rng), rng, 0.2);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 4));
        std::vector<PointId> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = b[i] = i;
        for (std::size_t i = n - 1; i > 0; --i) std::swap(a[i], a[rng.below(i + 1)]);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(b[i], b[rng.below(i + 1)]);
        const double gamma = 0.01 + 0.48 * rng.uniform();
        const auto report = multi_center_swap_check(q, Clustering({a.begin(), a.begin() + k}),
                                                    Clustering({b.begin(), b.begin() + k}), gamma);
        if (!report.verdict || !*report.verdict)
            return {false, fmt("multi-center counterexample lhs=%.17g rhs=%.17g", report.lhs, report.rhs)};
    }
    return {true, "20000 cases"};
}

Outcome concentration_mc() {
    const std::size_t T = 5000;
    std::vector<MonteCarloReport> reports;
    for (double mu : {0.05, 0.3, 0.5}) reports.push_back(verify_emp_bernstein(mu, 200, 0.1, T, 900 + mu * 100));
    for (double mu : {0.2, 0.5}) reports.push_back(verify_bernstein(mu, 200, 0.1, T, 950 + mu * 100));
    const auto six = FiniteDistribution(line_space({0, 0.3, 0.5, 0.6, 0.9, 1.0}), {0.3, 0.1, 0.1, 0.2, 0.1, 0.2});
    reports.push_back(verify_uniform_deviation(six, 2, 200, 0.1, 2000, 990));
    Rng rng(991);
    reports.push_back(verify_uniform_deviation(random_distribution(random_plane(8, rng), rng, 0.0), 3, 300, 0.2, 2000, 992));
    bool pass = true;
    std::string detail;
    for (const auto& r : reports) {
        pass = pass && r.passed;
        detail += fmt("%s=%.4f/%.4f ", r.name.c_str(), r.rate, r.budget);
    }
    return {pass, detail};
}

fs::path write_clusters(std::size_t points, std::uint64_t seed) {
    const auto path = fs::temp_directory_path() / "nskm_acceptance_clusters.csv";
    std::ofstream out(path);
    out << "x,y\n";
    Rng rng(seed);
    const double centers[4][2] = {{0, 0}, {6, 0}, {0, 6}, {6, 6}};
    out.precision(17);
    for (std::size_t i = 0; i < points; ++i) {
        const auto& c = centers[i % 4];
        out << c[0] + rng.normal() << "," << c[1] + rng.normal() << "\n";
    }
    return path;
}

Outcome clusters_ratio() {
    const auto path = write_clusters(4000, 1010);
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "pam";
    cfg.k = 4;
    cfg.trials = 20;
    cfg.seed = 1011;
    cfg.dataset = path.string();
    cfg.m = 4000;
    const auto small = run_experiment(cfg);
    cfg.m = 8000;
    const auto large = run_experiment(cfg);
    const double a = small.aggregate.ratio_mean, b = large.aggregate.ratio_mean;
    const bool pass = small.aggregate.failed_trials == 0 && large.aggregate.failed_trials == 0 && a >= 1.0 && a <= 1.3 &&
                      b <= a;
    return {pass, fmt("mean ratio m=4000: %.4f, m=8000: %.4f", a, b)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome reproducibility() {
    const auto data = write_clusters(800, 1111);
    const auto dir = fs::temp_directory_path() / "nskm_acceptance_repro";
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (const char* jobs : {"1", "1", "8", "8"}) {
        const auto out = dir / ("run" + std::to_string(outputs.size()) + ".csv");
        fs::remove(out);
        const std::string cmd = std::string(NSKM_CLI_PATH) +
                                " run --algo skm --solver pam --k 4 --m 1000 --trials 12 --seed 5 --dataset " +
                                data.string() + " --jobs " + jobs + " --trace --output " + out.string() + " 2>/dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + cmd};
        outputs.push_back(slurp(out) + slurp(out.string() + ".trace.json"));
    }
    const bool same_jobs = outputs[0] == outputs[1] && outputs[2] == outputs[3];
    const bool across = outputs[0] == outputs[2];
    return {same_jobs && across && !outputs[0].empty(),
            fmt("repeat identical: %s, jobs 1 vs 8 identical: %s", same_jobs ? "yes" : "no", across ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"offline oracle soundness", offline_soundness},
        {"factor-2 equality on the star", factor_two},
        {"factor-4 tightness on the two-hub", factor_four},
        {"SKM capture rate", capture_rate},
        {"SKM risk bound validity", bound_validity},
        {"SKM2 definitional guarantee", skm2_guarantee},
        {"goodness oracle equivalence", goodness_equivalence},
        {"swap inequality fuzz", inequality_fuzz},
        {"concentration Monte Carlo", concentration_mc},
        {"four-cluster ratio band and trend", clusters_ratio},
        {"run reproducibility", reproducibility},
    };
    int failures = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!outcome.pass) ++failures;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << index++ << "] " << name << ": " << outcome.detail
                  << " (" << fmt("%.1f", secs) << "s)" << std::endl;
    }
    return failures;
}
