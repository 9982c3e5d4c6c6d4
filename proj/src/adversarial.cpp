#include "nskm/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nskm/offline.hpp"
#include "nskm/parallel.hpp"
#include "nskm/skm.hpp"

namespace nskm {

namespace {

constexpr double kTightnessDelta = 0.1;

AdversarialInstance make_instance(std::string name, WeightedGraph graph, std::vector<double> mass) {
    MetricPtr space = shortest_path_metric(graph);
    FiniteDistribution p(space, std::move(mass));
    return AdversarialInstance{std::move(name), std::move(graph), std::move(space), std::move(p), {}, 0, 0.0, 0.0};
}

}  // namespace

AdversarialInstance star_instance(std::size_t m1) {
    if (m1 < 2) throw std::invalid_argument("star instance needs m1 >= 2");
    WeightedGraph graph{m1, {}};
    for (std::size_t i = 1; i < m1; ++i) graph.edges.push_back({0, i, 1.0});
    const double mass = 1.0 / static_cast<double>(m1);
    AdversarialInstance inst = make_instance("star", std::move(graph), std::vector<double>(m1, mass));
    inst.roles.o = 0;
    for (std::size_t i = 1; i < m1; ++i) inst.roles.u.push_back(i);
    inst.m1 = m1;
    return inst;
}

AdversarialInstance two_hub_instance(std::size_t m1, double q) {
    if (m1 < 4) throw std::invalid_argument("two-hub instance needs m1 >= 4");
    const double m = static_cast<double>(m1);
    if (!(q > 0.0 && q < (1.0 - 1.0 / m) / 2.0)) {
        std::ostringstream msg;
        msg << "P not well defined: q = " << q << " must lie in (0, " << (1.0 - 1.0 / m) / 2.0 << ")";
        throw std::invalid_argument(msg.str());
    }
    const double eta = 1.0 / (4.0 * m);
    const std::size_t n = 2 * m1 + 2;
    WeightedGraph graph{n, {}};
    graph.edges.push_back({0, 1, 1.0});
    for (std::size_t i = 0; i < m1; ++i) graph.edges.push_back({0, 2 + i, 1.0});
    for (std::size_t i = 0; i < m1; ++i) graph.edges.push_back({1, m1 + 2 + i, 2.0 - eta});

    std::vector<double> mass(n, 0.0);
    mass[1] = 1.0 / m;
    const double u_mass = (1.0 - 2.0 * q - 1.0 / m) / m;
    const double y_mass = 2.0 * q / m;
    for (std::size_t i = 0; i < m1; ++i) {
        mass[2 + i] = u_mass;
        mass[m1 + 2 + i] = y_mass;
    }
    AdversarialInstance inst = make_instance("two-hub", std::move(graph), std::move(mass));
    inst.roles.o = 0;
    inst.roles.v = 1;
    for (std::size_t i = 0; i < m1; ++i) {
        inst.roles.u.push_back(2 + i);
        inst.roles.y.push_back(m1 + 2 + i);
    }
    inst.m1 = m1;
    inst.q = q;
    inst.eta = eta;
    return inst;
}

GraphInstance to_graph_instance(const AdversarialInstance& instance) {
    const auto mass = instance.p.mass();
    return GraphInstance{instance.graph, std::vector<double>(mass.begin(), mass.end())};
}

TwoHubRisks two_hub_closed_form(std::size_t m1, double q) {
    const double m = static_cast<double>(m1);
    const double eta = 1.0 / (4.0 * m);
    const double u_total = 1.0 - 2.0 * q - 1.0 / m;
    TwoHubRisks r;
    r.risk_o = u_total + 1.0 / m + 2.0 * q * (3.0 - eta);
    r.risk_y = u_total * (4.0 - eta) + (2.0 - eta) / m + 2.0 * q * (1.0 - 1.0 / m) * (4.0 - 2.0 * eta);
    r.ratio = r.risk_y / r.risk_o;
    return r;
}

double tightness_q_schedule(std::size_t m1) { return default_q(2 * m1, kTightnessDelta, 9.0); }

Factor2Stats factor2_experiment(std::size_t m1, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    if (trials == 0) throw std::invalid_argument("factor-2 experiment needs at least one trial");
    const AdversarialInstance inst = star_instance(m1);
    const OfflineSolver solver = exact_solver();
    const std::size_t m = 2 * m1;
    SkmOptions options;
    options.q_override = default_q(m, kTightnessDelta, 9.0);
    const double inv_m1 = 1.0 / static_cast<double>(m1);

    Factor2Stats stats;
    stats.m1 = m1;
    stats.trials = trials;
    stats.records.resize(trials);
    parallel_for(trials, jobs, [&](std::size_t t) {
        Factor2Trial& rec = stats.records[t];
        rec.seed = trial_seed(seed, t);
        const Sample stream = sample_stream(inst.p, m, rec.seed);
        const auto phase1 = stream.items().first(m / 2);
        rec.hub_count_phase1 = static_cast<std::size_t>(std::count(phase1.begin(), phase1.end(), PointId{0}));
        const SkmResult run = run_skm(stream, 1, solver, options);
        rec.risk_blackbox = risk(inst.p, run.trace.blackbox_centers);
        rec.predicted = 2.0 * rec.risk_blackbox - inv_m1;
        if (!run.centers.empty()) rec.risk_out = risk(inst.p, run.centers);
        rec.event = rec.hub_count_phase1 == 1 && !run.trace.selections.empty() && run.trace.selections.front().point != 0;
    });
    for (const auto& rec : stats.records) {
        if (!rec.event) continue;
        ++stats.events;
        const double err = std::abs(rec.risk_out - rec.predicted);
        stats.max_abs_error = std::max(stats.max_abs_error, err);
        if (err <= 1e-12) ++stats.equalities;
    }
    stats.event_rate = static_cast<double>(stats.events) / static_cast<double>(trials);
    stats.exact_equality_rate =
        stats.events ? static_cast<double>(stats.equalities) / static_cast<double>(stats.events) : 1.0;
    return stats;
}

TightnessStats tightness_experiment(std::size_t m1, double q, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
    if (trials == 0) throw std::invalid_argument("tightness experiment needs at least one trial");
    const AdversarialInstance inst = two_hub_instance(m1, q);
    const OfflineSolver solver = exact_solver();
    const std::size_t m = 2 * m1;
    SkmOptions options;
    options.q_override = q;

    TightnessStats stats;
    stats.m1 = m1;
    stats.q = q;
    stats.trials = trials;
    stats.opt_risk = risk(inst.p, exact_continuous_opt(inst.p, 1, std::numeric_limits<std::uint64_t>::max()));
    stats.closed_form_ratio = two_hub_closed_form(m1, q).ratio;
    stats.records.resize(trials);
    const PointId first_y = inst.roles.y.front();
    parallel_for(trials, jobs, [&](std::size_t t) {
        TightnessTrial& rec = stats.records[t];
        rec.seed = trial_seed(seed, t);
        const Sample stream = sample_stream(inst.p, m, rec.seed);
        const SkmResult run = run_skm(stream, 1, solver, options);
        rec.selected = !run.centers.empty();
        rec.ratio = std::numeric_limits<double>::quiet_NaN();
        if (!rec.selected) return;
        rec.in_y = run.centers.centers().front() >= first_y;
        rec.risk_out = risk(inst.p, run.centers);
        rec.ratio = risk_ratio(rec.risk_out, stats.opt_risk);
    });
    std::vector<double> conditional;
    std::vector<double> all;
    for (const auto& rec : stats.records) {
        if (!rec.selected) {
            ++stats.shortfalls;
            continue;
        }
        all.push_back(rec.ratio);
        if (rec.in_y) conditional.push_back(rec.ratio);
    }
    stats.in_y = conditional.size();
    stats.fraction_in_y = static_cast<double>(stats.in_y) / static_cast<double>(trials);
    if (!conditional.empty()) stats.conditional_ratio_median = quantile(conditional, 0.5);
    if (!all.empty())
        for (double level : {0.1, 0.25, 0.5, 0.75, 0.9}) stats.unconditional_ratio_quantiles.push_back(quantile(all, level));
    return stats;
}

double quantile(std::vector<double> values, double level) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty set");
    if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = level * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace nskm
