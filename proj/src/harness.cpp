#include "nskm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nskm/adversarial.hpp"
#include "nskm/io.hpp"
#include "nskm/offline.hpp"
#include "nskm/parallel.hpp"
#include "nskm/serialize.hpp"
#include "nskm/skm.hpp"
#include "nskm/skm2.hpp"

namespace nskm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundGamma = 0.1;

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("invalid " + what + " '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end - begin));
        if (end == std::string_view::npos) return parts;
        begin = end + 1;
    }
}

Dataset from_instance(const AdversarialInstance& inst, std::string description) {
    return Dataset{inst.space, inst.p, std::move(description)};
}

double bound_value(const ExperimentConfig& cfg, const OfflineSolver& solver, double D) {
    try {
        if (cfg.algorithm == "skm") {
            const auto beta = continuous_beta(solver);
            if (!beta) return kNaN;
            return skm_risk_bound(cfg.m, cfg.k, cfg.delta, *beta, kBoundGamma, D).additive;
        }
        if (cfg.algorithm == "skm2") return skm2_risk_bound(cfg.m, cfg.k, cfg.delta, kBoundGamma, D).additive;
    } catch (const std::invalid_argument&) {
    }
    return kNaN;
}

struct TrialOutcome {
    TrialRow row;
    nlohmann::json trace;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const Dataset& data, const OfflineSolver& solver, std::size_t t) {
    TrialOutcome out;
    TrialRow& row = out.row;
    row.trial = t;
    row.seed = trial_seed(cfg.seed, t);
    row.algorithm = cfg.algorithm;
    row.k = cfg.k;
    row.m = cfg.m;
    row.delta = cfg.delta;
    row.q_used = kNaN;
    row.risk_holdout = kNaN;
    row.offline_risk_holdout = kNaN;
    row.ratio = kNaN;
    row.bound_value = bound_value(cfg, solver, data.space->diameter_bound());
    out.trace = {{"trial", t}};
    try {
        Rng rng(row.seed);
        std::optional<FiniteDistribution> pool;
        std::optional<FiniteDistribution> holdout;
        if (data.distribution) {
            pool = *data.distribution;
            holdout = *data.distribution;
        } else {
            const TrialSplit parts = split_indices(data.space->size(), cfg.holdout_fraction, rng);
            pool = FiniteDistribution::uniform_over(data.space, parts.pool);
            holdout = FiniteDistribution::uniform_over(data.space, parts.holdout);
        }
        const Sample stream = sample_stream(*pool, cfg.m, rng);

        const auto start = std::chrono::steady_clock::now();
        Clustering centers;
        if (cfg.algorithm == "skm") {
            SkmOptions options;
            options.delta = cfg.delta;
            options.q_constant = cfg.q_constant;
            SkmResult run = run_skm(stream, cfg.k, solver, options);
            row.q_used = run.trace.q_used;
            row.shortfall = run.trace.shortfall;
            if (cfg.trace) out.trace["trace"] = run.trace;
            centers = std::move(run.centers);
        } else if (cfg.algorithm == "skm2") {
            Skm2Options options;
            options.delta = cfg.delta;
            Skm2Result run = run_skm2(stream, cfg.k, options);
            row.q_used = run.trace.q_used;
            row.shortfall = run.trace.shortfall;
            if (cfg.trace) out.trace["trace"] = run.trace;
            centers = std::move(run.centers);
        } else {
            centers = solver.solve(stream, cfg.k);
            if (cfg.trace) out.trace["trace"] = {{"algorithm", "offline"}, {"centers", centers}};
        }
        if (cfg.timing)
            row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.centers_selected = centers.size();
        if (centers.empty()) throw std::runtime_error("no centers selected");

        const Clustering baseline = solver.solve(stream, cfg.k);
        row.risk_holdout = risk(*holdout, centers);
        row.offline_risk_holdout = risk(*holdout, baseline);
        row.ratio = risk_ratio(row.risk_holdout, row.offline_risk_holdout);
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        out.trace["error"] = e.what();
    }
    return out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return quoted + "\"";
}

nlohmann::json row_json(const TrialRow& r) {
    return nlohmann::json{{"trial", r.trial},
                          {"seed", r.seed},
                          {"algorithm", r.algorithm},
                          {"k", r.k},
                          {"m", r.m},
                          {"delta", json_number(r.delta)},
                          {"q_used", json_number(r.q_used)},
                          {"centers_selected", r.centers_selected},
                          {"shortfall", r.shortfall},
                          {"risk_holdout", json_number(r.risk_holdout)},
                          {"offline_risk_holdout", json_number(r.offline_risk_holdout)},
                          {"ratio", json_number(r.ratio)},
                          {"bound_value", json_number(r.bound_value)},
                          {"runtime_ms", json_number(r.runtime_ms)},
                          {"status", r.status}};
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (cfg.algorithm != "skm" && cfg.algorithm != "skm2" && cfg.algorithm != "offline")
        fail("algo must be skm, skm2 or offline (got '" + cfg.algorithm + "')");
    if (cfg.solver != "exact" && cfg.solver != "pam") fail("solver must be exact or pam (got '" + cfg.solver + "')");
    if (cfg.k == 0) fail("k must be at least 1");
    if (cfg.m == 0) fail("m must be at least 1");
    if (cfg.trials == 0) fail("trials must be at least 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail("delta must lie in (0, 1)");
    if (!(cfg.q_constant > 0.0)) fail("q-const must be positive");
    if (!(cfg.holdout_fraction > 0.05 && cfg.holdout_fraction < 0.95)) fail("holdout-frac must lie in (0.05, 0.95)");
    if (cfg.jobs == 0) fail("jobs must be at least 1");
    if (cfg.format != "csv" && cfg.format != "json") fail("format must be csv or json (got '" + cfg.format + "')");
    if (cfg.dataset.empty()) fail("dataset is required");
}

Dataset load_experiment_dataset(const std::string& spec, bool normalize) {
    const auto parts = split(spec, ':');
    if (parts[0] == "star") {
        if (parts.size() != 2) throw std::invalid_argument("star dataset is written star:M1");
        const auto m1 = parse_number<std::size_t>(parts[1], "star m1");
        return from_instance(star_instance(m1), "star instance, m1 = " + std::to_string(m1));
    }
    if (parts[0] == "two-hub") {
        if (parts.size() != 3) throw std::invalid_argument("two-hub dataset is written two-hub:M1:Q");
        const auto m1 = parse_number<std::size_t>(parts[1], "two-hub m1");
        const auto q = parse_number<double>(parts[2], "two-hub q");
        return from_instance(two_hub_instance(m1, q), "two-hub instance, m1 = " + std::to_string(m1));
    }
    const std::filesystem::path path(spec);
    if (!std::filesystem::exists(path)) throw std::invalid_argument("dataset not found: " + spec);
    if (looks_like_graph_instance(path)) {
        GraphInstance g = load_graph_instance(path);
        MetricPtr space = shortest_path_metric(g.graph);
        FiniteDistribution p(space, std::move(g.probabilities));
        return Dataset{space, std::move(p), "graph instance with " + std::to_string(g.graph.nodes) + " nodes"};
    }
    const auto rows = load_dataset(path);
    std::ostringstream desc;
    desc << rows.size() << " points of dimension " << rows.front().size();
    return Dataset{euclidean_space(rows, normalize), std::nullopt, desc.str()};
}

TrialSplit split_indices(std::size_t n, double holdout_fraction, Rng& rng) {
    std::size_t h = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(n)));
    h = std::max<std::size_t>(h, 1);
    if (h >= n) throw std::invalid_argument("dataset too small to split into stream pool and holdout");
    std::vector<PointId> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    TrialSplit split;
    split.holdout.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(h));
    split.pool.assign(perm.begin() + static_cast<std::ptrdiff_t>(h), perm.end());
    std::sort(split.holdout.begin(), split.holdout.end());
    std::sort(split.pool.begin(), split.pool.end());
    return split;
}

AggregateRow aggregate_rows(const std::vector<TrialRow>& rows) {
    AggregateRow agg;
    double sum = 0.0;
    for (const auto& r : rows) {
        if (!r.ok()) {
            ++agg.failed_trials;
            continue;
        }
        ++agg.ok_trials;
        sum += r.ratio;
    }
    if (agg.ok_trials == 0) {
        agg.ratio_mean = kNaN;
        agg.ratio_std = kNaN;
        return agg;
    }
    agg.ratio_mean = sum / static_cast<double>(agg.ok_trials);
    double sq = 0.0;
    for (const auto& r : rows)
        if (r.ok()) sq += (r.ratio - agg.ratio_mean) * (r.ratio - agg.ratio_mean);
    agg.ratio_std = agg.ok_trials > 1 ? std::sqrt(sq / static_cast<double>(agg.ok_trials - 1)) : 0.0;
    return agg;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    return run_experiment(cfg, load_experiment_dataset(cfg.dataset, cfg.normalize));
}

RunReport run_experiment(const ExperimentConfig& cfg, const Dataset& dataset) {
    validate(cfg);
    const OfflineSolver solver = make_solver(cfg.solver);
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) { outcomes[t] = run_trial(cfg, dataset, solver, t); });
    RunReport report;
    report.config = cfg;
    for (auto& o : outcomes) {
        report.rows.push_back(std::move(o.row));
        report.traces.push_back(std::move(o.trace));
    }
    report.aggregate = aggregate_rows(report.rows);
    return report;
}

const std::vector<std::string> kReportColumns = {
    "trial", "seed", "algorithm", "k", "m", "delta", "q_used", "centers_selected", "shortfall", "risk_holdout",
    "offline_risk_holdout", "ratio", "bound_value", "runtime_ms", "ratio_std", "status"};

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string format_report(const RunReport& report, const std::string& format) {
    if (format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : report.rows) rows.push_back(row_json(r));
        const auto& a = report.aggregate;
        nlohmann::json doc{{"rows", std::move(rows)},
                           {"aggregate",
                            {{"ok_trials", a.ok_trials},
                             {"failed_trials", a.failed_trials},
                             {"ratio_mean", json_number(a.ratio_mean)},
                             {"ratio_std", json_number(a.ratio_std)}}}};
        return doc.dump(2) + "\n";
    }
    if (format != "csv") throw std::invalid_argument("format must be csv or json");
    std::string out;
    for (std::size_t i = 0; i < kReportColumns.size(); ++i) out += (i ? "," : "") + kReportColumns[i];
    out += '\n';
    for (const auto& r : report.rows) {
        const std::vector<std::string> fields = {std::to_string(r.trial),
                                                 std::to_string(r.seed),
                                                 r.algorithm,
                                                 std::to_string(r.k),
                                                 std::to_string(r.m),
                                                 format_number(r.delta),
                                                 format_number(r.q_used),
                                                 std::to_string(r.centers_selected),
                                                 std::to_string(r.shortfall),
                                                 format_number(r.risk_holdout),
                                                 format_number(r.offline_risk_holdout),
                                                 format_number(r.ratio),
                                                 format_number(r.bound_value),
                                                 format_number(r.runtime_ms),
                                                 "",
                                                 csv_field(r.status)};
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
        out += '\n';
    }
    const auto& cfg = report.config;
    const auto& a = report.aggregate;
    out += "aggregate,," + cfg.algorithm + "," + std::to_string(cfg.k) + "," + std::to_string(cfg.m) + "," +
           format_number(cfg.delta) + ",,,,,," + format_number(a.ratio_mean) + ",,," + format_number(a.ratio_std) +
           ",ok=" + std::to_string(a.ok_trials) + " failed=" + std::to_string(a.failed_trials) + "\n";
    return out;
}

void emit_report(const RunReport& report, const std::string& format, const std::filesystem::path& path) {
    const std::string text = format_report(report, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report to " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed while writing report to " + path.string());
}

}  // namespace nskm
