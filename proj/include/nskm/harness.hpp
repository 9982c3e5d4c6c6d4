#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nskm/distribution.hpp"

namespace nskm {

struct ExperimentConfig {
    std::string algorithm = "skm";  // skm | skm2 | offline
    std::string solver = "pam";     // exact | pam
    std::size_t k = 2;
    std::size_t m = 1000;
    double delta = 0.1;
    double q_constant = 9.0;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    std::string dataset;  // CSV path, graph instance path, star:M1 or two-hub:M1:Q
    double holdout_fraction = 0.3;
    bool normalize = false;
    std::size_t jobs = 1;
    bool trace = false;
    bool timing = false;  // fill runtime_ms; off keeps reports byte-reproducible
    std::string output;
    std::string format = "csv";  // csv | json
};

// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

// A dataset is either a point cloud split per trial into stream pool and
// holdout, or a known distribution used both as the stream source and as
// the exact evaluation distribution.
struct Dataset {
    MetricPtr space;
    std::optional<FiniteDistribution> distribution;
    std::string description;
};

Dataset load_experiment_dataset(const std::string& spec, bool normalize);

struct TrialSplit {
    std::vector<PointId> pool;
    std::vector<PointId> holdout;
};

// Random split of 0..n-1 with floor(fraction * n) (at least 1) holdout points.
TrialSplit split_indices(std::size_t n, double holdout_fraction, Rng& rng);

struct TrialRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string algorithm;
    std::size_t k = 0;
    std::size_t m = 0;
    double delta = 0.0;
    double q_used = 0.0;
    std::size_t centers_selected = 0;
    std::size_t shortfall = 0;
    double risk_holdout = 0.0;
    double offline_risk_holdout = 0.0;
    double ratio = 0.0;
    double bound_value = 0.0;
    double runtime_ms = 0.0;
    std::string status = "ok";  // "ok" or "error: <message>"

    bool ok() const { return status == "ok"; }
};

struct AggregateRow {
    std::size_t ok_trials = 0;
    std::size_t failed_trials = 0;
    double ratio_mean = 0.0;
    double ratio_std = 0.0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<TrialRow> rows;  // sorted by trial
    AggregateRow aggregate;
    nlohmann::json traces = nlohmann::json::array();

    bool all_failed() const { return aggregate.ok_trials == 0; }
};

RunReport run_experiment(const ExperimentConfig& cfg);
RunReport run_experiment(const ExperimentConfig& cfg, const Dataset& dataset);

// Mean and sample standard deviation of the ratio over successful rows.
AggregateRow aggregate_rows(const std::vector<TrialRow>& rows);

extern const std::vector<std::string> kReportColumns;

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double value);

std::string format_report(const RunReport& report, const std::string& format);
void emit_report(const RunReport& report, const std::string& format, const std::filesystem::path& path);

}  // namespace nskm
