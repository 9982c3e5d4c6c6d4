#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "nskm/adversarial.hpp"
#include "nskm/harness.hpp"

using namespace nskm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& text) {
    const auto path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

std::string clusters_csv(std::size_t per_cluster, std::uint64_t seed) {
    Rng rng(seed);
    std::ostringstream out;
    out << "x,y\n";
    const double centers[4][2] = {{0, 0}, {5, 0}, {0, 5}, {5, 5}};
    for (const auto& c : centers)
        for (std::size_t i = 0; i < per_cluster; ++i)
            out << c[0] + 0.4 * rng.normal() << "," << c[1] + 0.4 * rng.normal() << "\n";
    return out.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.dataset = "star:10";
    CHECK_NOTHROW(validate(cfg));
    auto bad = [&](auto mutate) {
        ExperimentConfig c = cfg;
        mutate(c);
        CHECK_THROWS_AS(validate(c), std::invalid_argument);
    };
    bad([](ExperimentConfig& c) { c.algorithm = "kmeans"; });
    bad([](ExperimentConfig& c) { c.solver = "birch"; });
    bad([](ExperimentConfig& c) { c.trials = 0; });
    bad([](ExperimentConfig& c) { c.k = 0; });
    bad([](ExperimentConfig& c) { c.holdout_fraction = 0.05; });
    bad([](ExperimentConfig& c) { c.holdout_fraction = 0.95; });
    bad([](ExperimentConfig& c) { c.delta = 1.0; });
    bad([](ExperimentConfig& c) { c.format = "xml"; });
    bad([](ExperimentConfig& c) { c.dataset = ""; });
}

TEST_CASE("dataset specs") {
    CHECK(load_experiment_dataset("star:10", false).space->size() == 10);
    const auto hub = load_experiment_dataset("two-hub:50:0.05", false);
    CHECK(hub.space->size() == 102);
    CHECK(hub.distribution.has_value());
    CHECK_THROWS(load_experiment_dataset("star:x", false));
    CHECK_THROWS(load_experiment_dataset("two-hub:50", false));
    CHECK_THROWS(load_experiment_dataset("/nonexistent/data.csv", false));

    const auto csv = temp_file("nskm_harness_small.csv", "x,y\n0,0\n3,4\n1,1\n");
    const auto data = load_experiment_dataset(csv.string(), false);
    CHECK(data.space->size() == 3);
    CHECK_FALSE(data.distribution.has_value());
    CHECK(data.description == "3 points of dimension 2");
    CHECK(load_experiment_dataset(csv.string(), true).space->diameter_bound() == 1.0);

    std::ostringstream graph;
    write_graph_instance(graph, to_graph_instance(star_instance(6)));
    const auto gpath = temp_file("nskm_harness_graph.txt", graph.str());
    const auto g = load_experiment_dataset(gpath.string(), false);
    CHECK(g.space->size() == 6);
    CHECK(g.distribution.has_value());
}

TEST_CASE("split is a disjoint cover") {
    Rng rng(4);
    for (std::size_t n : {2u, 10u, 101u}) {
        const auto split = split_indices(n, 0.3, rng);
        std::set<PointId> all(split.pool.begin(), split.pool.end());
        for (PointId h : split.holdout) CHECK(all.insert(h).second);
        CHECK(all.size() == n);
        CHECK(split.holdout.size() == std::max<std::size_t>(1, static_cast<std::size_t>(0.3 * n)));
    }
    Rng one(1);
    CHECK_THROWS(split_indices(1, 0.3, one));
}

TEST_CASE("point-mass dataset gives ratio one") {
    std::string text;
    for (int i = 0; i < 20; ++i) text += "1.5,2\n";
    const auto path = temp_file("nskm_harness_point.csv", text);
    for (const std::string algo : {"skm", "skm2", "offline"}) {
        ExperimentConfig cfg;
        cfg.algorithm = algo;
        cfg.solver = "exact";
        cfg.k = 1;
        cfg.m = 2000;
        cfg.trials = 2;
        cfg.dataset = path.string();
        const auto report = run_experiment(cfg);
        for (const auto& row : report.rows) {
            CHECK(row.status == "ok");
            CHECK(row.ratio == 1.0);
            CHECK(row.risk_holdout == 0.0);
        }
        CHECK(report.aggregate.ratio_mean == 1.0);
    }
}

TEST_CASE("report format") {
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "exact";
    cfg.k = 1;
    cfg.m = 200;
    cfg.trials = 1;
    cfg.dataset = "star:50";
    const auto report = run_experiment(cfg);
    const auto csv = format_report(report, "csv");
    const auto rows = lines(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] ==
          "trial,seed,algorithm,k,m,delta,q_used,centers_selected,shortfall,risk_holdout,offline_risk_holdout,ratio,"
          "bound_value,runtime_ms,ratio_std,status");
    CHECK(rows[1].rfind("0,0,skm,1,200,0.1,", 0) == 0);
    CHECK(rows[2].rfind("aggregate,,skm,1,200,0.1,", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(format_report(report, "csv") == csv);

    const auto path = fs::temp_directory_path() / "nskm_harness_report.csv";
    emit_report(report, "csv", path);
    std::ifstream in(path, std::ios::binary);
    CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == csv);
    CHECK_THROWS(emit_report(report, "csv", "/nonexistent-dir/report.csv"));
}

TEST_CASE("JSON round trip") {
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "exact";
    cfg.k = 1;
    cfg.m = 300;
    cfg.trials = 3;
    cfg.dataset = "star:40";
    const auto report = run_experiment(cfg);
    const auto doc = nlohmann::json::parse(format_report(report, "json"));
    REQUIRE(doc["rows"].size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& row = report.rows[i];
        CHECK(doc["rows"][i]["trial"].get<std::size_t>() == row.trial);
        CHECK(doc["rows"][i]["ratio"].get<double>() == row.ratio);
        CHECK(doc["rows"][i]["risk_holdout"].get<double>() == row.risk_holdout);
        CHECK(doc["rows"][i]["q_used"].get<double>() == row.q_used);
        CHECK(doc["rows"][i]["status"].get<std::string>() == "ok");
    }
    CHECK(doc["aggregate"]["ratio_mean"].get<double>() == report.aggregate.ratio_mean);
    CHECK(doc["aggregate"]["ok_trials"].get<std::size_t>() == 3);
}

TEST_CASE("ratio column is the quotient of the risk columns") {
    const auto path = temp_file("nskm_harness_clusters.csv", clusters_csv(40, 3));
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "pam";
    cfg.k = 4;
    cfg.m = 600;
    cfg.trials = 4;
    cfg.dataset = path.string();
    const auto report = run_experiment(cfg);
    for (const auto& row : report.rows) {
        REQUIRE(row.ok());
        CHECK(std::abs(row.ratio - row.risk_holdout / row.offline_risk_holdout) <= 1e-12);
        CHECK(std::isnan(row.bound_value));
    }
}

TEST_CASE("holdout points never enter the stream") {
    const auto path = temp_file("nskm_harness_holdout.csv", clusters_csv(15, 8));
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "exact";
    cfg.k = 2;
    cfg.m = 300;
    cfg.trials = 5;
    cfg.trace = true;
    cfg.seed = 77;
    cfg.dataset = path.string();
    const auto report = run_experiment(cfg);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        Rng rng(trial_seed(cfg.seed, t));
        const auto split = split_indices(60, cfg.holdout_fraction, rng);
        const std::set<PointId> holdout(split.holdout.begin(), split.holdout.end());
        const auto& trace = report.traces[t]["trace"];
        for (const auto& c : trace["blackbox_centers"]) CHECK(holdout.count(c["point"].get<PointId>()) == 0);
        for (const auto& s : trace["selections"]) CHECK(holdout.count(s["point"].get<PointId>()) == 0);
    }
}

TEST_CASE("failed trials are tagged rows") {
    ExperimentConfig cfg;
    cfg.algorithm = "skm2";
    cfg.k = 4;
    cfg.m = 100;
    cfg.trials = 2;
    cfg.dataset = "star:10";
    const auto report = run_experiment(cfg);
    CHECK(report.all_failed());
    CHECK(report.rows[0].status.rfind("error: ", 0) == 0);
    CHECK(report.aggregate.failed_trials == 2);
    const auto rows = lines(format_report(report, "csv"));
    CHECK(rows.size() == 4);
    CHECK(rows[3].find("ok=0 failed=2") != std::string::npos);
}

TEST_CASE("reports do not depend on the job count") {
    ExperimentConfig cfg;
    cfg.algorithm = "skm";
    cfg.solver = "exact";
    cfg.k = 1;
    cfg.m = 200;
    cfg.trials = 6;
    cfg.dataset = "two-hub:60:0.1";
    cfg.trace = true;
    const auto a = run_experiment(cfg);
    cfg.jobs = 4;
    const auto b = run_experiment(cfg);
    CHECK(format_report(a, "csv") == format_report(b, "csv"));
    CHECK(format_report(a, "json") == format_report(b, "json"));
    CHECK(a.traces.dump() == b.traces.dump());
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
}
