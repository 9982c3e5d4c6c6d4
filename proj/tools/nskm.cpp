#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "nskm/adversarial.hpp"
#include "nskm/concentration.hpp"
#include "nskm/harness.hpp"
#include "nskm/skm.hpp"
#include "nskm/skm2.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kAllTrialsFailed = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed while writing " + path);
}

int run_command(const nskm::ExperimentConfig& cfg) {
    nskm::validate(cfg);
    if (cfg.trace && cfg.output.empty()) throw std::invalid_argument("--trace needs --output");
    const nskm::Dataset data = nskm::load_experiment_dataset(cfg.dataset, cfg.normalize);
    std::cerr << "dataset: " << data.description << "\n";
    const nskm::RunReport report = nskm::run_experiment(cfg, data);
    if (cfg.output.empty())
        std::cout << nskm::format_report(report, cfg.format);
    else
        nskm::emit_report(report, cfg.format, cfg.output);
    if (cfg.trace) write_text(cfg.output + ".trace.json", report.traces.dump(2) + "\n");
    if (report.all_failed()) {
        std::cerr << "all " << report.rows.size() << " trials failed; first error: " << report.rows.front().status
                  << "\n";
        return kAllTrialsFailed;
    }
    return 0;
}

struct BoundArgs {
    std::string which;
    std::size_t m = 1000;
    std::size_t k = 2;
    std::size_t n = 100;
    double delta = 0.1;
    double beta = 2.0;
    double gamma = 0.1;
    double diameter = 1.0;
};

int bounds_command(const BoundArgs& a) {
    std::ostringstream out;
    out.precision(17);
    if (a.which == "skm") {
        const auto b = nskm::skm_risk_bound(a.m, a.k, a.delta, a.beta, a.gamma, a.diameter);
        out << "coef=" << b.coef << "\nadditive=" << b.additive << "\n";
    } else if (a.which == "skm2") {
        const auto b = nskm::skm2_risk_bound(a.m, a.k, a.delta, a.gamma, a.diameter);
        out << "coef=" << b.coef << "\nadditive=" << b.additive << "\nq=" << nskm::default_q_skm2(a.m, a.k, a.delta)
            << "\n";
    } else if (a.which == "deviation") {
        out << "deviation=" << nskm::uniform_risk_deviation(a.m, a.k, a.delta, a.diameter) << "\n";
    } else {
        out << "threshold=" << nskm::emp_bernstein_threshold(a.n, a.delta) << "\n";
    }
    std::cout << out.str();
    return 0;
}

struct AdversarialArgs {
    std::size_t m1 = 100;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::optional<double> q;
    std::string output;
};

int star_command(const AdversarialArgs& a) {
    const auto s = nskm::factor2_experiment(a.m1, a.trials, a.seed, a.jobs);
    using nskm::format_number;
    std::string text = "m1,trials,events,event_rate,equalities,exact_equality_rate,max_abs_error\n";
    text += std::to_string(s.m1) + "," + std::to_string(s.trials) + "," + std::to_string(s.events) + "," +
            format_number(s.event_rate) + "," + std::to_string(s.equalities) + "," +
            format_number(s.exact_equality_rate) + "," + format_number(s.max_abs_error) + "\n";
    write_text(a.output, text);
    return 0;
}

int two_hub_command(const AdversarialArgs& a) {
    const double q = a.q ? *a.q : nskm::tightness_q_schedule(a.m1);
    const auto s = nskm::tightness_experiment(a.m1, q, a.trials, a.seed, a.jobs);
    using nskm::format_number;
    std::string text =
        "m1,q,trials,opt_risk,in_y,fraction_in_y,shortfalls,conditional_ratio_median,ratio_q10,ratio_q25,ratio_q50,"
        "ratio_q75,ratio_q90,closed_form_ratio\n";
    text += std::to_string(s.m1) + "," + format_number(s.q) + "," + std::to_string(s.trials) + "," +
            format_number(s.opt_risk) + "," + std::to_string(s.in_y) + "," + format_number(s.fraction_in_y) + "," +
            std::to_string(s.shortfalls) + "," +
            (s.conditional_ratio_median ? format_number(*s.conditional_ratio_median) : std::string("nan"));
    for (std::size_t i = 0; i < 5; ++i)
        text += "," + (i < s.unconditional_ratio_quantiles.size() ? format_number(s.unconditional_ratio_quantiles[i])
                                                                   : std::string("nan"));
    text += "," + format_number(s.closed_form_ratio) + "\n";
    write_text(a.output, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"No-substitution sequential k-median clustering"};
    app.require_subcommand(1);

    nskm::ExperimentConfig cfg;
    auto* run = app.add_subcommand("run", "Run a seeded experiment and write a per-trial report");
    run->add_option("--algo", cfg.algorithm, "skm, skm2 or offline")
        ->check(CLI::IsMember({"skm", "skm2", "offline"}))
        ->capture_default_str();
    run->add_option("--solver", cfg.solver, "Offline solver: exact or pam")
        ->check(CLI::IsMember({"exact", "pam"}))
        ->capture_default_str();
    run->add_option("--k", cfg.k, "Number of centers")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--m", cfg.m, "Stream length")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--delta", cfg.delta, "Confidence parameter")->capture_default_str();
    run->add_option("--q-const", cfg.q_constant, "Constant in the SKM quantile level")->capture_default_str();
    run->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--seed", cfg.seed, "Base seed; trial t uses seed + t")->capture_default_str();
    run->add_option("--dataset", cfg.dataset, "CSV file, graph instance file, star:M1 or two-hub:M1:Q")->required();
    run->add_option("--holdout-frac", cfg.holdout_fraction, "Fraction of points held out")->capture_default_str();
    run->add_flag("--normalize", cfg.normalize, "Min-max scale CSV features");
    run->add_option("--jobs", cfg.jobs, "Parallel trials")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_flag("--trace", cfg.trace, "Also write <output>.trace.json");
    run->add_flag("--timing", cfg.timing, "Record runtime_ms (output is then not reproducible)");
    run->add_option("--output", cfg.output, "Report path (default: stdout)");
    run->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    BoundArgs bound;
    auto* bounds = app.add_subcommand("bounds", "Print a bound calculator's value as name=value lines");
    bounds->add_option("--which", bound.which, "skm, skm2, deviation or emp-bernstein")
        ->required()
        ->check(CLI::IsMember({"skm", "skm2", "deviation", "emp-bernstein"}));
    bounds->add_option("--m", bound.m, "Stream length")->capture_default_str();
    bounds->add_option("--k", bound.k, "Number of centers")->capture_default_str();
    bounds->add_option("--n", bound.n, "Sample size (emp-bernstein)")->capture_default_str();
    bounds->add_option("--delta", bound.delta, "Confidence parameter")->capture_default_str();
    bounds->add_option("--beta", bound.beta, "Solver factor on the whole space (skm)")->capture_default_str();
    bounds->add_option("--gamma", bound.gamma, "Trade-off parameter in (0, 1/2)")->capture_default_str();
    bounds->add_option("--diameter", bound.diameter, "Diameter bound D")->capture_default_str();

    AdversarialArgs adv;
    auto* adversarial = app.add_subcommand("adversarial", "Lower-bound instance experiments");
    adversarial->require_subcommand(1);
    auto add_common = [&adv](CLI::App* sub) {
        sub->add_option("--m1", adv.m1, "Instance size")->capture_default_str();
        sub->add_option("--trials", adv.trials, "Number of trials")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--seed", adv.seed, "Base seed")->capture_default_str();
        sub->add_option("--jobs", adv.jobs, "Parallel trials")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--output", adv.output, "CSV path (default: stdout)");
    };
    auto* star = adversarial->add_subcommand("star", "Factor-2 experiment on the star graph");
    add_common(star);
    auto* two_hub = adversarial->add_subcommand("two-hub", "Factor-4 tightness experiment on the two-hub graph");
    add_common(two_hub);
    two_hub->add_option("--q", adv.q, "Instance q (default: 9 ln(2m^2/0.1)/m at m = 2 m1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsageError;
    }

    try {
        if (*run) return run_command(cfg);
        if (*bounds) return bounds_command(bound);
        if (*star) return star_command(adv);
        if (*two_hub) return two_hub_command(adv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}
