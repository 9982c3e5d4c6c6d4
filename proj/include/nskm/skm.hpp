#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nskm/distribution.hpp"
#include "nskm/offline.hpp"

namespace nskm {

// Ball around a phase-1 center whose radius is the distance to the center's
// q-quantile point within the phase-1 sample.
struct QBall {
    PointId center = 0;
    std::size_t center_position = 0;
    double q = 0.0;
    double radius = 0.0;
    PointId quantile_point = 0;
    std::size_t quantile_position = 0;

    bool contains(const MetricSpace& space, PointId p) const { return space.distance(center, p) <= radius; }
};

// Fraction of the sample items other than positions x and y that lie within
// distance dist(S[x], S[y]) of S[x]. Needs |S| >= 3 and x != y.
double bhat(const Sample& s, std::size_t x, std::size_t y);

// The closest position y with bhat(s, x, y) >= q (lowest position on ties)
// and the ball it induces around S[x].
QBall quantile_point(const Sample& s, std::size_t x, double q);

// constant * ln(2 m^2 / delta) / m. Throws when the value is >= 1.
double default_q(std::size_t m, double delta, double constant = 43.0);

struct SkmOptions {
    double delta = 0.1;
    double q_constant = 43.0;
    std::optional<double> q_override;
};

struct SkmSelection {
    std::size_t position = 0;
    PointId point = 0;
    std::size_t qball = 0;
};

struct SkmTrace {
    double q_used = 0.0;
    std::size_t m = 0;
    std::size_t phase1_size = 0;
    Clustering blackbox_centers;
    std::vector<QBall> qballs;
    std::vector<SkmSelection> selections;
    std::size_t shortfall = 0;
    std::vector<std::string> warnings;
};

struct SkmResult {
    Clustering centers;
    SkmTrace trace;
};

// Two-phase selection: the solver clusters the first floor(m/2) items, then
// each later item is taken if it falls in the lowest-index qball that has not
// been filled yet. Items whose point is already a center are skipped.
// Requires m >= max(2k, 24).
SkmResult run_skm(const Sample& stream, std::size_t k, const OfflineSolver& solver, const SkmOptions& options = {});

struct RiskBound {
    double coef = 0.0;
    double additive = 0.0;

    double at(double opt_risk) const { return coef * opt_risk + additive; }
};

// Guarantee of run_skm against risk(P, OPT) for a solver with factor beta on
// the whole space; gamma in (0, 1/2); additive terms scale with D.
RiskBound skm_risk_bound(std::size_t m, std::size_t k, double delta, double beta, double gamma, double D);

}  // namespace nskm
