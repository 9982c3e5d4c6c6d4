#include "nskm/skm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nskm {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("gamma must lie in (0, 1/2)");
}

}  // namespace

double bhat(const Sample& s, std::size_t x, std::size_t y) {
    const std::size_t n = s.size();
    if (n < 3) throw std::invalid_argument("bhat needs a sample of at least 3 items");
    if (x >= n || y >= n) throw std::out_of_range("bhat position outside the sample");
    if (x == y) throw std::invalid_argument("bhat needs two different positions");
    const MetricSpace& space = s.space();
    const double radius = space.distance(s[x], s[y]);
    std::size_t inside = 0;
    for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        if (space.distance(s[x], s[z]) <= radius) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(n - 2);
}

QBall quantile_point(const Sample& s, std::size_t x, double q) {
    const std::size_t n = s.size();
    if (n < 3) throw std::invalid_argument("quantile_point needs a sample of at least 3 items");
    if (x >= n) throw std::out_of_range("quantile_point position outside the sample");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");

    std::vector<double> dist(n);
    s.space().distances_from(s[x], s.items(), dist);
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (std::size_t z = 0; z < n; ++z)
        if (z != x) order.push_back(z);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    // Every item in a group of equal distance has the same bhat: the number of
    // other items at distance <= d, excluding itself.
    const double denom = static_cast<double>(n - 2);
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin;
        while (end < order.size() && dist[order[end]] == dist[order[begin]]) ++end;
        const double value = static_cast<double>(end - 1) / denom;
        if (value >= q) {
            const std::size_t y = order[begin];
            return QBall{s[x], x, q, dist[y], s[y], y};
        }
        begin = end;
    }
    throw std::invalid_argument("q too large for sample");
}

double default_q(std::size_t m, double delta, double constant) {
    if (m < 2) throw std::invalid_argument("stream length must be at least 2");
    check_delta(delta);
    if (!(constant > 0.0)) throw std::invalid_argument("q constant must be positive");
    const double md = static_cast<double>(m);
    const double q = constant * std::log(2.0 * md * md / delta) / md;
    if (q >= 1.0) {
        std::ostringstream msg;
        msg << "stream too short for this (delta, constant): q = " << q << " >= 1 at m = " << m;
        throw std::invalid_argument(msg.str());
    }
    return q;
}

SkmResult run_skm(const Sample& stream, std::size_t k, const OfflineSolver& solver, const SkmOptions& options) {
    const std::size_t m = stream.size();
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (m < std::max<std::size_t>(2 * k, 24)) {
        std::ostringstream msg;
        msg << "stream of length " << m << " is too short: need m >= max(2k, 24) = " << std::max<std::size_t>(2 * k, 24);
        throw std::invalid_argument(msg.str());
    }
    check_delta(options.delta);

    SkmResult result;
    SkmTrace& trace = result.trace;
    trace.m = m;
    if (options.q_override) {
        if (!(*options.q_override > 0.0 && *options.q_override < 1.0))
            throw std::invalid_argument("q override must lie in (0, 1)");
        trace.q_used = *options.q_override;
    } else {
        trace.q_used = default_q(m, options.delta, options.q_constant);
    }
    if (trace.q_used > 0.5) {
        std::ostringstream msg;
        msg << "q = " << trace.q_used << " exceeds 1/2; capture guarantees are weak at this stream length";
        trace.warnings.push_back(msg.str());
    }

    const std::size_t half = m / 2;
    trace.phase1_size = half;
    const Sample phase1 = stream.slice(0, half);
    trace.blackbox_centers = solver.solve(phase1, k);
    if (trace.blackbox_centers.empty()) throw std::runtime_error("offline solver returned no centers");

    for (PointId c : trace.blackbox_centers.centers()) {
        const auto items = phase1.items();
        const auto it = std::find(items.begin(), items.end(), c);
        if (it == items.end()) throw std::runtime_error("offline solver returned a center outside the phase-1 sample");
        const auto position = static_cast<std::size_t>(it - items.begin());
        trace.qballs.push_back(quantile_point(phase1, position, trace.q_used));
    }

    const MetricSpace& space = stream.space();
    std::vector<char> filled(trace.qballs.size(), 0);
    std::size_t open = trace.qballs.size();
    for (std::size_t j = half; j < m && open > 0; ++j) {
        const PointId p = stream[j];
        if (result.centers.contains(p)) continue;
        for (std::size_t i = 0; i < trace.qballs.size(); ++i) {
            if (filled[i] || !trace.qballs[i].contains(space, p)) continue;
            filled[i] = 1;
            --open;
            result.centers.add(p, j);
            trace.selections.push_back({j, p, i});
            break;
        }
    }
    trace.shortfall = open;
    return result;
}

RiskBound skm_risk_bound(std::size_t m, std::size_t k, double delta, double beta, double gamma, double D) {
    check_gamma(gamma);
    check_delta(delta);
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (m < std::max<std::size_t>(2 * k, 24)) throw std::invalid_argument("bound needs m >= max(2k, 24)");
    if (!(beta >= 1.0)) throw std::invalid_argument("beta must be at least 1");
    const double md = static_cast<double>(m);
    const double kd = static_cast<double>(k);
    const double coef = (2.0 + 2.0 * gamma) * beta;
    const double deviation = std::sqrt((kd * std::log(md / 2.0) + std::log(4.0 / delta)) / md);
    const double capture = 44.0 * kd * std::log(2.0 * md * md / delta) / (gamma * md);
    return RiskBound{coef, D * ((coef + 1.0) * deviation + capture)};
}

}  // namespace nskm
