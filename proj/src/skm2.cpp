#include "nskm/skm2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nskm {

SubSamples split_subsamples(const Sample& stream, std::size_t k, double q) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    const std::size_t m = stream.size();
    const std::size_t s0_size = m / 4;
    const std::size_t half = m / 2;
    const std::size_t rest = half - s0_size;
    if (rest < k) throw std::invalid_argument("stream too short to give every level an item");
    SubSamples sub{stream.slice(0, s0_size), {}, q};
    std::size_t begin = s0_size;
    for (std::size_t level = 0; level < k; ++level) {
        const std::size_t size = rest / k + (level < rest % k ? 1 : 0);
        sub.levels.push_back(stream.slice(begin, begin + size));
        begin += size;
    }
    return sub;
}

std::size_t GoodnessMemo::KeyHash::operator()(const std::vector<PointId>& z) const noexcept {
    std::size_t h = z.size();
    for (PointId p : z) h ^= std::hash<PointId>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

GoodnessMemo::GoodnessMemo(const SubSamples& sub)
    : sub_(sub), k_(sub.levels.size()), s0_support_(uniform_support(sub.s0)) {
    if (k_ == 0) throw std::invalid_argument("goodness needs at least one level");
    for (const auto& level : sub.levels) required_.push_back(required(level.size()));
}

// Smallest count c with c / size >= 2q, or size + 1 when none exists.
std::size_t GoodnessMemo::required(std::size_t level_size) const {
    if (level_size == 0) throw std::invalid_argument("goodness level sample is empty");
    const double threshold = 2.0 * sub_.q;
    const double n = static_cast<double>(level_size);
    std::size_t lo = 0;
    std::size_t hi = level_size + 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (mid <= level_size && static_cast<double>(mid) / n >= threshold)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

const std::vector<double>& GoodnessMemo::row(PointId p) {
    auto it = rows_.find(p);
    if (it == rows_.end()) {
        std::vector<double> values(s0_support_.points.size());
        sub_.s0.space().distances_from(p, s0_support_.points, values);
        it = rows_.emplace(p, std::move(values)).first;
    }
    return it->second;
}

// Same accumulation order as weighted_risk, so verdicts agree bit for bit with
// empirical_risk(s0, z).
double GoodnessMemo::s0_risk(std::span<const PointId> z) {
    const std::size_t n = s0_support_.points.size();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (PointId c : z) {
        const auto& r = row(c);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], r[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += s0_support_.weights[i] * nearest[i];
    return total;
}

bool GoodnessMemo::is_good(std::span<const PointId> z, double r) {
    if (z.size() > k_) throw std::invalid_argument("goodness tuple is larger than k");
    if (!(r > 0.0)) throw std::invalid_argument("goodness radius must be positive");
    std::vector<PointId> sorted(z.begin(), z.end());
    std::sort(sorted.begin(), sorted.end());
    if (r != radius_) {
        memo_.clear();
        radius_ = r;
    }
    return evaluate(sorted, r);
}

bool GoodnessMemo::evaluate(const std::vector<PointId>& sorted, double r) {
    if (auto it = memo_.find(sorted); it != memo_.end()) return it->second;
    ++evaluations_;
    bool verdict;
    if (sorted.size() == k_) {
        verdict = s0_risk(sorted) <= r;
    } else {
        const Sample& level = sub_.levels[sorted.size()];
        const std::size_t need = required_[sorted.size()];
        const std::size_t size = level.size();
        std::size_t count = 0;
        std::vector<PointId> extended(sorted.size() + 1);
        for (std::size_t i = 0; i < size && count < need && count + (size - i) >= need; ++i) {
            const PointId x = level[i];
            const auto at = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
            std::copy(sorted.begin(), sorted.begin() + at, extended.begin());
            extended[static_cast<std::size_t>(at)] = x;
            std::copy(sorted.begin() + at, sorted.end(), extended.begin() + at + 1);
            if (evaluate(extended, r)) ++count;
        }
        verdict = count >= need;
    }
    memo_.emplace(sorted, verdict);
    return verdict;
}

bool is_good(std::span<const PointId> z, double r, GoodnessMemo& memo) { return memo.is_good(z, r); }

double grid_value(std::size_t m, double D, std::size_t n) {
    const double beta = 1.0 / std::sqrt(static_cast<double>(m));
    return D * beta * std::pow(1.0 + beta, static_cast<double>(n));
}

GoodRadius min_good_r(GoodnessMemo& memo, std::size_t m, double D) {
    if (m == 0) throw std::invalid_argument("stream length must be positive");
    if (!(D > 0.0)) throw std::invalid_argument("diameter bound must be positive");
    if (2.0 * memo.subsamples().q > 1.0) throw std::invalid_argument("stream too short: 2q > 1");
    for (std::size_t n = 0;; ++n) {
        const double r = grid_value(m, D, n);
        if (memo.is_good({}, r)) return GoodRadius{r, n};
        if (r >= D) throw std::logic_error("empty tuple not good at a radius covering the diameter");
    }
}

double default_q_skm2(std::size_t m, std::size_t k, double delta) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (m == 0) throw std::invalid_argument("stream length must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    const double md = static_cast<double>(m);
    const double kd = static_cast<double>(k);
    const double q = (32.0 * kd * kd * std::log(8.0 * md) + 32.0 * kd * std::log(8.0 / delta)) / md;
    if (q >= 0.5) {
        std::ostringstream msg;
        msg << "stream too short: SKM2 q = " << q << " >= 1/2 at m = " << m << ", k = " << k;
        throw std::invalid_argument(msg.str());
    }
    return q;
}

Skm2Result run_skm2(const Sample& stream, std::size_t k, const Skm2Options& options) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (k > options.k_max_guard) {
        std::ostringstream msg;
        msg << "k = " << k << " exceeds the SKM2 guard of " << options.k_max_guard
            << " (cost grows like (m/4k)^k); raise k_max_guard to override";
        throw std::invalid_argument(msg.str());
    }
    const std::size_t m = stream.size();
    if (m < 8 * k) {
        std::ostringstream msg;
        msg << "stream of length " << m << " is too short: need m >= 8k = " << 8 * k;
        throw std::invalid_argument(msg.str());
    }
    double q;
    if (options.q_override) {
        q = *options.q_override;
        if (!(q > 0.0 && q <= 0.5)) throw std::invalid_argument("q override must lie in (0, 1/2]");
    } else {
        q = default_q_skm2(m, k, options.delta);
    }

    const SubSamples sub = split_subsamples(stream, k, q);
    GoodnessMemo memo(sub);
    const double D = stream.space().diameter_bound();
    Skm2Result result;
    Skm2Trace& trace = result.trace;
    trace.q_used = q;
    trace.beta_m = 1.0 / std::sqrt(static_cast<double>(m));
    trace.s0_size = sub.s0.size();
    for (const auto& level : sub.levels) trace.level_sizes.push_back(level.size());

    if (D == 0.0) {
        // Single-point space: any center has zero risk.
        trace.r_selected = 0.0;
        for (std::size_t j = m / 2; j < m && result.centers.size() < k; ++j)
            if (!result.centers.contains(stream[j])) {
                result.centers.add(stream[j], j);
                trace.selections.push_back({j, stream[j]});
            }
        trace.shortfall = k - result.centers.size();
        return result;
    }

    const GoodRadius radius = min_good_r(memo, m, D);
    trace.r_selected = radius.r;
    trace.grid_index = radius.grid_index;

    std::vector<PointId> chosen;
    for (std::size_t j = m / 2; j < m && chosen.size() < k; ++j) {
        const PointId p = stream[j];
        if (result.centers.contains(p)) continue;
        chosen.push_back(p);
        if (memo.is_good(chosen, radius.r)) {
            result.centers.add(p, j);
            trace.selections.push_back({j, p});
        } else {
            chosen.pop_back();
        }
    }
    trace.goodness_evaluations = memo.evaluations();
    trace.shortfall = k - result.centers.size();
    if (result.centers.size() == k && !(empirical_risk(sub.s0, result.centers) <= radius.r))
        throw std::logic_error("completed SKM2 run exceeds the selected radius on S0");
    return result;
}

RiskBound skm2_risk_bound(std::size_t m, std::size_t k, double delta, double gamma, double D) {
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("gamma must lie in (0, 1/2)");
    const double q = default_q_skm2(m, k, delta);
    const double md = static_cast<double>(m);
    const double kd = static_cast<double>(k);
    const double beta = 1.0 / std::sqrt(md);
    const double eps = std::sqrt((2.0 * kd * std::log(md) + 2.0 * std::log(8.0 / delta)) / md);
    const double coef = (1.0 + beta) * (2.0 + 2.0 * gamma);
    return RiskBound{coef, D * ((1.0 + beta) * (4.0 * q * kd / gamma + eps) + eps)};
}

}  // namespace nskm
