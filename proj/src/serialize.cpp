#include "nskm/serialize.hpp"

#include <cmath>

namespace nskm {

using nlohmann::json;

json json_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return value;
}

void to_json(json& j, const Clustering& c) {
    j = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
        json entry{{"point", c.centers()[i]}};
        const auto& pos = c.provenance()[i];
        entry["stream_position"] = pos ? json(*pos) : json(nullptr);
        j.push_back(std::move(entry));
    }
}

void to_json(json& j, const QBall& b) {
    j = json{{"center", b.center},
             {"center_position", b.center_position},
             {"q", json_number(b.q)},
             {"radius", json_number(b.radius)},
             {"quantile_point", b.quantile_point},
             {"quantile_position", b.quantile_position}};
}

void to_json(json& j, const SkmTrace& t) {
    json selections = json::array();
    for (const auto& s : t.selections)
        selections.push_back({{"position", s.position}, {"point", s.point}, {"qball", s.qball}});
    j = json{{"algorithm", "skm"},
             {"q_used", json_number(t.q_used)},
             {"m", t.m},
             {"phase1_size", t.phase1_size},
             {"blackbox_centers", t.blackbox_centers},
             {"qballs", t.qballs},
             {"selections", std::move(selections)},
             {"shortfall", t.shortfall},
             {"warnings", t.warnings}};
}

void to_json(json& j, const Skm2Trace& t) {
    json selections = json::array();
    for (const auto& s : t.selections) selections.push_back({{"position", s.position}, {"point", s.point}});
    j = json{{"algorithm", "skm2"},
             {"q_used", json_number(t.q_used)},
             {"beta_m", json_number(t.beta_m)},
             {"r_selected", json_number(t.r_selected)},
             {"grid_index", t.grid_index},
             {"goodness_evaluations", t.goodness_evaluations},
             {"s0_size", t.s0_size},
             {"level_sizes", t.level_sizes},
             {"selections", std::move(selections)},
             {"shortfall", t.shortfall}};
}

void to_json(json& j, const Factor2Stats& s) {
    j = json{{"m1", s.m1},
             {"trials", s.trials},
             {"events", s.events},
             {"event_rate", json_number(s.event_rate)},
             {"equalities", s.equalities},
             {"exact_equality_rate", json_number(s.exact_equality_rate)},
             {"max_abs_error", json_number(s.max_abs_error)}};
}

void to_json(json& j, const TightnessStats& s) {
    json quantiles = json::array();
    for (double v : s.unconditional_ratio_quantiles) quantiles.push_back(json_number(v));
    j = json{{"m1", s.m1},
             {"q", json_number(s.q)},
             {"trials", s.trials},
             {"opt_risk", json_number(s.opt_risk)},
             {"in_y", s.in_y},
             {"fraction_in_y", json_number(s.fraction_in_y)},
             {"shortfalls", s.shortfalls},
             {"conditional_ratio_median",
              s.conditional_ratio_median ? json_number(*s.conditional_ratio_median) : json(nullptr)},
             {"unconditional_ratio_quantiles", std::move(quantiles)},
             {"closed_form_ratio", json_number(s.closed_form_ratio)}};
}

}  // namespace nskm
