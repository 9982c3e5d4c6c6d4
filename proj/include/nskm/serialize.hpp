#pragma once

#include <json.hpp>

#include "nskm/adversarial.hpp"
#include "nskm/skm.hpp"
#include "nskm/skm2.hpp"

namespace nskm {

// Non-finite values become the strings "inf", "-inf" and "nan".
nlohmann::json json_number(double value);

void to_json(nlohmann::json& j, const Clustering& c);
void to_json(nlohmann::json& j, const QBall& b);
void to_json(nlohmann::json& j, const SkmTrace& t);
void to_json(nlohmann::json& j, const Skm2Trace& t);
void to_json(nlohmann::json& j, const Factor2Stats& s);
void to_json(nlohmann::json& j, const TightnessStats& s);

}  // namespace nskm
