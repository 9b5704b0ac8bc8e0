#pragma once

#include <json.hpp>

#include "ahop/types.hpp"

namespace ahop {

nlohmann::json weights_to_json(const WeightSet& weights);
WeightSet weights_from_json(const nlohmann::json& j);

nlohmann::json variant_to_json(const VariantSpec& spec);
VariantSpec variant_from_json(const nlohmann::json& j);

}  // namespace ahop
