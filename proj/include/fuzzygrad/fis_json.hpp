#pragma once

#include <json.hpp>
#include <string>

#include "fuzzygrad/fis.hpp"

namespace fuzzygrad {

// JSON round-trip for a fuzzy system: structure, method names, variables,
// MF parameters (with their trainable flags) and rules. Parameter values
// survive the round trip exactly.
nlohmann::json fis_to_json(const Fis& fis);
Fis fis_from_json(const nlohmann::json& j);

void save_fis(const Fis& fis, const std::string& path);
Fis load_fis(const std::string& path);

}  // namespace fuzzygrad
