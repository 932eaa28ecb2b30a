#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "psurr/trainer.hpp"

namespace psurr {

/// Configuration problem tied to a specific key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Flat JSON object whose keys mirror TrainerConfig fields.
nlohmann::json config_to_json(const TrainerConfig& config);

/// Missing keys keep their defaults; unknown keys and wrongly typed values
/// raise ConfigError. The result is validated.
TrainerConfig config_from_json(const nlohmann::json& j);

TrainerConfig load_config_file(const std::string& path);

/// Sets `key` from a command-line string. Values that parse as JSON are
/// stored as such, anything else as a string.
void apply_override(nlohmann::json& j, std::string_view key, std::string_view value);

}  // namespace psurr
