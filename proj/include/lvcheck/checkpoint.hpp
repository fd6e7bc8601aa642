#pragma once

#include "lvcheck/gcn.hpp"

#include <json.hpp>

#include <string>

namespace lvcheck {

inline constexpr int kCheckpointVersion = 1;

nlohmann::ordered_json config_to_json(const GcnConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected (BadConfig).
GcnConfig config_from_json(const nlohmann::json& j, GcnConfig base = {});

/// Versioned JSON container: config plus row-major weight arrays. Doubles are
/// printed in shortest round-trip form, so load(save(m)) == m bit for bit.
std::string save_model(const GcnModel& model);
GcnModel load_model(const std::string& text);

void write_model_file(const GcnModel& model, const std::string& path);
GcnModel read_model_file(const std::string& path);

/// Human-readable shapes and hyperparameters.
std::string model_info(const GcnModel& model);

}  // namespace lvcheck
