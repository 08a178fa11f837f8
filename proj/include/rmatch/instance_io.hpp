#pragma once

#include <filesystem>

#include <json.hpp>

#include "rmatch/instance.hpp"

namespace rmatch {

/// Reads the external instance record. Structural problems (missing keys,
/// wrong JSON types) are reported the same way as invariant violations.
RawInstance raw_instance_from_json(const nlohmann::json& j);

/// Inverse of parse + validate: rationals as "p/q" strings, table requests as
/// location indices.
nlohmann::json instance_to_json(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

}  // namespace rmatch
