#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "prbslice/model.hpp"

namespace prbslice {

/// JSON <-> NetworkConfig. Field names follow the struct members.
///
///   {
///     "name": "3-2-4",
///     "services":   [{"service_id": 1, "name": "eMBB-Premium", "priority_rank": 1}, ...],
///     "slices":     [{"slice_id": 1, "service_id": 1, "partition_id": 1, "t_win": 10, "m": 2}, ...],
///     "partitions": {"1": [1, 2], "2": [3, 4]},
///     "total_prbs": 200,
///     "horizon": 30,
///     "overuse_fraction": "1/2",      // string ratio or number, optional
///     "timestep_minutes": 1           // optional
///   }
///
/// `provision` may be given per service; it is always re-derived and checked.
NetworkConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const NetworkConfig& config);

/// Reads and validates a config file.
NetworkConfig load_config(const std::filesystem::path& path);

Ratio ratio_from_json(const nlohmann::json& value);
nlohmann::json ratio_to_json(const Ratio& r);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace prbslice
