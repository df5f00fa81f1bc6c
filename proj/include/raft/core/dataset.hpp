#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "raft/core/types.hpp"

namespace raft {

/// Reads a line-delimited dataset file. One JSON object per line with
/// fields `id`, `human`, `machine`, `source_model`, `dataset`.
/// Order is preserved. Malformed records raise a parse error naming the
/// record index; duplicate ids raise a validation error.
std::vector<TextSample> load_dataset(const std::string& path);

void save_dataset(const std::vector<TextSample>& samples, const std::string& path);

/// Writes attack records one JSON object per line; the config snapshot is
/// embedded inline. load_records round-trips to field-equal records.
void save_records(const std::vector<AttackRecord>& records, const std::string& path);

std::vector<AttackRecord> load_records(const std::string& path);

void to_json(nlohmann::json& j, const AttackConfig& config);
void from_json(const nlohmann::json& j, AttackConfig& config);
void to_json(nlohmann::json& j, const Substitution& sub);
void from_json(const nlohmann::json& j, Substitution& sub);
void to_json(nlohmann::json& j, const AttackRecord& record);
void from_json(const nlohmann::json& j, AttackRecord& record);
void to_json(nlohmann::json& j, const TextSample& sample);
void from_json(const nlohmann::json& j, TextSample& sample);

}  // namespace raft
