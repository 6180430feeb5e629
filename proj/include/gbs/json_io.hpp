// Copyright 2026 The gbs-fga Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "gbs/optim.hpp"
#include "gbs/problems.hpp"

namespace gbs::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Pretty JSON with insertion-ordered keys and doubles in shortest round-trip
/// form, so parse -> dump reproduces the same bytes.
std::string dump(const Json& value);

Json read_json(const std::filesystem::path& path);
/// Writes through a temporary file and rename.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& value);

/// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(const std::string& text);

Json to_json(const FgaInstance& inst);
/// Throws InputError on missing fields, wrong types or a foreign format_version.
FgaInstance instance_from_json(const Json& j);
FgaInstance read_instance(const std::filesystem::path& path);

Json to_json(const GroundTruth& truth, int n_vars);
GroundTruth ground_truth_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
/// Overlays the keys present in `j` onto `base`.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});

/// Record body without the metadata block; deterministic for a fixed input.
Json to_json(const TrainRecord& record);

}  // namespace gbs::io
