// Copyright (c) 2026, The strata Authors. All rights reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "strata/bucketing.hpp"
#include "strata/metrics.hpp"
#include "strata/oomptimizer.hpp"
#include "strata/profile.hpp"
#include "strata/synthetic.hpp"

namespace strata {

// JSON artifact formats. Every document carries "format" and "version"
// keys; readers reject unknown formats and versions with ParseError.
//
//   strata.bucket_tree v1:   input_edges [B], output_edges [B][S], degenerate
//   strata.batch_profile v1: grid [B][S], probes [B][S][[size, "success"|"oom"]]
//   strata.memory_model v1:  coefficients {c0..c5}, capacity_bytes
//   strata.report v1:        SimulationReport fields
//   strata.corpus_config v1: seed, sources [...]

inline constexpr int format_version = 1;

std::string to_json(const BucketTree &tree);
BucketTree bucket_tree_from_json(std::string_view text);

std::string to_json(const BatchProfile &profile);
BatchProfile batch_profile_from_json(std::string_view text);

std::string to_json(const SyntheticMemoryModel &model);
SyntheticMemoryModel memory_model_from_json(std::string_view text);

std::string to_json(const SimulationReport &report);
std::string to_json(const ProfileComparison &comparison);

std::string to_json(const CorpusConfig &config);
CorpusConfig corpus_config_from_json(std::string_view text);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

}  // namespace strata
