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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "strata/example.hpp"

namespace strata {

/// Log-normal length distribution, clipped to [min, max].
struct LengthDistribution {
    double median = 1.0;
    double sigma = 0.5;
    double min = 0.0;
    double max = 1e9;
};

/// One generated dataset. Output lengths follow
///   round(output_per_input * input + U[0, output_noise])
/// and with probability outlier_rate are multiplied by outlier_scale.
struct SyntheticSource {
    std::string source_id;
    Modality modality = Modality::audio;
    std::size_t num_examples = 1000;
    std::size_t num_shards = 1;
    LengthDistribution input;
    /// Round input lengths to integers (token counts); otherwise milliseconds.
    bool integer_input = false;
    double output_per_input = 1.0;
    double output_noise = 0.0;
    double outlier_rate = 0.0;
    double outlier_scale = 1.0;
    std::optional<double> weight;
};

struct CorpusConfig {
    std::uint64_t seed = 0;
    std::vector<SyntheticSource> sources;

    /// Throws ConfigError on invalid distribution parameters.
    void validate() const;
};

/// The corpus used by the tests, benchmarks and README walkthrough: two audio
/// and two text sources with weak input/output correlation and 2% outliers.
CorpusConfig default_corpus_config();

/// Deterministic examples of one source; `seed` is the corpus seed.
std::vector<ExampleMeta> generate_examples(const SyntheticSource &source, std::uint64_t seed);

/// Writes shards under out_dir/<source_id>/ and out_dir/manifest.json.
/// Returns the manifest path.
std::filesystem::path write_corpus(const CorpusConfig &config, const std::filesystem::path &out_dir);

}  // namespace strata
