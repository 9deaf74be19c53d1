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
#include <memory>
#include <string>
#include <vector>

#include "strata/example.hpp"

namespace strata {

/// One dataset read as an infinite sequence of shard passes.
struct StreamSpec {
    std::string source_id;
    std::vector<std::filesystem::path> shard_paths;
    double weight = 1.0;
    std::uint64_t seed = 0;
    Modality modality = Modality::audio;

    /// Throws ConfigError if weight <= 0 or there are no shards.
    void validate() const;
};

struct Shard {
    std::filesystem::path path;
    std::vector<ExampleMeta> examples;
};

/// Reads one JSON-lines shard. Every record must carry id, modality,
/// input_length and output_length; the modality must match `modality`.
/// Blank lines are skipped. Throws IoError or ParseError (with line number).
Shard load_shard(const std::filesystem::path &path, const std::string &source_id, Modality modality);

/// Parses a top-level manifest (see docs in README.md).
///
/// Shard globs resolve relative to the manifest's directory. A dataset without
/// an explicit weight gets its natural weight, the number of examples it
/// holds; a dataset without a seed gets a seed hashed from its source_id.
std::vector<StreamSpec> load_manifest(const std::filesystem::path &path);

struct DatasetCounts {
    std::size_t num_examples = 0;
    double total_input_mass = 0.0;
    double total_output_mass = 0.0;
};

/// Exact totals over one pass of the dataset.
DatasetCounts count_dataset(const StreamSpec &spec);

/// Shard visitation order for pass `pass` (0-based).
std::vector<std::size_t> shard_order(const StreamSpec &spec, std::uint64_t pass);

/// Example order within shard `shard_index` during pass `pass`, as a
/// permutation of [0, num_examples).
std::vector<std::size_t> example_order(const StreamSpec &spec, std::uint64_t pass,
                                       std::size_t shard_index, std::size_t num_examples);

/// Infinite stream over a dataset. Each pass visits every shard once in a
/// seeded order and every example of a shard once in a seeded order; the
/// shard files are re-read from disk on every visit.
class ShardStream final : public ExampleSource {
public:
    explicit ShardStream(StreamSpec spec);

    ExampleMeta next() override;

    /// Index of the pass most recently read from.
    std::uint64_t pass() const noexcept { return pass_; }

    const StreamSpec &spec() const noexcept { return spec_; }

private:
    void open_next_shard();

    StreamSpec spec_;
    std::uint64_t pass_ = 0;
    std::vector<std::size_t> order_;
    std::size_t order_pos_ = 0;
    Shard current_;
    std::vector<std::size_t> current_order_;
    std::size_t example_pos_ = 0;
};

std::unique_ptr<ExampleSource> open_stream(StreamSpec spec);

}  // namespace strata
