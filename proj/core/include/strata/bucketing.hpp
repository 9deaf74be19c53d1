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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "strata/example.hpp"
#include "strata/profile.hpp"
#include "strata/rng.hpp"

namespace strata {

enum class MassMeasure : std::uint8_t {
    input_mass,     ///< seconds (audio) or tokens (text)
    example_count,  ///< every example weighs 1
};

struct BucketConfig {
    std::size_t num_buckets = 10;
    std::size_t num_subbuckets = 10;  ///< 1 gives plain 1D bucketing
    std::size_t sample_size = 500'000;
    MassMeasure mass_measure = MassMeasure::input_mass;

    void validate() const;
};

/// 2D bin edges. Bucket i admits input lengths in (input_edges[i-1],
/// input_edges[i]]; sub-bucket j of bucket i admits output lengths in
/// (output_edges[i][j-1], output_edges[i][j]].
struct BucketTree {
    std::vector<double> input_edges;
    std::vector<std::vector<std::int64_t>> output_edges;
    /// Set when the sample could not be split (all lengths equal).
    bool degenerate = false;

    std::size_t num_buckets() const noexcept { return input_edges.size(); }
    std::size_t num_subbuckets() const noexcept { return output_edges.empty() ? 0 : output_edges.front().size(); }

    /// Throws ConfigError on shape mismatch or decreasing edges.
    void validate() const;

    /// Same input edges with a single sub-bucket per bucket whose edge is the
    /// bucket's last output edge.
    BucketTree collapse_subbuckets() const;

    bool operator==(const BucketTree &) const = default;
};

/// Greedy equal-mass partition of a sample.
///
/// Examples are sorted by (input_length, id) and mass is accumulated; the
/// k-th cut falls on the first example whose cumulative mass reaches
/// k * total / num_buckets, and that example's length becomes the edge. The
/// examples routed to each bucket are then split the same way on
/// output_length, with output tokens as mass (or 1 per example under
/// MassMeasure::example_count). The last edge of every list is the sample
/// maximum.
BucketTree estimate_bins(std::span<const ExampleMeta> sample, const BucketConfig &config);

struct BucketIndex {
    std::size_t input = 0;
    std::size_t output = 0;

    auto operator<=>(const BucketIndex &) const = default;
};

struct Route {
    BucketIndex bucket;
    bool input_outlier = false;
    bool output_outlier = false;

    bool outlier() const noexcept { return input_outlier || output_outlier; }
};

/// First-fit routing: a length equal to an edge belongs to the lower bucket;
/// lengths beyond the last edge go to the last bucket and are flagged.
Route route(const ExampleMeta &example, const BucketTree &tree);

struct MiniBatch {
    std::vector<ExampleMeta> examples;
    /// Parallel to `examples`: true where the example overflowed its bucket.
    std::vector<bool> outliers;
    Modality modality = Modality::audio;
    BucketIndex bucket;
    double max_input_length = 0.0;
    std::int64_t max_output_length = 0;

    std::size_t size() const noexcept { return examples.size(); }
};

struct PaddingStats {
    double input_padding_ratio = 0.0;
    double output_padding_ratio = 0.0;
};

/// Fraction of the padded batch that is padding, per axis. Throws
/// DomainError on an empty batch.
PaddingStats padding_stats(const MiniBatch &batch);

using BatchSource = Source<MiniBatch>;

/// Keeps one buffer per (bucket, sub-bucket) and emits a batch as soon as a
/// buffer holds exactly the profile's batch size for that cell.
///
/// All input examples must share one modality. The seed only permutes the
/// order of examples inside each emitted batch.
class DynamicBucketingSampler final : public BatchSource {
public:
    DynamicBucketingSampler(std::unique_ptr<ExampleSource> input, BucketTree tree, BatchProfile profile,
                            std::uint64_t seed);

    MiniBatch next() override;

    /// Flushes every non-empty buffer as a (possibly short) batch, in bucket
    /// index order. Intended for shutdown.
    std::vector<MiniBatch> drain();

    std::uint64_t consumed() const noexcept { return consumed_; }

    const BucketTree &tree() const noexcept { return tree_; }
    const BatchProfile &profile() const noexcept { return profile_; }

private:
    struct Buffer {
        std::vector<ExampleMeta> examples;
        std::vector<bool> outliers;
    };

    MiniBatch make_batch(BucketIndex index, Buffer &buffer);

    std::unique_ptr<ExampleSource> input_;
    BucketTree tree_;
    BatchProfile profile_;
    Rng rng_;
    std::vector<std::vector<Buffer>> buffers_;
    std::optional<Modality> modality_;
    std::uint64_t consumed_ = 0;
};

std::unique_ptr<DynamicBucketingSampler> dynamic_bucketing_sampler(std::unique_ptr<ExampleSource> input,
                                                                   BucketTree tree, BatchProfile profile,
                                                                   std::uint64_t seed);

}  // namespace strata
