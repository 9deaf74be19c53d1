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

#include "strata/bucketing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

namespace {

/// Greedy cumulative cut of `values` (ascending) into `parts` equal-mass
/// groups. Returns `parts` upper edges.
template <typename T>
std::vector<T>
greedy_edges(std::span<const T> values, std::span<const double> masses, std::size_t parts)
{
    std::vector<T> edges(parts, values.back());
    double total = 0.0;
    for (double m : masses)
        total += m;
    if (!(total > 0.0))
        return edges;

    double cumulative = 0.0;
    std::size_t p = 0;
    for (std::size_t k = 1; k < parts; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(parts);
        while (p < values.size()) {
            cumulative += masses[p];
            if (cumulative >= target)
                break;
            ++p;
        }
        if (p >= values.size()) {
            p = values.size() - 1;
            edges[k - 1] = values[p];
            continue;
        }
        edges[k - 1] = values[p];
        // The next target may be reached by the same element; back off so the
        // loop re-examines it without double counting.
        cumulative -= masses[p];
    }
    return edges;
}

template <typename T>
std::size_t
first_fit(std::span<const T> edges, T value)
{
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) - edges.begin());
}

}  // namespace

void
BucketConfig::validate() const
{
    if (num_buckets < 1)
        throw ConfigError{"num_buckets must be >= 1"};
    if (num_subbuckets < 1)
        throw ConfigError{"num_subbuckets must be >= 1"};
    if (sample_size < num_buckets * num_subbuckets)
        throw ConfigError{"sample_size " + std::to_string(sample_size) + " is smaller than the " +
                          std::to_string(num_buckets) + "x" + std::to_string(num_subbuckets) + " bucket grid"};
}

void
BucketTree::validate() const
{
    if (input_edges.empty())
        throw ConfigError{"bucket tree has no input edges"};
    if (output_edges.size() != input_edges.size())
        throw ConfigError{"bucket tree has " + std::to_string(output_edges.size()) + " output edge lists for " +
                          std::to_string(input_edges.size()) + " buckets"};
    for (std::size_t i = 0; i < input_edges.size(); ++i) {
        if (!std::isfinite(input_edges[i]))
            throw ConfigError{"bucket tree input edge " + std::to_string(i) + " is not finite"};
        if (i > 0 && input_edges[i] < input_edges[i - 1])
            throw ConfigError{"bucket tree input edges must be non-decreasing"};
    }
    const std::size_t subs = output_edges.front().size();
    if (subs == 0)
        throw ConfigError{"bucket tree has no output edges"};
    for (std::size_t i = 0; i < output_edges.size(); ++i) {
        const auto &row = output_edges[i];
        if (row.size() != subs)
            throw ConfigError{"bucket " + std::to_string(i) + " has " + std::to_string(row.size()) +
                              " sub-buckets, expected " + std::to_string(subs)};
        if (!std::is_sorted(row.begin(), row.end()))
            throw ConfigError{"output edges of bucket " + std::to_string(i) + " must be non-decreasing"};
    }
}

BucketTree
BucketTree::collapse_subbuckets() const
{
    BucketTree out;
    out.input_edges = input_edges;
    out.degenerate = degenerate;
    for (const auto &row : output_edges)
        out.output_edges.push_back({row.back()});
    return out;
}

BucketTree
estimate_bins(std::span<const ExampleMeta> sample, const BucketConfig &config)
{
    if (config.num_buckets < 1 || config.num_subbuckets < 1)
        throw ConfigError{"bucket grid dimensions must be >= 1"};
    const std::size_t cells = config.num_buckets * config.num_subbuckets;
    if (sample.size() < cells)
        throw ConfigError{"sample of " + std::to_string(sample.size()) + " examples is smaller than the " +
                          std::to_string(config.num_buckets) + "x" + std::to_string(config.num_subbuckets) +
                          " bucket grid"};
    for (const ExampleMeta &ex : sample)
        if (!std::isfinite(ex.input_length) || ex.input_length < 0.0 || ex.output_length < 0)
            throw DomainError{"example '" + ex.id + "' has an invalid length"};

    const bool by_count = config.mass_measure == MassMeasure::example_count;

    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sample[a].input_length != sample[b].input_length)
            return sample[a].input_length < sample[b].input_length;
        return sample[a].id < sample[b].id;
    });

    std::vector<double> lengths;
    std::vector<double> masses;
    lengths.reserve(order.size());
    masses.reserve(order.size());
    for (std::size_t idx : order) {
        lengths.push_back(sample[idx].input_length);
        masses.push_back(by_count ? 1.0 : sample[idx].input_length);
    }

    BucketTree tree;
    tree.input_edges = greedy_edges<double>(lengths, masses, config.num_buckets);

    // Partition by the routing rule so sub-bucket edges describe exactly the
    // examples route() will send to each bucket.
    std::vector<std::vector<std::size_t>> members(config.num_buckets);
    for (std::size_t idx : order) {
        std::size_t i = first_fit<double>(tree.input_edges, sample[idx].input_length);
        members[std::min(i, config.num_buckets - 1)].push_back(idx);
    }

    std::int64_t global_max_output = 0;
    for (const ExampleMeta &ex : sample)
        global_max_output = std::max(global_max_output, ex.output_length);

    for (auto &bucket : members) {
        if (bucket.empty()) {
            tree.output_edges.emplace_back(config.num_subbuckets, global_max_output);
            continue;
        }
        std::sort(bucket.begin(), bucket.end(), [&](std::size_t a, std::size_t b) {
            if (sample[a].output_length != sample[b].output_length)
                return sample[a].output_length < sample[b].output_length;
            return sample[a].id < sample[b].id;
        });
        std::vector<std::int64_t> outs;
        std::vector<double> out_masses;
        outs.reserve(bucket.size());
        out_masses.reserve(bucket.size());
        for (std::size_t idx : bucket) {
            outs.push_back(sample[idx].output_length);
            out_masses.push_back(by_count ? 1.0 : static_cast<double>(sample[idx].output_length));
        }
        tree.output_edges.push_back(greedy_edges<std::int64_t>(outs, out_masses, config.num_subbuckets));
    }

    const auto all_equal = [](const auto &v) { return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>{}) == v.end(); };
    const bool flat_inputs = config.num_buckets > 1 && all_equal(tree.input_edges);
    bool flat_outputs = config.num_subbuckets > 1;
    for (const auto &row : tree.output_edges)
        flat_outputs = flat_outputs && all_equal(row);
    tree.degenerate = flat_inputs || flat_outputs;
    return tree;
}

Route
route(const ExampleMeta &example, const BucketTree &tree)
{
    Route r;
    std::size_t i = first_fit<double>(tree.input_edges, example.input_length);
    if (i >= tree.input_edges.size()) {
        i = tree.input_edges.size() - 1;
        r.input_outlier = true;
    }
    const auto &subs = tree.output_edges[i];
    std::size_t j = first_fit<std::int64_t>(subs, example.output_length);
    if (j >= subs.size()) {
        j = subs.size() - 1;
        r.output_outlier = true;
    }
    r.bucket = {i, j};
    return r;
}

PaddingStats
padding_stats(const MiniBatch &batch)
{
    if (batch.examples.empty())
        throw DomainError{"padding_stats of an empty batch"};
    double in_sum = 0.0;
    double out_sum = 0.0;
    double in_max = 0.0;
    std::int64_t out_max = 0;
    for (const ExampleMeta &ex : batch.examples) {
        in_sum += ex.input_length;
        out_sum += static_cast<double>(ex.output_length);
        in_max = std::max(in_max, ex.input_length);
        out_max = std::max(out_max, ex.output_length);
    }
    const auto n = static_cast<double>(batch.examples.size());
    PaddingStats stats;
    if (in_max > 0.0)
        stats.input_padding_ratio = std::clamp(1.0 - in_sum / (n * in_max), 0.0, 1.0);
    if (out_max > 0)
        stats.output_padding_ratio = std::clamp(1.0 - out_sum / (n * static_cast<double>(out_max)), 0.0, 1.0);
    return stats;
}

DynamicBucketingSampler::DynamicBucketingSampler(std::unique_ptr<ExampleSource> input, BucketTree tree,
                                                 BatchProfile profile, std::uint64_t seed)
  : input_{std::move(input)}, tree_{std::move(tree)}, profile_{std::move(profile)}, rng_{seed}
{
    if (!input_)
        throw ConfigError{"bucketing sampler needs an input stream"};
    tree_.validate();
    if (profile_.grid.empty() || profile_.num_buckets() != tree_.num_buckets() ||
        profile_.num_subbuckets() != tree_.num_subbuckets())
        throw ConfigError{"batch profile shape does not match the bucket tree"};
    for (std::size_t i = 0; i < profile_.grid.size(); ++i)
        for (std::size_t j = 0; j < profile_.grid[i].size(); ++j)
            if (profile_.grid[i][j] < 1)
                throw ConfigError{"batch profile cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") has non-positive batch size"};
    profile_.validate();
    buffers_.assign(tree_.num_buckets(), std::vector<Buffer>(tree_.num_subbuckets()));
}

MiniBatch
DynamicBucketingSampler::make_batch(BucketIndex index, Buffer &buffer)
{
    MiniBatch batch;
    batch.examples = std::exchange(buffer.examples, {});
    batch.outliers = std::exchange(buffer.outliers, {});
    batch.bucket = index;
    batch.modality = batch.examples.front().modality;

    std::vector<std::size_t> perm(batch.examples.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng_.shuffle(std::span{perm});
    std::vector<ExampleMeta> examples;
    std::vector<bool> outliers;
    examples.reserve(perm.size());
    outliers.reserve(perm.size());
    for (std::size_t k : perm) {
        examples.push_back(std::move(batch.examples[k]));
        outliers.push_back(batch.outliers[k]);
    }
    batch.examples = std::move(examples);
    batch.outliers = std::move(outliers);

    for (const ExampleMeta &ex : batch.examples) {
        batch.max_input_length = std::max(batch.max_input_length, ex.input_length);
        batch.max_output_length = std::max(batch.max_output_length, ex.output_length);
    }
    return batch;
}

MiniBatch
DynamicBucketingSampler::next()
{
    for (;;) {
        ExampleMeta ex = input_->next();
        ++consumed_;
        if (!modality_)
            modality_ = ex.modality;
        else if (*modality_ != ex.modality)
            throw DomainError{"bucketing sampler received mixed modalities (example '" + ex.id + "')"};

        const Route r = route(ex, tree_);
        Buffer &buffer = buffers_[r.bucket.input][r.bucket.output];
        buffer.examples.push_back(std::move(ex));
        buffer.outliers.push_back(r.outlier());
        const auto target = static_cast<std::size_t>(profile_.grid[r.bucket.input][r.bucket.output]);
        if (buffer.examples.size() >= target)
            return make_batch(r.bucket, buffer);
    }
}

std::vector<MiniBatch>
DynamicBucketingSampler::drain()
{
    std::vector<MiniBatch> out;
    for (std::size_t i = 0; i < buffers_.size(); ++i)
        for (std::size_t j = 0; j < buffers_[i].size(); ++j)
            if (!buffers_[i][j].examples.empty())
                out.push_back(make_batch({i, j}, buffers_[i][j]));
    return out;
}

std::unique_ptr<DynamicBucketingSampler>
dynamic_bucketing_sampler(std::unique_ptr<ExampleSource> input, BucketTree tree, BatchProfile profile,
                          std::uint64_t seed)
{
    return std::make_unique<DynamicBucketingSampler>(std::move(input), std::move(tree), std::move(profile), seed);
}

}  // namespace strata
