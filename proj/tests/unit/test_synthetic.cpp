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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "strata/datastream.hpp"
#include "strata/errors.hpp"
#include "strata/synthetic.hpp"
#include "test_support.hpp"

using namespace strata;
using namespace strata::testing;

TEST_CASE("generated examples have the declared shape")
{
    SyntheticSource s;
    s.source_id = "toy";
    s.modality = Modality::text;
    s.num_examples = 5000;
    s.input = {20.0, 0.8, 2.0, 60.0};
    s.integer_input = true;
    s.output_per_input = 2.0;
    s.output_noise = 10.0;
    const auto v = generate_examples(s, 1);
    REQUIRE(v.size() == 5000);
    std::set<std::string> ids;
    for (const ExampleMeta &ex : v) {
        ids.insert(ex.id);
        CHECK(ex.source_id == "toy");
        CHECK(ex.modality == Modality::text);
        CHECK(ex.input_length >= 2.0);
        CHECK(ex.input_length <= 60.0);
        CHECK(ex.input_length == std::round(ex.input_length));
        CHECK(ex.output_length >= static_cast<std::int64_t>(2.0 * ex.input_length));
        CHECK(ex.output_length <= static_cast<std::int64_t>(2.0 * ex.input_length + 10.0));
    }
    CHECK(ids.size() == 5000);
    const auto clipped_hi = std::count_if(v.begin(), v.end(), [](auto &e) { return e.input_length == 60.0; });
    CHECK(clipped_hi > 0);
}

TEST_CASE("log-normal inputs match their parameters")
{
    SyntheticSource s;
    s.source_id = "moments";
    s.num_examples = 40000;
    s.input = {10.0, 0.5, 0.0, 1e9};
    s.output_per_input = 3.0;
    s.output_noise = 20.0;
    const auto v = generate_examples(s, 77);
    double sum_log = 0.0;
    double sum_log2 = 0.0;
    double sum_out = 0.0;
    for (const ExampleMeta &ex : v) {
        const double l = std::log(ex.input_length);
        sum_log += l;
        sum_log2 += l * l;
        sum_out += static_cast<double>(ex.output_length);
    }
    const double n = static_cast<double>(v.size());
    const double mean_log = sum_log / n;
    const double sd_log = std::sqrt(sum_log2 / n - mean_log * mean_log);
    CHECK(mean_log == doctest::Approx(std::log(10.0)).epsilon(0.005));
    CHECK(sd_log == doctest::Approx(0.5).epsilon(0.02));
    // E[out] = 3 * E[in] + 10, E[in] = median * exp(sigma^2 / 2).
    const double expected_out = 3.0 * 10.0 * std::exp(0.125) + 10.0;
    CHECK(sum_out / n == doctest::Approx(expected_out).epsilon(0.02));
    // Audio inputs carry millisecond resolution.
    for (std::size_t k = 0; k < 100; ++k)
        CHECK(std::abs(v[k].input_length * 1000.0 - std::round(v[k].input_length * 1000.0)) < 1e-6);
}

TEST_CASE("outliers scale the output length")
{
    SyntheticSource s;
    s.source_id = "out";
    s.num_examples = 20000;
    s.input = {10.0, 0.0, 0.0, 100.0};
    s.integer_input = true;
    s.output_per_input = 1.0;
    s.outlier_rate = 0.1;
    s.outlier_scale = 5.0;
    const auto v = generate_examples(s, 3);
    const auto outliers = std::count_if(v.begin(), v.end(), [](auto &e) { return e.output_length == 50; });
    const auto normal = std::count_if(v.begin(), v.end(), [](auto &e) { return e.output_length == 10; });
    CHECK(outliers + normal == 20000);
    CHECK(static_cast<double>(outliers) / 20000 == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("generation is deterministic per seed and source")
{
    const CorpusConfig c = default_corpus_config();
    CHECK(generate_examples(c.sources[0], 5) == generate_examples(c.sources[0], 5));
    CHECK(generate_examples(c.sources[0], 5) != generate_examples(c.sources[0], 6));
    SyntheticSource renamed = c.sources[0];
    renamed.source_id = "other";
    CHECK(generate_examples(renamed, 5)[0].input_length != generate_examples(c.sources[0], 5)[0].input_length);
}

TEST_CASE("write_corpus produces a loadable manifest")
{
    TempDir dir;
    CorpusConfig c;
    c.seed = 9;
    SyntheticSource a;
    a.source_id = "a";
    a.num_examples = 101;
    a.num_shards = 4;
    SyntheticSource b = a;
    b.source_id = "b";
    b.modality = Modality::text;
    b.num_examples = 50;
    b.num_shards = 1;
    b.weight = 3.0;
    c.sources = {a, b};

    const auto manifest = write_corpus(c, dir.path());
    CHECK(manifest == dir / "manifest.json");
    const auto specs = load_manifest(manifest);
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].source_id == "a");
    CHECK(specs[0].shard_paths.size() == 4);
    CHECK(specs[0].weight == 101.0);
    CHECK(specs[1].weight == 3.0);
    CHECK(specs[1].modality == Modality::text);
    CHECK(specs[0].seed != specs[1].seed);

    // Shards are contiguous slices of the generated sequence.
    std::vector<ExampleMeta> all;
    for (const auto &p : specs[0].shard_paths) {
        auto shard = load_shard(p, "a", Modality::audio);
        all.insert(all.end(), shard.examples.begin(), shard.examples.end());
    }
    const auto expected = generate_examples(a, 9);
    REQUIRE(all.size() == expected.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
        CHECK(all[k].id == expected[k].id);
        CHECK(all[k].input_length == doctest::Approx(expected[k].input_length));
        CHECK(all[k].output_length == expected[k].output_length);
    }

    // Rewriting is byte-identical.
    const std::string first = read_file(manifest) + read_file(dir / "a" / "shard_0002.jsonl");
    write_corpus(c, dir.path());
    CHECK(read_file(manifest) + read_file(dir / "a" / "shard_0002.jsonl") == first);
}

TEST_CASE("corpus config validation")
{
    CHECK_NOTHROW(default_corpus_config().validate());
    auto broken = [](auto edit) {
        CorpusConfig c = default_corpus_config();
        edit(c.sources[0]);
        return c;
    };
    CHECK_THROWS_AS(CorpusConfig{}.validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.num_examples = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.num_shards = s.num_examples + 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.input.median = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.input.sigma = -1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.input.max = s.input.min - 1; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.outlier_rate = 1.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.outlier_scale = 0.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.weight = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.source_id = "a/b"; }).validate(), ConfigError);
    CHECK_THROWS_AS(broken([](SyntheticSource &s) { s.source_id = "asr_b"; }).validate(), ConfigError);
}
