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

#include "strata/combiner.hpp"
#include "strata/errors.hpp"
#include "test_support.hpp"

using namespace strata;
using namespace strata::testing;

namespace {

struct Lanes {
    SamplerMap samplers;
    std::map<std::string, std::shared_ptr<std::size_t>> counters;

    void add(const std::string &lane, Modality m)
    {
        auto c = std::make_shared<std::size_t>(0);
        counters[lane] = c;
        samplers[lane] = std::make_unique<CountingBatchSource>(lane, m, c);
    }
};

Lanes
audio_text()
{
    Lanes l;
    l.add("audio", Modality::audio);
    l.add("text", Modality::text);
    return l;
}

std::map<std::string, std::size_t>
run_round_robin(Lanes lanes, const CombinerConfig &config, std::size_t steps)
{
    auto src = round_robin(std::move(lanes.samplers), config);
    std::map<std::string, std::size_t> counts;
    for (std::size_t s = 0; s < steps; ++s) {
        const ModalityStep step = src->next();
        REQUIRE(std::holds_alternative<SingleStep>(step));
        const auto &single = std::get<SingleStep>(step);
        ++counts[single.lane];
        // The batch came from the named lane.
        CHECK(single.batch.examples.front().source_id == single.lane);
    }
    return counts;
}

}  // namespace

TEST_CASE("round robin with one lane always yields that lane")
{
    Lanes l;
    l.add("audio", Modality::audio);
    auto counter = l.counters["audio"];
    const auto counts = run_round_robin(std::move(l), CombinerConfig{}, 500);
    CHECK(counts.at("audio") == 500);
    CHECK(*counter == 500);
}

TEST_CASE("round robin with equal probabilities")
{
    Lanes l = audio_text();
    auto ca = l.counters["audio"];
    auto ct = l.counters["text"];
    CombinerConfig config;
    config.seed = 0;
    const auto counts = run_round_robin(std::move(l), config, 10000);
    const std::size_t a = counts.count("audio") ? counts.at("audio") : 0;
    CHECK(a >= 4800);
    CHECK(a <= 5200);
    CHECK(a + counts.at("text") == 10000);
    CHECK(*ca == a);
    CHECK(*ct == 10000 - a);
    CHECK(a == 5016);  // pinned for seed 0
}

TEST_CASE("round robin with 0.25 / 0.75")
{
    CombinerConfig config;
    config.lane_probs = {{"audio", 0.25}, {"text", 0.75}};
    config.seed = 11;
    const auto counts = run_round_robin(audio_text(), config, 100000);
    CHECK(std::abs(static_cast<double>(counts.at("audio")) / 100000 - 0.25) <= 0.01);
}

TEST_CASE("round robin is deterministic per seed")
{
    auto sequence = [](std::uint64_t seed) {
        Lanes l = audio_text();
        CombinerConfig config;
        config.seed = seed;
        auto src = round_robin(std::move(l.samplers), config);
        std::string lanes;
        for (int i = 0; i < 200; ++i)
            lanes += std::get<SingleStep>(src->next()).lane.front();
        return lanes;
    };
    CHECK(sequence(3) == sequence(3));
    CHECK(sequence(3) != sequence(4));
}

TEST_CASE("round robin configuration errors")
{
    CombinerConfig config;
    config.lane_probs = {{"audio", 0.5}, {"speech", 0.5}};
    CHECK_THROWS_AS(round_robin(audio_text().samplers, config), ConfigError);
    config.lane_probs = {{"audio", 1.0}};
    CHECK_THROWS_AS(round_robin(audio_text().samplers, config), ConfigError);
    config.lane_probs = {{"audio", 0.5}, {"text", 0.6}};
    CHECK_THROWS_AS(round_robin(audio_text().samplers, config), ConfigError);
    config.lane_probs = {{"audio", -0.5}, {"text", 1.5}};
    CHECK_THROWS_AS(round_robin(audio_text().samplers, config), ConfigError);
    CHECK_THROWS_AS(round_robin(SamplerMap{}, CombinerConfig{}), ConfigError);
}

TEST_CASE("zip advances every sampler in lockstep")
{
    Lanes l = audio_text();
    auto ca = l.counters["audio"];
    auto ct = l.counters["text"];
    auto src = zip(std::move(l.samplers));
    for (std::size_t s = 1; s <= 1000; ++s) {
        const ModalityStep step = src->next();
        REQUIRE(std::holds_alternative<ZippedStep>(step));
        const auto &z = std::get<ZippedStep>(step);
        REQUIRE(z.lanes == std::vector<std::string>{"audio", "text"});
        REQUIRE(z.batches.size() == 2);
        CHECK(z.batches[0].modality == Modality::audio);
        CHECK(z.batches[1].modality == Modality::text);
        CHECK(z.batches[0].examples[0].id == "audio" + std::to_string(s));
        CHECK(z.batches[1].examples[0].id == "text" + std::to_string(s));
        CHECK(batches_of(step).size() == 2);
    }
    CHECK(*ca == 1000);
    CHECK(*ct == 1000);
}

TEST_CASE("zip over three lanes yields three sub-batches")
{
    Lanes l = audio_text();
    l.add("image", Modality::text);
    auto src = zip(std::move(l.samplers));
    for (int s = 0; s < 10; ++s) {
        const auto step = src->next();
        CHECK(batches_of(step).size() == 3);
        CHECK(std::get<ZippedStep>(step).lanes == std::vector<std::string>{"audio", "image", "text"});
    }
}

TEST_CASE("zip needs at least two samplers")
{
    Lanes l;
    l.add("audio", Modality::audio);
    CHECK_THROWS_AS(zip(std::move(l.samplers)), ConfigError);
}

TEST_CASE("combine dispatches on strategy")
{
    CombinerConfig config;
    config.strategy = CombineStrategy::zip;
    auto z = combine(audio_text().samplers, config);
    CHECK(std::holds_alternative<ZippedStep>(z->next()));
    config.strategy = CombineStrategy::round_robin;
    auto r = combine(audio_text().samplers, config);
    const auto step = r->next();
    CHECK(std::holds_alternative<SingleStep>(step));
    CHECK(batches_of(step).size() == 1);
}

TEST_CASE("strategy names")
{
    CHECK(parse_strategy("round_robin") == CombineStrategy::round_robin);
    CHECK(parse_strategy("zip") == CombineStrategy::zip);
    CHECK(to_string(CombineStrategy::zip) == "zip");
    CHECK_THROWS_AS(parse_strategy("shuffle"), ConfigError);
}
