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

#include <cmath>
#include <random>

#include "strata/bucketing.hpp"
#include "strata/errors.hpp"
#include "strata/oomptimizer.hpp"
#include "test_support.hpp"

using namespace strata;
using namespace strata::testing;

namespace {

constexpr auto ok = ProbeOutcome::success;
constexpr auto oom = ProbeOutcome::oom;

/// Largest b in [1, cap] the model accepts, by exhaustive scan; 0 if none.
std::int64_t
scan_oracle(const SyntheticMemoryModel &model, double in, std::int64_t out, std::int64_t cap)
{
    std::int64_t best = 0;
    for (std::int64_t b = 1; b <= cap; ++b)
        if (model.memory(b, in, out) <= model.capacity_bytes())
            best = b;
    return best;
}

/// Wraps a runner and hides its reentrancy so build_profile runs serially.
class Serial final : public StepRunner {
public:
    explicit Serial(StepRunner &inner) : inner_{inner} {}
    ProbeOutcome run(std::int64_t b, double in, std::int64_t out) override
    {
        ++calls;
        return inner_.run(b, in, out);
    }
    std::size_t calls = 0;

private:
    StepRunner &inner_;
};

SyntheticMemoryModel
random_model(std::mt19937_64 &gen, double in, std::int64_t out, std::int64_t target_max)
{
    std::uniform_real_distribution<double> u{0.0, 1.0};
    MemoryCoefficients c{u(gen) * 1e3, u(gen) * 5.0, u(gen) * 5.0, u(gen) * 0.1, u(gen) * 0.1, u(gen) * 0.05};
    c.c1 += 0.01;
    const double per_example = c.c1 * in + c.c2 * out + c.c3 * in * in + c.c4 * out * out + c.c5 * in * out;
    const double capacity = c.c0 + per_example * (static_cast<double>(target_max) + 0.5 * u(gen));
    return SyntheticMemoryModel{c, capacity};
}

}  // namespace

TEST_CASE("linear model trace: double, then bisect to within 5%")
{
    SyntheticMemoryModel model{{0, 10, 0, 0, 0, 0}, 1000};
    const SearchResult r = search_batch_size(model, 1.0, 0, SearchConfig{32, 0.05, 65536});
    const std::vector<Probe> expected = {{32, ok}, {64, ok}, {128, oom}, {96, ok}, {112, oom}, {104, oom}, {100, ok}};
    CHECK(r.probes == expected);
    CHECK(r.batch_size == 100);
    REQUIRE(r.invalid_bound);
    CHECK(*r.invalid_bound == 104);
    CHECK(static_cast<double>(104 - 100) / 104 <= 0.05);
    CHECK(scan_oracle(model, 1.0, 0, 4096) == 100);
}

TEST_CASE("an OOM at the start halves until a valid size is found")
{
    SyntheticMemoryModel model{{0, 1, 0, 0, 0, 0}, 5.5};
    const SearchResult r = search_batch_size(model, 1.0, 0, SearchConfig{32, 0.05, 1024});
    const std::vector<Probe> expected = {{32, oom}, {16, oom}, {8, oom}, {4, ok}, {6, oom}, {5, ok}};
    CHECK(r.probes == expected);
    CHECK(r.batch_size == 5);
}

TEST_CASE("batch size one running out of memory is unsatisfiable")
{
    SyntheticMemoryModel model{{100, 1, 0, 0, 0, 0}, 50};
    CHECK_THROWS_AS(search_batch_size(model, 1.0, 1, SearchConfig{}), UnsatisfiableError);
    CHECK_THROWS_AS(search_batch_size(model, 1.0, 1, SearchConfig{1, 0.05, 10}), UnsatisfiableError);
}

TEST_CASE("a runner that never runs out of memory stops at the cap")
{
    SyntheticMemoryModel model{{0, 0, 0, 0, 0, 0}, 1};
    const SearchResult r = search_batch_size(model, 3.0, 3, SearchConfig{32, 0.05, 4096});
    CHECK(r.batch_size == 4096);
    CHECK_FALSE(r.invalid_bound);
    std::vector<Probe> expected;
    for (std::int64_t b = 32; b <= 4096; b *= 2)
        expected.push_back({b, ok});
    CHECK(r.probes == expected);

    // A cap off the doubling ladder is probed directly.
    const SearchResult odd = search_batch_size(model, 3.0, 3, SearchConfig{32, 0.05, 100});
    CHECK(odd.batch_size == 100);
    CHECK(odd.probes.back() == Probe{100, ok});
    CHECK(odd.probes.size() == 3);
}

TEST_CASE("search is near-optimal, safe and logarithmic on random monotone models")
{
    std::mt19937_64 gen{2024};
    std::uniform_int_distribution<std::int64_t> target{2, 2000};
    std::uniform_real_distribution<double> len{1.0, 50.0};
    const SearchConfig config{32, 0.05, 4096};
    for (int trial = 0; trial < 300; ++trial) {
        const double in = len(gen);
        const auto out = static_cast<std::int64_t>(len(gen) * 3);
        const SyntheticMemoryModel model = random_model(gen, in, out, target(gen));
        SyntheticMemoryModel runner = model;
        const std::int64_t oracle = scan_oracle(model, in, out, config.max_batch_size_cap);
        REQUIRE(oracle >= 2);

        const SearchResult r = search_batch_size(runner, in, out, config);
        CHECK(r.batch_size <= oracle);
        CHECK(r.batch_size >= static_cast<std::int64_t>(std::ceil(0.95 * static_cast<double>(oracle))));

        bool probed_ok = false;
        std::int64_t smallest_oom = config.max_batch_size_cap + 1;
        for (const Probe &p : r.probes) {
            probed_ok = probed_ok || (p.batch_size == r.batch_size && p.outcome == ok);
            if (p.outcome == oom)
                smallest_oom = std::min(smallest_oom, p.batch_size);
        }
        CHECK(probed_ok);
        CHECK(r.batch_size < smallest_oom);
        REQUIRE(r.invalid_bound);
        CHECK(*r.invalid_bound == smallest_oom);
        const bool terminated = static_cast<double>(smallest_oom - r.batch_size) <= 0.05 * smallest_oom ||
                                smallest_oom - r.batch_size == 1;
        CHECK(terminated);

        const auto log2max = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(oracle))));
        CHECK(r.probes.size() <= 2 * log2max + 4);
    }
}

TEST_CASE("seeding the initial guess changes probe count, never the result")
{
    std::mt19937_64 gen{7};
    std::uniform_int_distribution<std::int64_t> target{1, 3000};
    std::uniform_int_distribution<std::int64_t> guess{1, 5000};
    for (int trial = 0; trial < 200; ++trial) {
        SyntheticMemoryModel model = random_model(gen, 10.0, 20, target(gen));
        for (std::int64_t start : {1, 7, 32, 33}) {
            const SearchConfig config{start, 0.05, 4000};
            const std::int64_t plain = search_batch_size(model, 10.0, 20, config).batch_size;
            for (int g = 0; g < 5; ++g)
                CHECK(search_batch_size(model, 10.0, 20, config, guess(gen)).batch_size == plain);
        }
    }
}

TEST_CASE("probe log rejects non-monotone outcomes")
{
    ProbeLog a;
    a.record(64, oom);
    CHECK_THROWS_AS(a.record(80, ok), ContractViolation);

    ProbeLog b;
    b.record(32, ok);
    CHECK_THROWS_AS(b.record(16, oom), ContractViolation);

    ProbeLog c;
    c.record(32, ok);
    c.record(64, oom);
    c.record(48, ok);
    CHECK(c.largest_valid() == 48);
    CHECK(c.smallest_invalid() == 64);
}

TEST_CASE("search config validation")
{
    CHECK_NOTHROW(SearchConfig{}.validate());
    CHECK_THROWS_AS((SearchConfig{0, 0.05, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((SearchConfig{1, 0.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((SearchConfig{1, 1.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((SearchConfig{1, 0.05, 0}.validate()), ConfigError);
    CHECK_THROWS_AS(SyntheticMemoryModel({-1, 0, 0, 0, 0, 0}, 1), ConfigError);
    CHECK_THROWS_AS(SyntheticMemoryModel({0, 0, 0, 0, 0, 0}, 0), ConfigError);
}

TEST_CASE("synthetic model memory is nondecreasing in every argument")
{
    const SyntheticMemoryModel m{{5, 1, 2, 0.1, 0.2, 0.3}, 1e9};
    for (std::int64_t b = 1; b < 50; b += 7)
        for (double in = 0; in < 30; in += 4.5)
            for (std::int64_t out = 0; out < 40; out += 6) {
                CHECK(m.memory(b + 1, in, out) >= m.memory(b, in, out));
                CHECK(m.memory(b, in + 1, out) >= m.memory(b, in, out));
                CHECK(m.memory(b, in, out + 1) >= m.memory(b, in, out));
            }
}

TEST_CASE("1x1 profile equals a single search")
{
    SyntheticMemoryModel model{{0, 10, 0, 0, 0, 0}, 1000};
    BucketTree tree;
    tree.input_edges = {1.0};
    tree.output_edges = {{0}};
    const BatchProfile p = build_profile(model, tree, SearchConfig{});
    const SearchResult r = search_batch_size(model, 1.0, 0, SearchConfig{});
    CHECK(p.grid == std::vector<std::vector<std::int64_t>>{{r.batch_size}});
    CHECK(p.probes[0][0] == r.probes);
}

TEST_CASE("10x10 quadratic profile is near the exhaustive optimum and monotone")
{
    std::mt19937_64 gen{99};
    std::lognormal_distribution<double> in{2.0, 0.5};
    std::lognormal_distribution<double> out{3.5, 0.6};
    std::vector<ExampleMeta> sample;
    for (int i = 0; i < 20000; ++i)
        sample.push_back(make_example("e" + std::to_string(i), in(gen), static_cast<std::int64_t>(out(gen))));
    const BucketTree tree = estimate_bins(sample, BucketConfig{10, 10, 20000, MassMeasure::input_mass});

    SyntheticMemoryModel model{{1e4, 20, 10, 2, 1, 0.5}, 2e7};
    const SearchConfig config{32, 0.05, 8192};
    const BatchProfile p = build_profile(model, tree, config);
    REQUIRE_NOTHROW(p.validate());

    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            const std::int64_t oracle =
                scan_oracle(model, tree.input_edges[i], tree.output_edges[i][j], config.max_batch_size_cap);
            CHECK(p.grid[i][j] <= oracle);
            CHECK(static_cast<double>(p.grid[i][j]) >= 0.95 * static_cast<double>(oracle));
        }

    // Nonincreasing wherever both probe lengths are nondecreasing.
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            for (std::size_t k = i; k < 10; ++k)
                for (std::size_t l = 0; l < 10; ++l) {
                    if (k == i && l < j)
                        continue;
                    if (tree.input_edges[k] >= tree.input_edges[i] &&
                        tree.output_edges[k][l] >= tree.output_edges[i][j])
                        CHECK(p.grid[k][l] <= p.grid[i][j]);
                }

    // Serial seeded order and parallel unseeded order agree exactly.
    Serial serial{model};
    const BatchProfile q = build_profile(serial, tree, config);
    CHECK(q.grid == p.grid);
    std::size_t unseeded_calls = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            const SearchResult r = search_batch_size(model, tree.input_edges[i], tree.output_edges[i][j], config);
            CHECK(r.batch_size == q.grid[i][j]);
            unseeded_calls += r.probes.size();
        }
    MESSAGE("probes: seeded " << serial.calls << ", unseeded " << unseeded_calls);
}

TEST_CASE("an unsatisfiable cell is named in the error")
{
    SyntheticMemoryModel model{{0, 0, 0, 0, 1, 0}, 100};
    BucketTree tree;
    tree.input_edges = {1.0, 2.0};
    tree.output_edges = {{5, 9}, {5, 11}};
    try {
        Serial serial{model};
        build_profile(serial, tree, SearchConfig{});
        FAIL("expected UnsatisfiableError");
    } catch (const UnsatisfiableError &e) {
        CHECK(std::string{e.what()}.find("cell (1, 1)") != std::string::npos);
    }
    CHECK_THROWS_AS(build_profile(model, tree, SearchConfig{}), UnsatisfiableError);
}

TEST_CASE("baseline heuristic profile")
{
    BucketTree tree;
    tree.input_edges = {10.0, 20.0, 1000.0};
    tree.output_edges = {{1, 2}, {3, 4}, {5, 6}};

    BatchProfile p = baseline_heuristic_profile(tree, 100.0, 0.0);
    CHECK(p.grid[0] == std::vector<std::int64_t>{10, 10});
    CHECK(p.grid[1] == std::vector<std::int64_t>{5, 5});
    CHECK(p.grid[2] == std::vector<std::int64_t>{1, 1});  // clamped

    p = baseline_heuristic_profile(tree, 100.0, 0.01);
    CHECK(p.grid[0][0] == 9);  // floor(100 / (10 + 1))
    CHECK(p.grid[1][0] == 4);  // floor(100 / (20 + 4))
    CHECK(p.probes.empty());

    std::mt19937_64 gen{1};
    std::uniform_real_distribution<double> u{0.0, 500.0};
    for (int t = 0; t < 100; ++t) {
        const auto q = baseline_heuristic_profile(tree, u(gen) + 1e-3, u(gen));
        for (const auto &row : q.grid)
            for (auto b : row)
                CHECK(b >= 1);
    }
    CHECK_THROWS_AS(baseline_heuristic_profile(tree, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(baseline_heuristic_profile(tree, 1.0, -1.0), ConfigError);
}
