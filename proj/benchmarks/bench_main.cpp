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

#include <benchmark/benchmark.h>

#include <random>

#include "strata/bucketing.hpp"
#include "strata/mux.hpp"
#include "strata/oomptimizer.hpp"

namespace {

std::vector<strata::ExampleMeta>
lognormal_sample(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 gen{seed};
    std::lognormal_distribution<double> in{2.0, 0.6};
    std::lognormal_distribution<double> out{4.0, 0.7};
    std::vector<strata::ExampleMeta> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i].id = std::to_string(i);
        v[i].source_id = i % 3 == 0 ? "a" : "b";
        v[i].input_length = in(gen);
        v[i].output_length = static_cast<std::int64_t>(out(gen)) + 1;
    }
    return v;
}

class Cycle final : public strata::ExampleSource {
public:
    explicit Cycle(const std::vector<strata::ExampleMeta> &items) : items_{items} {}
    strata::ExampleMeta next() override { return items_[pos_++ % items_.size()]; }

private:
    const std::vector<strata::ExampleMeta> &items_;
    std::size_t pos_ = 0;
};

const std::vector<strata::ExampleMeta> &
sample()
{
    static const auto s = lognormal_sample(200000, 1);
    return s;
}

const strata::BucketTree &
tree()
{
    static const auto t =
        strata::estimate_bins(sample(), strata::BucketConfig{10, 10, 200000, strata::MassMeasure::input_mass});
    return t;
}

}  // namespace

static void
BM_EstimateBins(benchmark::State &state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto s = lognormal_sample(n, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(strata::estimate_bins(s, strata::BucketConfig{10, 10, n,
                                                                                strata::MassMeasure::input_mass}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EstimateBins)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void
BM_Route(benchmark::State &state)
{
    const auto &s = sample();
    const auto &t = tree();
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(strata::route(s[k % s.size()], t));
        ++k;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Route);

static void
BM_SamplerThroughput(benchmark::State &state)
{
    strata::BatchProfile profile;
    profile.grid.assign(10, std::vector<std::int64_t>(10, state.range(0)));
    strata::DynamicBucketingSampler sampler{std::make_unique<Cycle>(sample()), tree(), profile, 0};
    for (auto _ : state)
        benchmark::DoNotOptimize(sampler.next());
    state.SetItemsProcessed(static_cast<std::int64_t>(sampler.consumed()));
}
BENCHMARK(BM_SamplerThroughput)->Arg(8)->Arg(64);

static void
BM_Mux(benchmark::State &state)
{
    std::map<std::string, std::unique_ptr<strata::ExampleSource>> streams;
    streams["a"] = std::make_unique<Cycle>(sample());
    streams["b"] = std::make_unique<Cycle>(sample());
    strata::MuxConfig config;
    config.stream_weights = {{"a", 3.0}, {"b", 1.0}};
    auto m = strata::mux(std::move(streams), config);
    for (auto _ : state)
        benchmark::DoNotOptimize(m->next());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Mux);

static void
BM_SearchBatchSize(benchmark::State &state)
{
    strata::SyntheticMemoryModel model{{1e4, 20, 10, 2, 1, 0.5}, static_cast<double>(state.range(0))};
    for (auto _ : state)
        benchmark::DoNotOptimize(strata::search_batch_size(model, 10.0, 50, strata::SearchConfig{}));
}
BENCHMARK(BM_SearchBatchSize)->Arg(1 << 20)->Arg(1 << 28);

static void
BM_BuildProfile(benchmark::State &state)
{
    strata::SyntheticMemoryModel model{{1e4, 20, 10, 2, 1, 0.5}, 2e8};
    for (auto _ : state)
        benchmark::DoNotOptimize(strata::build_profile(model, tree(), strata::SearchConfig{}));
}
BENCHMARK(BM_BuildProfile)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
