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

#include "strata/mux.hpp"

#include <cmath>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

void
MuxConfig::validate() const
{
    if (stream_weights.empty())
        throw ConfigError{"mux needs at least one stream"};
    for (const auto &[id, w] : stream_weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw ConfigError{"mux weight for '" + id + "' must be positive"};
}

Mux::Mux(std::map<std::string, std::unique_ptr<ExampleSource>> streams, const MuxConfig &config)
  : rng_{config.seed}
{
    config.validate();
    if (streams.size() != config.stream_weights.size())
        throw ConfigError{"mux got " + std::to_string(streams.size()) + " streams but " +
                          std::to_string(config.stream_weights.size()) + " weights"};

    double total = 0.0;
    for (auto &[id, w] : config.stream_weights) {
        auto it = streams.find(id);
        if (it == streams.end() || !it->second)
            throw ConfigError{"mux weight given for unknown stream '" + id + "'"};
        streams_.push_back(std::move(it->second));
        total += w;
        cumulative_.push_back(total);
    }
    counts_.assign(streams_.size(), 0);
}

ExampleMeta
Mux::next()
{
    const std::size_t i = streams_.size() == 1 ? 0 : rng_.categorical(cumulative_);
    ++counts_[i];
    return streams_[i]->next();
}

std::unique_ptr<ExampleSource>
mux(std::map<std::string, std::unique_ptr<ExampleSource>> streams, const MuxConfig &config)
{
    return std::make_unique<Mux>(std::move(streams), config);
}

MuxConfig
mux_config_from(std::span<const StreamSpec> specs, std::uint64_t seed)
{
    MuxConfig config;
    config.seed = seed;
    for (const StreamSpec &s : specs)
        if (!config.stream_weights.emplace(s.source_id, s.weight).second)
            throw ConfigError{"duplicate source_id '" + s.source_id + "'"};
    return config;
}

std::unique_ptr<ExampleSource>
open_blend(std::span<const StreamSpec> specs, std::uint64_t seed)
{
    const MuxConfig config = mux_config_from(specs, seed);
    std::map<std::string, std::unique_ptr<ExampleSource>> streams;
    for (const StreamSpec &s : specs)
        streams.emplace(s.source_id, open_stream(s));
    return mux(std::move(streams), config);
}

std::map<std::string, double>
empirical_mixture(std::span<const ExampleMeta> window)
{
    std::map<std::string, std::size_t> counts;
    for (const ExampleMeta &ex : window)
        ++counts[ex.source_id];
    std::map<std::string, double> freq;
    const auto n = static_cast<double>(window.size());
    for (const auto &[id, c] : counts)
        freq.emplace(id, static_cast<double>(c) / n);
    return freq;
}

}  // namespace strata
