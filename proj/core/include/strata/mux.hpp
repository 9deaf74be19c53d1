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

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "strata/datastream.hpp"
#include "strata/example.hpp"
#include "strata/rng.hpp"

namespace strata {

/// Blend weights keyed by source_id. Weights are stored as given and
/// normalized only when drawing.
struct MuxConfig {
    std::map<std::string, double> stream_weights;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Stochastic weighted multiplexer: every call to next() picks stream i with
/// probability w_i / sum(w) and yields that stream's next example.
class Mux final : public ExampleSource {
public:
    Mux(std::map<std::string, std::unique_ptr<ExampleSource>> streams, const MuxConfig &config);

    ExampleMeta next() override;

    /// Number of examples taken from each stream so far, in source_id order.
    const std::vector<std::uint64_t> &draw_counts() const noexcept { return counts_; }

private:
    std::vector<std::unique_ptr<ExampleSource>> streams_;
    std::vector<double> cumulative_;
    std::vector<std::uint64_t> counts_;
    Rng rng_;
};

std::unique_ptr<ExampleSource> mux(std::map<std::string, std::unique_ptr<ExampleSource>> streams,
                                   const MuxConfig &config);

/// Mux config whose weights are the specs' weights.
MuxConfig mux_config_from(std::span<const StreamSpec> specs, std::uint64_t seed);

/// Opens every spec and multiplexes them with their manifest weights.
std::unique_ptr<ExampleSource> open_blend(std::span<const StreamSpec> specs, std::uint64_t seed);

/// Source frequencies in a window of examples. Empty window gives an empty map.
std::map<std::string, double> empirical_mixture(std::span<const ExampleMeta> window);

}  // namespace strata
