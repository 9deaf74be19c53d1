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
#include <variant>
#include <vector>

#include "strata/bucketing.hpp"
#include "strata/rng.hpp"

namespace strata {

// Samplers are keyed by lane name (normally the modality name, "audio" or
// "text"). Zipped steps list lanes in ascending key order.

struct SingleStep {
    std::string lane;
    MiniBatch batch;
};

/// One batch per lane, kept as separate sub-batches for gradient accumulation.
struct ZippedStep {
    std::vector<std::string> lanes;
    std::vector<MiniBatch> batches;
};

using ModalityStep = std::variant<SingleStep, ZippedStep>;

/// The batches carried by a step, in lane order.
std::span<const MiniBatch> batches_of(const ModalityStep &step) noexcept;

using StepSource = Source<ModalityStep>;
using SamplerMap = std::map<std::string, std::unique_ptr<BatchSource>>;

enum class CombineStrategy : std::uint8_t { round_robin, zip };

struct CombinerConfig {
    CombineStrategy strategy = CombineStrategy::round_robin;
    /// Round-robin selection probabilities; empty means equal.
    std::map<std::string, double> lane_probs;
    std::uint64_t seed = 0;
};

/// Each step draws one lane from the seeded multinomial over lane_probs and
/// yields that lane's next batch. Throws ConfigError when the probability keys
/// differ from the sampler keys or do not sum to 1.
std::unique_ptr<StepSource> round_robin(SamplerMap samplers, const CombinerConfig &config);

/// Each step yields the next batch of every sampler. Needs >= 2 samplers.
std::unique_ptr<StepSource> zip(SamplerMap samplers);

/// Dispatches on config.strategy.
std::unique_ptr<StepSource> combine(SamplerMap samplers, const CombinerConfig &config);

std::string_view to_string(CombineStrategy s) noexcept;
CombineStrategy parse_strategy(std::string_view name);

}  // namespace strata
