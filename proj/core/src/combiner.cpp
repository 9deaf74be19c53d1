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

#include "strata/combiner.hpp"

#include <cmath>
#include <utility>

#include "strata/errors.hpp"

namespace strata {

namespace {

class RoundRobin final : public StepSource {
public:
    RoundRobin(SamplerMap samplers, const CombinerConfig &config) : rng_{config.seed}
    {
        if (samplers.empty())
            throw ConfigError{"round robin needs at least one sampler"};
        std::map<std::string, double> probs = config.lane_probs;
        if (probs.empty())
            for (const auto &[lane, _] : samplers)
                probs.emplace(lane, 1.0 / static_cast<double>(samplers.size()));
        if (probs.size() != samplers.size())
            throw ConfigError{"round robin probabilities must cover exactly the sampler lanes"};

        double total = 0.0;
        for (auto &[lane, p] : probs) {
            auto it = samplers.find(lane);
            if (it == samplers.end() || !it->second)
                throw ConfigError{"round robin probability given for unknown lane '" + lane + "'"};
            if (!(p > 0.0))
                throw ConfigError{"round robin probability for '" + lane + "' must be positive"};
            total += p;
            lanes_.push_back(lane);
            samplers_.push_back(std::move(it->second));
            cumulative_.push_back(total);
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ConfigError{"round robin probabilities sum to " + std::to_string(total) + ", expected 1"};
    }

    ModalityStep next() override
    {
        const std::size_t k = rng_.categorical(cumulative_);
        return SingleStep{lanes_[k], samplers_[k]->next()};
    }

private:
    std::vector<std::string> lanes_;
    std::vector<std::unique_ptr<BatchSource>> samplers_;
    std::vector<double> cumulative_;
    Rng rng_;
};

class Zip final : public StepSource {
public:
    explicit Zip(SamplerMap samplers)
    {
        if (samplers.size() < 2)
            throw ConfigError{"zip needs at least two samplers"};
        for (auto &[lane, sampler] : samplers) {
            if (!sampler)
                throw ConfigError{"zip got a null sampler for lane '" + lane + "'"};
            lanes_.push_back(lane);
            samplers_.push_back(std::move(sampler));
        }
    }

    ModalityStep next() override
    {
        ZippedStep step;
        step.lanes = lanes_;
        step.batches.reserve(samplers_.size());
        for (auto &s : samplers_)
            step.batches.push_back(s->next());
        return step;
    }

private:
    std::vector<std::string> lanes_;
    std::vector<std::unique_ptr<BatchSource>> samplers_;
};

}  // namespace

std::span<const MiniBatch>
batches_of(const ModalityStep &step) noexcept
{
    if (const auto *single = std::get_if<SingleStep>(&step))
        return {&single->batch, 1};
    return std::get<ZippedStep>(step).batches;
}

std::unique_ptr<StepSource>
round_robin(SamplerMap samplers, const CombinerConfig &config)
{
    return std::make_unique<RoundRobin>(std::move(samplers), config);
}

std::unique_ptr<StepSource>
zip(SamplerMap samplers)
{
    return std::make_unique<Zip>(std::move(samplers));
}

std::unique_ptr<StepSource>
combine(SamplerMap samplers, const CombinerConfig &config)
{
    if (config.strategy == CombineStrategy::zip)
        return zip(std::move(samplers));
    return round_robin(std::move(samplers), config);
}

std::string_view
to_string(CombineStrategy s) noexcept
{
    return s == CombineStrategy::zip ? "zip" : "round_robin";
}

CombineStrategy
parse_strategy(std::string_view name)
{
    if (name == "round_robin")
        return CombineStrategy::round_robin;
    if (name == "zip")
        return CombineStrategy::zip;
    throw ConfigError{"unknown combine strategy '" + std::string{name} + "' (expected round_robin or zip)"};
}

}  // namespace strata
