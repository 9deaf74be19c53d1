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
#include <optional>
#include <vector>

#include "strata/bucketing.hpp"
#include "strata/profile.hpp"

namespace strata {

/// One probed training step: forward, backward and parameter update at the
/// given batch shape. Implementations must be monotone in batch_size.
class StepRunner {
public:
    virtual ~StepRunner() = default;

    virtual ProbeOutcome run(std::int64_t batch_size, double input_length, std::int64_t output_length) = 0;

    /// True when run() may be called concurrently from several threads.
    virtual bool reentrant() const noexcept { return false; }
};

/// Coefficients of
///   mem(b, Lin, Lout) = c0 + b * (c1*Lin + c2*Lout + c3*Lin^2 + c4*Lout^2 + c5*Lin*Lout)
struct MemoryCoefficients {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double c5 = 0.0;
};

/// Closed-form memory model standing in for a real accelerator.
class SyntheticMemoryModel final : public StepRunner {
public:
    /// Throws ConfigError on negative coefficients or non-positive capacity.
    SyntheticMemoryModel(MemoryCoefficients coefficients, double capacity_bytes);

    double memory(std::int64_t batch_size, double input_length, std::int64_t output_length) const noexcept;

    ProbeOutcome run(std::int64_t batch_size, double input_length, std::int64_t output_length) override;

    bool reentrant() const noexcept override { return true; }

    const MemoryCoefficients &coefficients() const noexcept { return coefficients_; }
    double capacity_bytes() const noexcept { return capacity_; }

private:
    MemoryCoefficients coefficients_;
    double capacity_;
};

struct SearchConfig {
    std::int64_t initial_batch_size = 32;
    double tolerance = 0.05;
    std::int64_t max_batch_size_cap = 65536;

    void validate() const;
};

/// Probe log with the monotonicity guard: recording a success at or above a
/// known OOM size, or an OOM at or below a known valid size, throws
/// ContractViolation.
class ProbeLog {
public:
    void record(std::int64_t batch_size, ProbeOutcome outcome);

    const std::vector<Probe> &probes() const noexcept { return probes_; }
    std::optional<std::int64_t> largest_valid() const noexcept { return valid_; }
    std::optional<std::int64_t> smallest_invalid() const noexcept { return invalid_; }

private:
    std::vector<Probe> probes_;
    std::optional<std::int64_t> valid_;
    std::optional<std::int64_t> invalid_;
};

struct SearchResult {
    std::int64_t batch_size = 0;
    /// Smallest size observed to OOM; empty when the cap itself succeeded.
    std::optional<std::int64_t> invalid_bound;
    std::vector<Probe> probes;
};

/// Largest safe batch size for one input/output shape.
///
/// Starting from the initial size, a successful probe doubles the size and an
/// OOM halves it until both a valid and an invalid size are known; then the
/// midpoint is probed recursively until (invalid - valid) / invalid <=
/// tolerance (or the two are adjacent). If the cap succeeds it is returned.
///
/// `initial_guess`, when given, is snapped down to the doubling/halving
/// ladder of config.initial_batch_size; for a monotone runner this changes
/// only the number of probes, never the result.
///
/// Throws UnsatisfiableError if a batch of one OOMs.
SearchResult search_batch_size(StepRunner &runner, double input_length, std::int64_t output_length,
                               const SearchConfig &config, std::optional<std::int64_t> initial_guess = {});

/// Runs search_batch_size for every cell of the tree at the cell's edge
/// lengths. Cells are solved from the longest to the shortest, each seeded
/// with its nearest solved neighbour; reentrant runners are probed from
/// several threads. Throws UnsatisfiableError naming the failing cell.
BatchProfile build_profile(StepRunner &runner, const BucketTree &tree, const SearchConfig &config);

/// Total-length budget heuristic: floor(max_total_length / (L + penalty * L^2))
/// with L the bucket's input edge, clamped to >= 1. Output length is ignored.
BatchProfile baseline_heuristic_profile(const BucketTree &tree, double max_total_length, double quadratic_penalty);

}  // namespace strata
