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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace strata {

enum class ProbeOutcome : std::uint8_t { success, oom };

struct Probe {
    std::int64_t batch_size = 0;
    ProbeOutcome outcome = ProbeOutcome::success;

    bool operator==(const Probe &) const = default;
};

/// Maximum safe batch size per (bucket, sub-bucket), plus the probe log that
/// produced each cell (empty for heuristic profiles).
struct BatchProfile {
    std::vector<std::vector<std::int64_t>> grid;
    std::vector<std::vector<std::vector<Probe>>> probes;

    std::size_t num_buckets() const noexcept { return grid.size(); }
    std::size_t num_subbuckets() const noexcept { return grid.empty() ? 0 : grid.front().size(); }

    std::int64_t at(std::size_t i, std::size_t j) const { return grid.at(i).at(j); }

    /// Throws ConfigError unless the grid is a non-empty rectangle of
    /// entries >= 1 and the probe log (if present) has the same shape.
    void validate() const;

    /// Mean over all cells.
    double mean() const;

    /// Repeats each single-column row `num_subbuckets` times, so a 1D profile
    /// can be compared cell by cell against a 2D one.
    BatchProfile broadcast(std::size_t num_subbuckets) const;
};

}  // namespace strata
