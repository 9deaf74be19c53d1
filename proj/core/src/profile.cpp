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

#include "strata/profile.hpp"

#include <string>

#include "strata/errors.hpp"

namespace strata {

void
BatchProfile::validate() const
{
    if (grid.empty() || grid.front().empty())
        throw ConfigError{"batch profile is empty"};
    const std::size_t cols = grid.front().size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].size() != cols)
            throw ConfigError{"batch profile row " + std::to_string(i) + " has " +
                              std::to_string(grid[i].size()) + " cells, expected " + std::to_string(cols)};
        for (std::size_t j = 0; j < cols; ++j)
            if (grid[i][j] < 1)
                throw ConfigError{"batch profile cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") must be >= 1"};
    }
    if (!probes.empty()) {
        if (probes.size() != grid.size())
            throw ConfigError{"probe log shape does not match the grid"};
        for (const auto &row : probes)
            if (row.size() != cols)
                throw ConfigError{"probe log shape does not match the grid"};
    }
}

double
BatchProfile::mean() const
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto &row : grid)
        for (std::int64_t b : row) {
            sum += static_cast<double>(b);
            ++n;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

BatchProfile
BatchProfile::broadcast(std::size_t num_subbuckets) const
{
    if (num_subbuckets == 0)
        throw ConfigError{"cannot broadcast to zero sub-buckets"};
    if (this->num_subbuckets() != 1)
        throw ConfigError{"only single-column profiles can be broadcast"};
    BatchProfile out;
    for (const auto &row : grid)
        out.grid.emplace_back(num_subbuckets, row.front());
    if (!probes.empty())
        for (const auto &row : probes)
            out.probes.emplace_back(num_subbuckets, row.front());
    return out;
}

}  // namespace strata
