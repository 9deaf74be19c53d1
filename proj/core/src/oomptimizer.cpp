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

#include "strata/oomptimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <string>

#include "strata/errors.hpp"

namespace strata {

namespace {

/// Sizes reachable from `start` by doubling (capped) and halving.
class Ladder {
public:
    Ladder(std::int64_t start, std::int64_t cap) : start_{start}, cap_{cap} {}

    std::int64_t up(std::int64_t b) const
    {
        std::int64_t v = start_;
        if (b < start_) {
            while ((v >> 1) > b)
                v >>= 1;
            return v;
        }
        while (v <= b) {
            if (v > cap_ / 2)
                return cap_;
            v *= 2;
        }
        return std::min(v, cap_);
    }

    std::int64_t down(std::int64_t b) const
    {
        if (b <= start_)
            return b >> 1;
        std::int64_t v = start_;
        while (v * 2 < b)
            v *= 2;
        return v;
    }

    std::int64_t snap(std::int64_t g) const
    {
        if (g >= cap_)
            return cap_;
        std::int64_t v = start_;
        if (g >= start_) {
            while (v * 2 <= g && v * 2 < cap_)
                v *= 2;
            return v;
        }
        while (v > g && v > 1)
            v >>= 1;
        return v;
    }

private:
    std::int64_t start_;
    std::int64_t cap_;
};

std::string
cell_name(std::size_t i, std::size_t j, double in, std::int64_t out)
{
    return "cell (" + std::to_string(i) + ", " + std::to_string(j) + ") at input_length " + std::to_string(in) +
           ", output_length " + std::to_string(out);
}

}  // namespace

SyntheticMemoryModel::SyntheticMemoryModel(MemoryCoefficients coefficients, double capacity_bytes)
  : coefficients_{coefficients}, capacity_{capacity_bytes}
{
    const auto &c = coefficients_;
    for (double v : {c.c0, c.c1, c.c2, c.c3, c.c4, c.c5})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError{"memory model coefficients must be finite and non-negative"};
    if (!(capacity_ > 0.0) || !std::isfinite(capacity_))
        throw ConfigError{"memory model capacity must be positive"};
}

double
SyntheticMemoryModel::memory(std::int64_t batch_size, double input_length, std::int64_t output_length) const noexcept
{
    const auto &c = coefficients_;
    const double lin = input_length;
    const auto lout = static_cast<double>(output_length);
    const double per_example = c.c1 * lin + c.c2 * lout + c.c3 * lin * lin + c.c4 * lout * lout + c.c5 * lin * lout;
    return c.c0 + static_cast<double>(batch_size) * per_example;
}

ProbeOutcome
SyntheticMemoryModel::run(std::int64_t batch_size, double input_length, std::int64_t output_length)
{
    return memory(batch_size, input_length, output_length) > capacity_ ? ProbeOutcome::oom : ProbeOutcome::success;
}

void
SearchConfig::validate() const
{
    if (initial_batch_size < 1)
        throw ConfigError{"initial_batch_size must be >= 1"};
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw ConfigError{"tolerance must lie in (0, 1)"};
    if (max_batch_size_cap < 1 || max_batch_size_cap > (std::int64_t{1} << 40))
        throw ConfigError{"max_batch_size_cap must lie in [1, 2^40]"};
}

void
ProbeLog::record(std::int64_t batch_size, ProbeOutcome outcome)
{
    probes_.push_back({batch_size, outcome});
    if (outcome == ProbeOutcome::success) {
        if (invalid_ && batch_size >= *invalid_)
            throw ContractViolation{"step runner succeeded at batch size " + std::to_string(batch_size) +
                                    " after running out of memory at " + std::to_string(*invalid_)};
        valid_ = std::max(valid_.value_or(batch_size), batch_size);
    } else {
        if (valid_ && batch_size <= *valid_)
            throw ContractViolation{"step runner ran out of memory at batch size " + std::to_string(batch_size) +
                                    " after succeeding at " + std::to_string(*valid_)};
        invalid_ = std::min(invalid_.value_or(batch_size), batch_size);
    }
}

SearchResult
search_batch_size(StepRunner &runner, double input_length, std::int64_t output_length, const SearchConfig &config,
                  std::optional<std::int64_t> initial_guess)
{
    config.validate();
    const std::int64_t cap = config.max_batch_size_cap;
    const Ladder ladder{std::min(config.initial_batch_size, cap), cap};

    ProbeLog log;
    const auto probe = [&](std::int64_t b) {
        const ProbeOutcome outcome = runner.run(b, input_length, output_length);
        log.record(b, outcome);
        return outcome;
    };

    // Double on success, halve on OOM, until the boundary is bracketed.
    std::int64_t b = ladder.snap(std::max<std::int64_t>(initial_guess.value_or(config.initial_batch_size), 1));
    for (;;) {
        if (probe(b) == ProbeOutcome::success) {
            if (log.smallest_invalid())
                break;
            if (b == cap)
                return {b, std::nullopt, log.probes()};
            b = ladder.up(b);
        } else {
            if (log.largest_valid())
                break;
            if (b == 1)
                throw UnsatisfiableError{"even batch size 1 runs out of memory"};
            b = ladder.down(b);
        }
    }

    // Bisect between the largest valid and smallest invalid size.
    for (;;) {
        const std::int64_t valid = *log.largest_valid();
        const std::int64_t invalid = *log.smallest_invalid();
        const auto gap = static_cast<double>(invalid - valid);
        if (invalid - valid <= 1 || gap <= config.tolerance * static_cast<double>(invalid))
            return {valid, invalid, log.probes()};
        probe(valid + (invalid - valid) / 2);
    }
}

BatchProfile
build_profile(StepRunner &runner, const BucketTree &tree, const SearchConfig &config)
{
    tree.validate();
    config.validate();
    const std::size_t rows = tree.num_buckets();
    const std::size_t cols = tree.num_subbuckets();

    BatchProfile profile;
    profile.grid.assign(rows, std::vector<std::int64_t>(cols, 0));
    profile.probes.assign(rows, std::vector<std::vector<Probe>>(cols));

    const auto solve = [&](std::size_t i, std::size_t j, std::optional<std::int64_t> seed) {
        const double in = tree.input_edges[i];
        const std::int64_t out = tree.output_edges[i][j];
        try {
            SearchResult r = search_batch_size(runner, in, out, config, seed);
            profile.grid[i][j] = r.batch_size;
            profile.probes[i][j] = std::move(r.probes);
        } catch (const UnsatisfiableError &e) {
            throw UnsatisfiableError{cell_name(i, j, in, out) + ": " + e.what()};
        } catch (const ContractViolation &e) {
            throw ContractViolation{cell_name(i, j, in, out) + ": " + e.what()};
        }
    };

    // Within a row, seed each cell from its longer right-hand neighbour.
    const auto solve_row = [&](std::size_t i, std::optional<std::int64_t> seed) {
        for (std::size_t j = cols; j-- > 0;) {
            solve(i, j, seed);
            seed = profile.grid[i][j];
        }
    };

    if (runner.reentrant() && rows > 1) {
        std::vector<std::future<void>> rows_done;
        rows_done.reserve(rows);
        for (std::size_t i = rows; i-- > 0;)
            rows_done.push_back(std::async(std::launch::async, solve_row, i, std::optional<std::int64_t>{}));
        std::exception_ptr first;
        for (auto &f : rows_done) {
            try {
                f.get();
            } catch (...) {
                if (!first)
                    first = std::current_exception();
            }
        }
        if (first)
            std::rethrow_exception(first);
    } else {
        std::optional<std::int64_t> seed;
        for (std::size_t i = rows; i-- > 0;) {
            solve_row(i, seed);
            seed = profile.grid[i][cols - 1];
        }
    }
    return profile;
}

BatchProfile
baseline_heuristic_profile(const BucketTree &tree, double max_total_length, double quadratic_penalty)
{
    tree.validate();
    if (!(max_total_length > 0.0) || !std::isfinite(max_total_length))
        throw ConfigError{"max_total_length must be positive"};
    if (!(quadratic_penalty >= 0.0) || !std::isfinite(quadratic_penalty))
        throw ConfigError{"quadratic_penalty must be non-negative"};

    BatchProfile profile;
    for (std::size_t i = 0; i < tree.num_buckets(); ++i) {
        const double len = tree.input_edges[i];
        const double cost = len + quadratic_penalty * len * len;
        const double raw = cost > 0.0 ? std::floor(max_total_length / cost) : std::floor(max_total_length);
        const auto b = static_cast<std::int64_t>(std::clamp(raw, 1.0, 9.0e15));
        profile.grid.emplace_back(tree.num_subbuckets(), b);
    }
    return profile;
}

}  // namespace strata
