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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "strata/combiner.hpp"
#include "strata/example.hpp"
#include "strata/profile.hpp"

namespace strata {

using Distribution = std::map<std::string, double>;

/// Half the L1 distance between two distributions after normalizing each to
/// sum 1. Keys missing from one side count as zero mass there.
double tv_distance(const Distribution &p, const Distribution &q);

struct SourceInfo {
    Modality modality = Modality::audio;
    double weight = 1.0;
};

struct SimulateOptions {
    std::size_t steps = 1;
    /// Steps per disjoint window of the stationarity series.
    std::size_t window = 1000;
    /// Configured blend; mixtures are compared within each modality.
    std::map<std::string, SourceInfo> sources;
};

template <typename T>
using Matrix = std::vector<std::vector<T>>;

struct SimulationReport {
    std::size_t steps_simulated = 0;
    std::size_t batches = 0;
    std::size_t examples = 0;
    std::map<std::string, std::size_t> steps_per_lane;
    std::map<std::string, std::size_t> batches_per_modality;
    std::map<std::string, double> mean_batch_size_per_modality;
    double mean_input_padding = 0.0;
    double mean_output_padding = 0.0;
    /// (first step of the window, TV distance). Only complete windows.
    std::vector<std::pair<std::size_t, double>> mixture_tv_distance_series;
    /// Per modality, TV distance of each bucket's source mix to the
    /// configured weights; 0 for buckets that saw no examples.
    std::map<std::string, Matrix<double>> per_bucket_source_skew;
    std::map<std::string, Matrix<std::size_t>> per_bucket_examples;

    double max_window_tv() const noexcept;
};

/// Consumes exactly `options.steps` steps from the pipeline and aggregates
/// padding, batch sizes and source-mix diagnostics. Errors raised by the
/// pipeline are rethrown as Error with the failing step index.
SimulationReport simulate(StepSource &pipeline, const SimulateOptions &options);

std::string format_report_table(const SimulationReport &report);

struct ProfileComparison {
    Matrix<double> ratios;
    /// (threshold, fraction of cells with ratio >= threshold).
    std::vector<std::pair<double, double>> bands;

    double fraction_at_least(double threshold) const;
};

/// Cell-wise b / a. Throws ConfigError on shape mismatch.
ProfileComparison compare_profiles(const BatchProfile &a, const BatchProfile &b,
                                   std::vector<double> thresholds = {1.0, 1.5, 2.0, 4.0});

}  // namespace strata
