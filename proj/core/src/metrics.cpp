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

#include "strata/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "strata/errors.hpp"

namespace strata {

namespace {

using Counts = std::map<std::string, std::size_t>;

Distribution
to_distribution(const Counts &counts)
{
    Distribution d;
    for (const auto &[k, c] : counts)
        d.emplace(k, static_cast<double>(c));
    return d;
}

std::string
fmt(const char *format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

template <typename T>
void
grow(Matrix<T> &m, std::size_t rows, std::size_t cols)
{
    if (m.size() < rows)
        m.resize(rows);
    std::size_t width = cols;
    for (const auto &row : m)
        width = std::max(width, row.size());
    for (auto &row : m)
        row.resize(width, T{});
}

}  // namespace

double
tv_distance(const Distribution &p, const Distribution &q)
{
    double sp = 0.0;
    double sq = 0.0;
    for (const auto &[_, v] : p)
        sp += v;
    for (const auto &[_, v] : q)
        sq += v;
    if (sp <= 0.0 && sq <= 0.0)
        return 0.0;
    if (sp <= 0.0 || sq <= 0.0)
        return 1.0;

    std::set<std::string> keys;
    for (const auto &[k, _] : p)
        keys.insert(k);
    for (const auto &[k, _] : q)
        keys.insert(k);
    double l1 = 0.0;
    for (const std::string &k : keys) {
        const auto ip = p.find(k);
        const auto iq = q.find(k);
        const double a = ip == p.end() ? 0.0 : ip->second / sp;
        const double b = iq == q.end() ? 0.0 : iq->second / sq;
        l1 += std::abs(a - b);
    }
    return std::clamp(0.5 * l1, 0.0, 1.0);
}

double
SimulationReport::max_window_tv() const noexcept
{
    double m = 0.0;
    for (const auto &[_, tv] : mixture_tv_distance_series)
        m = std::max(m, tv);
    return m;
}

SimulationReport
simulate(StepSource &pipeline, const SimulateOptions &options)
{
    if (options.steps < 1)
        throw ConfigError{"simulate needs steps >= 1"};
    if (options.window < 1)
        throw ConfigError{"simulate needs window >= 1"};

    std::map<std::string, Distribution> expected;
    for (const auto &[id, info] : options.sources)
        expected[std::string{to_string(info.modality)}][id] = info.weight;

    SimulationReport report;
    std::map<std::string, std::size_t> examples_per_modality;
    std::map<std::string, Matrix<Counts>> bucket_sources;
    std::map<std::string, Counts> window_sources;
    double in_pad = 0.0;
    double out_pad = 0.0;
    std::size_t window_start = 0;

    for (std::size_t s = 0; s < options.steps; ++s) {
        ModalityStep step;
        try {
            step = pipeline.next();
        } catch (const std::exception &e) {
            throw Error{"pipeline failed at step " + std::to_string(s) + ": " + e.what()};
        }

        if (const auto *single = std::get_if<SingleStep>(&step))
            ++report.steps_per_lane[single->lane];
        else
            for (const std::string &lane : std::get<ZippedStep>(step).lanes)
                ++report.steps_per_lane[lane];

        for (const MiniBatch &batch : batches_of(step)) {
            const std::string modality{to_string(batch.modality)};
            const PaddingStats pad = padding_stats(batch);
            in_pad += pad.input_padding_ratio;
            out_pad += pad.output_padding_ratio;
            ++report.batches;
            ++report.batches_per_modality[modality];
            examples_per_modality[modality] += batch.size();
            report.examples += batch.size();

            auto &cells = bucket_sources[modality];
            grow(cells, batch.bucket.input + 1, batch.bucket.output + 1);
            for (const ExampleMeta &ex : batch.examples) {
                ++cells[batch.bucket.input][batch.bucket.output][ex.source_id];
                ++window_sources[std::string{to_string(ex.modality)}][ex.source_id];
            }
        }

        if ((s + 1) % options.window == 0) {
            double tv = 0.0;
            for (const auto &[modality, counts] : window_sources)
                if (auto it = expected.find(modality); it != expected.end())
                    tv = std::max(tv, tv_distance(to_distribution(counts), it->second));
            report.mixture_tv_distance_series.emplace_back(window_start, tv);
            window_sources.clear();
            window_start = s + 1;
        }
    }
    report.steps_simulated = options.steps;

    for (const auto &[modality, n] : report.batches_per_modality)
        report.mean_batch_size_per_modality[modality] =
            static_cast<double>(examples_per_modality[modality]) / static_cast<double>(n);
    if (report.batches > 0) {
        report.mean_input_padding = in_pad / static_cast<double>(report.batches);
        report.mean_output_padding = out_pad / static_cast<double>(report.batches);
    }

    for (const auto &[modality, cells] : bucket_sources) {
        auto &skew = report.per_bucket_source_skew[modality];
        auto &sizes = report.per_bucket_examples[modality];
        const auto it = expected.find(modality);
        for (const auto &row : cells) {
            auto &skew_row = skew.emplace_back();
            auto &size_row = sizes.emplace_back();
            for (const Counts &c : row) {
                std::size_t n = 0;
                for (const auto &[_, k] : c)
                    n += k;
                size_row.push_back(n);
                skew_row.push_back(n == 0 || it == expected.end() ? 0.0 : tv_distance(to_distribution(c), it->second));
            }
        }
    }
    return report;
}

std::string
format_report_table(const SimulationReport &report)
{
    std::string out;
    out += "steps simulated      " + std::to_string(report.steps_simulated) + "\n";
    out += "batches              " + std::to_string(report.batches) + "\n";
    out += "examples             " + std::to_string(report.examples) + "\n";
    out += "mean input padding   " + fmt("%.4f", report.mean_input_padding) + "\n";
    out += "mean output padding  " + fmt("%.4f", report.mean_output_padding) + "\n";
    out += "max window TV        " + fmt("%.4f", report.max_window_tv()) + "\n";
    out += "\nmodality   steps    batches  mean batch size\n";
    for (const auto &[modality, mean] : report.mean_batch_size_per_modality) {
        const auto steps = report.steps_per_lane.count(modality) ? report.steps_per_lane.at(modality) : 0;
        char line[128];
        std::snprintf(line, sizeof line, "%-10s %-8zu %-8zu %.2f\n", modality.c_str(), steps,
                      report.batches_per_modality.at(modality), mean);
        out += line;
    }
    for (const auto &[modality, skew] : report.per_bucket_source_skew) {
        out += "\nper-bucket source skew (" + modality + ")\n";
        for (const auto &row : skew) {
            for (std::size_t j = 0; j < row.size(); ++j)
                out += (j ? " " : "") + fmt("%.3f", row[j]);
            out += "\n";
        }
    }
    return out;
}

double
ProfileComparison::fraction_at_least(double threshold) const
{
    std::size_t hit = 0;
    std::size_t n = 0;
    for (const auto &row : ratios)
        for (double r : row) {
            ++n;
            hit += r >= threshold ? 1 : 0;
        }
    return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
}

ProfileComparison
compare_profiles(const BatchProfile &a, const BatchProfile &b, std::vector<double> thresholds)
{
    a.validate();
    b.validate();
    if (a.num_buckets() != b.num_buckets() || a.num_subbuckets() != b.num_subbuckets())
        throw ConfigError{"cannot compare a " + std::to_string(a.num_buckets()) + "x" +
                          std::to_string(a.num_subbuckets()) + " profile with a " + std::to_string(b.num_buckets()) +
                          "x" + std::to_string(b.num_subbuckets()) + " profile"};
    ProfileComparison cmp;
    for (std::size_t i = 0; i < a.num_buckets(); ++i) {
        auto &row = cmp.ratios.emplace_back();
        for (std::size_t j = 0; j < a.num_subbuckets(); ++j)
            row.push_back(static_cast<double>(b.grid[i][j]) / static_cast<double>(a.grid[i][j]));
    }
    for (double t : thresholds)
        cmp.bands.emplace_back(t, cmp.fraction_at_least(t));
    return cmp;
}

}  // namespace strata
