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

#include "strata/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "strata/errors.hpp"
#include "strata/rng.hpp"

namespace strata {

namespace fs = std::filesystem;
using nlohmann::json;

void
CorpusConfig::validate() const
{
    if (sources.empty())
        throw ConfigError{"corpus config declares no sources"};
    std::set<std::string> ids;
    for (const SyntheticSource &s : sources) {
        const std::string where = "source '" + s.source_id + "': ";
        if (s.source_id.empty() || s.source_id.find_first_of("/\\*?[") != std::string::npos)
            throw ConfigError{"invalid source_id '" + s.source_id + "'"};
        if (!ids.insert(s.source_id).second)
            throw ConfigError{"duplicate source_id '" + s.source_id + "'"};
        if (s.num_examples == 0)
            throw ConfigError{where + "num_examples must be >= 1"};
        if (s.num_shards == 0 || s.num_shards > s.num_examples)
            throw ConfigError{where + "num_shards must lie in [1, num_examples]"};
        const LengthDistribution &d = s.input;
        if (!(d.median > 0.0) || !std::isfinite(d.median))
            throw ConfigError{where + "input median must be positive"};
        if (!(d.sigma >= 0.0) || !std::isfinite(d.sigma))
            throw ConfigError{where + "input sigma must be non-negative"};
        if (!(d.min >= 0.0) || !(d.max >= d.min) || !std::isfinite(d.max))
            throw ConfigError{where + "input clip range must satisfy 0 <= min <= max"};
        if (!(s.output_per_input >= 0.0) || !(s.output_noise >= 0.0))
            throw ConfigError{where + "output_per_input and output_noise must be non-negative"};
        if (!(s.outlier_rate >= 0.0 && s.outlier_rate <= 1.0))
            throw ConfigError{where + "outlier_rate must lie in [0, 1]"};
        if (!(s.outlier_scale >= 1.0) || !std::isfinite(s.outlier_scale))
            throw ConfigError{where + "outlier_scale must be >= 1"};
        if (s.weight && !(*s.weight > 0.0))
            throw ConfigError{where + "weight must be positive"};
    }
}

CorpusConfig
default_corpus_config()
{
    CorpusConfig c;
    c.seed = 20240917;

    SyntheticSource asr_a;
    asr_a.source_id = "asr_a";
    asr_a.modality = Modality::audio;
    asr_a.num_examples = 12000;
    asr_a.num_shards = 6;
    asr_a.input = {6.0, 0.6, 0.5, 40.0};
    asr_a.output_per_input = 2.5;
    asr_a.output_noise = 40.0;
    asr_a.outlier_rate = 0.02;
    asr_a.outlier_scale = 3.0;

    SyntheticSource asr_b = asr_a;
    asr_b.source_id = "asr_b";
    asr_b.num_examples = 6000;
    asr_b.num_shards = 3;
    asr_b.input = {10.0, 0.5, 0.5, 40.0};
    asr_b.output_per_input = 3.0;

    SyntheticSource mt_a;
    mt_a.source_id = "mt_a";
    mt_a.modality = Modality::text;
    mt_a.num_examples = 15000;
    mt_a.num_shards = 5;
    mt_a.input = {30.0, 0.7, 2.0, 400.0};
    mt_a.integer_input = true;
    mt_a.output_per_input = 1.0;
    mt_a.output_noise = 30.0;
    mt_a.outlier_rate = 0.02;
    mt_a.outlier_scale = 3.0;

    SyntheticSource mt_b = mt_a;
    mt_b.source_id = "mt_b";
    mt_b.num_examples = 8000;
    mt_b.num_shards = 4;
    mt_b.input = {50.0, 0.6, 2.0, 400.0};
    mt_b.output_per_input = 1.1;

    c.sources = {asr_a, asr_b, mt_a, mt_b};
    return c;
}

std::vector<ExampleMeta>
generate_examples(const SyntheticSource &source, std::uint64_t seed)
{
    Rng rng{derive_seed(seed, {hash_name(source.source_id)})};
    const double log_median = std::log(source.input.median);

    std::vector<ExampleMeta> out;
    out.reserve(source.num_examples);
    for (std::size_t k = 0; k < source.num_examples; ++k) {
        double input = std::exp(log_median + source.input.sigma * rng.normal());
        input = std::clamp(input, source.input.min, source.input.max);
        input = source.integer_input ? std::round(input) : std::round(input * 1000.0) / 1000.0;

        const double noise = rng.uniform01() * source.output_noise;
        double output = std::round(source.output_per_input * input + noise);
        if (rng.uniform01() < source.outlier_rate)
            output = std::round(output * source.outlier_scale);

        char id[32];
        std::snprintf(id, sizeof id, "-%07zu", k);
        ExampleMeta ex;
        ex.id = source.source_id + id;
        ex.source_id = source.source_id;
        ex.modality = source.modality;
        ex.input_length = input;
        ex.output_length = static_cast<std::int64_t>(output);
        out.push_back(std::move(ex));
    }
    return out;
}

fs::path
write_corpus(const CorpusConfig &config, const fs::path &out_dir)
{
    config.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError{out_dir, "cannot create directory: " + ec.message()};

    json manifest;
    manifest["version"] = 1;
    manifest["datasets"] = json::array();
    for (std::size_t s = 0; s < config.sources.size(); ++s) {
        const SyntheticSource &src = config.sources[s];
        const fs::path dir = out_dir / src.source_id;
        fs::create_directories(dir, ec);
        if (ec)
            throw IoError{dir, "cannot create directory: " + ec.message()};

        const std::vector<ExampleMeta> examples = generate_examples(src, config.seed);
        for (std::size_t k = 0; k < src.num_shards; ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "shard_%04zu.jsonl", k);
            const fs::path path = dir / name;
            std::ofstream out{path, std::ios::binary | std::ios::trunc};
            if (!out)
                throw IoError{path, "cannot write shard"};
            const std::size_t begin = k * examples.size() / src.num_shards;
            const std::size_t end = (k + 1) * examples.size() / src.num_shards;
            for (std::size_t e = begin; e < end; ++e) {
                const ExampleMeta &ex = examples[e];
                json rec;
                rec["id"] = ex.id;
                rec["modality"] = to_string(ex.modality);
                rec["input_length"] = ex.input_length;
                rec["output_length"] = ex.output_length;
                out << rec.dump() << '\n';
            }
            if (!out)
                throw IoError{path, "write failed"};
        }

        json entry;
        entry["source_id"] = src.source_id;
        entry["modality"] = to_string(src.modality);
        entry["shards"] = json::array({src.source_id + "/shard_*.jsonl"});
        entry["seed"] = derive_seed(config.seed, {s});
        if (src.weight)
            entry["weight"] = *src.weight;
        manifest["datasets"].push_back(std::move(entry));
    }

    const fs::path manifest_path = out_dir / "manifest.json";
    std::ofstream out{manifest_path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw IoError{manifest_path, "cannot write manifest"};
    out << manifest.dump(2) << '\n';
    if (!out)
        throw IoError{manifest_path, "write failed"};
    return manifest_path;
}

}  // namespace strata
