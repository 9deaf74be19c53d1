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

#include "strata/serialization.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "strata/errors.hpp"

namespace strata {

using nlohmann::json;

namespace {

std::string
dump(const json &doc)
{
    return doc.dump(2) + "\n";
}

json
parse(std::string_view text, const char *format)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError{{}, 0, std::string{"malformed "} + format + " document: " + e.what()};
    }
    if (!doc.is_object())
        throw ParseError{{}, 0, std::string{format} + " document must be a JSON object"};
    if (doc.value("format", std::string{}) != format)
        throw ParseError{{}, 0, std::string{"expected a document with \"format\": \""} + format + "\""};
    if (doc.value("version", 0) != format_version)
        throw ParseError{{}, 0, std::string{"unsupported "} + format + " version"};
    return doc;
}

json
header(const char *format)
{
    json doc;
    doc["format"] = format;
    doc["version"] = format_version;
    return doc;
}

template <typename T>
T
get(const json &doc, const char *key, const char *format)
{
    auto it = doc.find(key);
    if (it == doc.end())
        throw ParseError{{}, 0, std::string{format} + " document is missing '" + key + "'"};
    try {
        return it->get<T>();
    } catch (const json::exception &e) {
        throw ParseError{{}, 0, std::string{format} + " field '" + key + "' has the wrong type: " + e.what()};
    }
}

const char *
outcome_name(ProbeOutcome o)
{
    return o == ProbeOutcome::success ? "success" : "oom";
}

json
source_to_json(const SyntheticSource &s)
{
    json j;
    j["source_id"] = s.source_id;
    j["modality"] = to_string(s.modality);
    j["num_examples"] = s.num_examples;
    j["num_shards"] = s.num_shards;
    j["input"] = {{"median", s.input.median}, {"sigma", s.input.sigma}, {"min", s.input.min}, {"max", s.input.max}};
    j["integer_input"] = s.integer_input;
    j["output_per_input"] = s.output_per_input;
    j["output_noise"] = s.output_noise;
    j["outlier_rate"] = s.outlier_rate;
    j["outlier_scale"] = s.outlier_scale;
    if (s.weight)
        j["weight"] = *s.weight;
    return j;
}

}  // namespace

std::string
to_json(const BucketTree &tree)
{
    json doc = header("strata.bucket_tree");
    doc["num_buckets"] = tree.num_buckets();
    doc["num_subbuckets"] = tree.num_subbuckets();
    doc["degenerate"] = tree.degenerate;
    doc["input_edges"] = tree.input_edges;
    doc["output_edges"] = tree.output_edges;
    return dump(doc);
}

BucketTree
bucket_tree_from_json(std::string_view text)
{
    constexpr const char *format = "strata.bucket_tree";
    const json doc = parse(text, format);
    BucketTree tree;
    tree.input_edges = get<std::vector<double>>(doc, "input_edges", format);
    tree.output_edges = get<std::vector<std::vector<std::int64_t>>>(doc, "output_edges", format);
    tree.degenerate = doc.value("degenerate", false);
    tree.validate();
    return tree;
}

std::string
to_json(const BatchProfile &profile)
{
    json doc = header("strata.batch_profile");
    doc["num_buckets"] = profile.num_buckets();
    doc["num_subbuckets"] = profile.num_subbuckets();
    doc["grid"] = profile.grid;
    json probes = json::array();
    for (const auto &row : profile.probes) {
        json r = json::array();
        for (const auto &cell : row) {
            json c = json::array();
            for (const Probe &p : cell)
                c.push_back(json::array({p.batch_size, outcome_name(p.outcome)}));
            r.push_back(std::move(c));
        }
        probes.push_back(std::move(r));
    }
    doc["probes"] = std::move(probes);
    return dump(doc);
}

BatchProfile
batch_profile_from_json(std::string_view text)
{
    constexpr const char *format = "strata.batch_profile";
    const json doc = parse(text, format);
    BatchProfile profile;
    profile.grid = get<std::vector<std::vector<std::int64_t>>>(doc, "grid", format);
    if (auto it = doc.find("probes"); it != doc.end()) {
        try {
            for (const json &row : *it) {
                auto &r = profile.probes.emplace_back();
                for (const json &cell : row) {
                    auto &c = r.emplace_back();
                    for (const json &p : cell) {
                        const auto outcome = p.at(1).get<std::string>();
                        if (outcome != "success" && outcome != "oom")
                            throw ParseError{{}, 0, "unknown probe outcome '" + outcome + "'"};
                        c.push_back({p.at(0).get<std::int64_t>(),
                                     outcome == "success" ? ProbeOutcome::success : ProbeOutcome::oom});
                    }
                }
            }
        } catch (const json::exception &e) {
            throw ParseError{{}, 0, std::string{"malformed probe log: "} + e.what()};
        }
        bool any = false;
        for (const auto &row : profile.probes)
            for (const auto &cell : row)
                any = any || !cell.empty();
        if (!any)
            profile.probes.clear();
    }
    profile.validate();
    return profile;
}

std::string
to_json(const SyntheticMemoryModel &model)
{
    json doc = header("strata.memory_model");
    const MemoryCoefficients &c = model.coefficients();
    doc["coefficients"] = {{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}, {"c5", c.c5}};
    doc["capacity_bytes"] = model.capacity_bytes();
    return dump(doc);
}

SyntheticMemoryModel
memory_model_from_json(std::string_view text)
{
    constexpr const char *format = "strata.memory_model";
    const json doc = parse(text, format);
    const json coeffs = get<json>(doc, "coefficients", format);
    if (!coeffs.is_object())
        throw ParseError{{}, 0, "memory model 'coefficients' must be an object"};
    for (const auto &[key, _] : coeffs.items())
        if (key.size() != 2 || key[0] != 'c' || key[1] < '0' || key[1] > '5')
            throw ParseError{{}, 0, "unknown memory model coefficient '" + key + "'"};
    MemoryCoefficients c;
    c.c0 = coeffs.value("c0", 0.0);
    c.c1 = coeffs.value("c1", 0.0);
    c.c2 = coeffs.value("c2", 0.0);
    c.c3 = coeffs.value("c3", 0.0);
    c.c4 = coeffs.value("c4", 0.0);
    c.c5 = coeffs.value("c5", 0.0);
    return SyntheticMemoryModel{c, get<double>(doc, "capacity_bytes", format)};
}

std::string
to_json(const SimulationReport &report)
{
    json doc = header("strata.report");
    doc["steps_simulated"] = report.steps_simulated;
    doc["batches"] = report.batches;
    doc["examples"] = report.examples;
    doc["steps_per_lane"] = report.steps_per_lane;
    doc["batches_per_modality"] = report.batches_per_modality;
    doc["mean_batch_size_per_modality"] = report.mean_batch_size_per_modality;
    doc["mean_input_padding"] = report.mean_input_padding;
    doc["mean_output_padding"] = report.mean_output_padding;
    json series = json::array();
    for (const auto &[start, tv] : report.mixture_tv_distance_series)
        series.push_back({{"window_start_step", start}, {"tv_distance", tv}});
    doc["mixture_tv_distance_series"] = std::move(series);
    doc["per_bucket_source_skew"] = report.per_bucket_source_skew;
    doc["per_bucket_examples"] = report.per_bucket_examples;
    return dump(doc);
}

std::string
to_json(const ProfileComparison &comparison)
{
    json doc = header("strata.profile_comparison");
    doc["ratios"] = comparison.ratios;
    json bands = json::array();
    for (const auto &[threshold, fraction] : comparison.bands)
        bands.push_back({{"at_least", threshold}, {"fraction", fraction}});
    doc["bands"] = std::move(bands);
    return dump(doc);
}

std::string
to_json(const CorpusConfig &config)
{
    json doc = header("strata.corpus_config");
    doc["seed"] = config.seed;
    doc["sources"] = json::array();
    for (const SyntheticSource &s : config.sources)
        doc["sources"].push_back(source_to_json(s));
    return dump(doc);
}

CorpusConfig
corpus_config_from_json(std::string_view text)
{
    constexpr const char *format = "strata.corpus_config";
    const json doc = parse(text, format);
    CorpusConfig config;
    config.seed = get<std::uint64_t>(doc, "seed", format);
    try {
        for (const json &j : doc.at("sources")) {
            SyntheticSource s;
            s.source_id = j.at("source_id").get<std::string>();
            s.modality = parse_modality(j.at("modality").get<std::string>());
            s.num_examples = j.at("num_examples").get<std::size_t>();
            s.num_shards = j.value("num_shards", std::size_t{1});
            const json &in = j.at("input");
            s.input.median = in.at("median").get<double>();
            s.input.sigma = in.at("sigma").get<double>();
            s.input.min = in.value("min", 0.0);
            s.input.max = in.value("max", 1e9);
            s.integer_input = j.value("integer_input", s.modality == Modality::text);
            s.output_per_input = j.value("output_per_input", 1.0);
            s.output_noise = j.value("output_noise", 0.0);
            s.outlier_rate = j.value("outlier_rate", 0.0);
            s.outlier_scale = j.value("outlier_scale", 1.0);
            if (j.contains("weight"))
                s.weight = j.at("weight").get<double>();
            config.sources.push_back(std::move(s));
        }
    } catch (const json::exception &e) {
        throw ParseError{{}, 0, std::string{"malformed corpus config: "} + e.what()};
    }
    config.validate();
    return config;
}

std::string
read_text_file(const std::filesystem::path &path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw IoError{path, "cannot open file"};
    std::string text{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
    if (in.bad())
        throw IoError{path, "read error"};
    return text;
}

void
write_text_file(const std::filesystem::path &path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw IoError{path, "cannot open file for writing"};
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw IoError{path, "write failed"};
}

}  // namespace strata
