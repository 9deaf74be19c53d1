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

#include "strata/datastream.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "strata/errors.hpp"
#include "strata/rng.hpp"

namespace strata {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t shard_order_salt = 0x5348415244ULL;    // "SHARD"
constexpr std::uint64_t example_order_salt = 0x4558414dULL;    // "EXAM"

const json &
require_field(const json &record, const char *name, const fs::path &path, std::size_t line)
{
    auto it = record.find(name);
    if (it == record.end())
        throw ParseError{path, line, std::string{"missing field '"} + name + "'"};
    return *it;
}

ExampleMeta
parse_record(const std::string &text, const fs::path &path, std::size_t line,
             const std::string &source_id, Modality modality)
{
    json record;
    try {
        record = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError{path, line, std::string{"malformed record: "} + e.what()};
    }
    if (!record.is_object())
        throw ParseError{path, line, "record is not a JSON object"};

    ExampleMeta ex;
    ex.source_id = source_id;

    const json &id = require_field(record, "id", path, line);
    const json &mod = require_field(record, "modality", path, line);
    const json &in = require_field(record, "input_length", path, line);
    const json &out = require_field(record, "output_length", path, line);

    if (!id.is_string())
        throw ParseError{path, line, "field 'id' must be a string"};
    ex.id = id.get<std::string>();

    if (!mod.is_string())
        throw ParseError{path, line, "field 'modality' must be a string"};
    try {
        ex.modality = parse_modality(mod.get<std::string>());
    } catch (const ConfigError &e) {
        throw ParseError{path, line, e.what()};
    }
    if (ex.modality != modality)
        throw ParseError{path, line,
                         "record modality '" + mod.get<std::string>() + "' does not match dataset modality '" +
                             std::string{to_string(modality)} + "'"};

    if (!in.is_number())
        throw ParseError{path, line, "field 'input_length' must be a number"};
    ex.input_length = in.get<double>();
    if (!std::isfinite(ex.input_length) || ex.input_length < 0.0)
        throw ParseError{path, line, "field 'input_length' must be finite and >= 0"};

    if (!out.is_number_integer())
        throw ParseError{path, line, "field 'output_length' must be an integer"};
    ex.output_length = out.get<std::int64_t>();
    if (ex.output_length < 0)
        throw ParseError{path, line, "field 'output_length' must be >= 0"};

    return ex;
}

std::vector<fs::path>
expand_glob(const fs::path &pattern)
{
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<fs::path> out;
    if (rc == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i)
            out.emplace_back(g.gl_pathv[i]);
    }
    ::globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH)
        throw IoError{pattern, "glob expansion failed"};
    return out;
}

std::size_t
line_of_offset(const std::string &text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

void
StreamSpec::validate() const
{
    if (source_id.empty())
        throw ConfigError{"stream has an empty source_id"};
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw ConfigError{"stream '" + source_id + "' must have a positive weight"};
    if (shard_paths.empty())
        throw ConfigError{"stream '" + source_id + "' has no shards"};
}

Shard
load_shard(const fs::path &path, const std::string &source_id, Modality modality)
{
    std::ifstream in{path};
    if (!in)
        throw IoError{path, "cannot open shard"};

    Shard shard{path, {}};
    std::unordered_set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        ExampleMeta ex = parse_record(text, path, line, source_id, modality);
        if (!seen.insert(ex.id).second)
            throw ParseError{path, line, "duplicate id '" + ex.id + "' within shard"};
        shard.examples.push_back(std::move(ex));
    }
    if (in.bad())
        throw IoError{path, "read error"};
    if (shard.examples.empty())
        throw ParseError{path, 0, "shard holds no examples"};
    return shard;
}

std::vector<StreamSpec>
load_manifest(const fs::path &path)
{
    std::ifstream in{path};
    if (!in)
        throw IoError{path, "cannot open manifest"};
    const std::string text{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError{path, line_of_offset(text, e.byte), std::string{"malformed manifest: "} + e.what()};
    }
    if (!doc.is_object() || !doc.contains("datasets") || !doc["datasets"].is_array())
        throw ParseError{path, 0, "manifest must be an object with a 'datasets' array"};
    if (doc.contains("version") && doc["version"] != 1)
        throw ParseError{path, 0, "unsupported manifest version " + doc["version"].dump()};

    static const std::set<std::string> known = {"source_id", "modality", "shards", "weight", "seed"};
    const fs::path base = path.parent_path();

    std::vector<StreamSpec> specs;
    std::set<std::string> ids;
    for (const json &entry : doc["datasets"]) {
        if (!entry.is_object())
            throw ParseError{path, 0, "dataset entry is not an object"};
        for (const auto &[key, _] : entry.items())
            if (!known.contains(key))
                throw ParseError{path, 0, "unknown dataset field '" + key + "'"};

        StreamSpec spec;
        const json &sid = require_field(entry, "source_id", path, 0);
        if (!sid.is_string() || sid.get<std::string>().empty())
            throw ParseError{path, 0, "field 'source_id' must be a non-empty string"};
        spec.source_id = sid.get<std::string>();
        if (!ids.insert(spec.source_id).second)
            throw ConfigError{"duplicate source_id '" + spec.source_id + "' in " + path.string()};

        const json &mod = require_field(entry, "modality", path, 0);
        if (!mod.is_string())
            throw ParseError{path, 0, "field 'modality' must be a string"};
        spec.modality = parse_modality(mod.get<std::string>());

        const json &shards = require_field(entry, "shards", path, 0);
        if (!shards.is_array())
            throw ParseError{path, 0, "field 'shards' must be an array of path globs"};
        std::set<fs::path> unique;
        for (const json &pattern : shards) {
            if (!pattern.is_string())
                throw ParseError{path, 0, "shard glob must be a string"};
            fs::path p{pattern.get<std::string>()};
            if (p.is_relative())
                p = base / p;
            auto matches = expand_glob(p);
            if (matches.empty())
                throw ConfigError{"dataset '" + spec.source_id + "': shard pattern '" + p.string() +
                                  "' matches no files"};
            for (auto &m : matches)
                if (unique.insert(m).second)
                    spec.shard_paths.push_back(std::move(m));
        }
        if (spec.shard_paths.empty())
            throw ConfigError{"dataset '" + spec.source_id + "' is empty"};

        if (auto it = entry.find("seed"); it != entry.end()) {
            if (!it->is_number_integer())
                throw ParseError{path, 0, "field 'seed' must be an integer"};
            spec.seed = it->get<std::uint64_t>();
        } else {
            spec.seed = hash_name(spec.source_id);
        }

        if (auto it = entry.find("weight"); it != entry.end()) {
            if (!it->is_number())
                throw ParseError{path, 0, "field 'weight' must be a number"};
            spec.weight = it->get<double>();
        } else {
            const DatasetCounts counts = count_dataset(spec);
            spec.weight = static_cast<double>(counts.num_examples);
        }
        spec.validate();
        specs.push_back(std::move(spec));
    }
    if (specs.empty())
        throw ConfigError{"manifest " + path.string() + " declares no datasets"};
    return specs;
}

DatasetCounts
count_dataset(const StreamSpec &spec)
{
    if (spec.shard_paths.empty())
        throw ConfigError{"stream '" + spec.source_id + "' has no shards"};
    DatasetCounts counts;
    for (const fs::path &p : spec.shard_paths) {
        const Shard shard = load_shard(p, spec.source_id, spec.modality);
        counts.num_examples += shard.examples.size();
        for (const ExampleMeta &ex : shard.examples) {
            counts.total_input_mass += ex.input_length;
            counts.total_output_mass += static_cast<double>(ex.output_length);
        }
    }
    if (counts.num_examples == 0)
        throw ConfigError{"dataset '" + spec.source_id + "' is empty"};
    return counts;
}

std::vector<std::size_t>
shard_order(const StreamSpec &spec, std::uint64_t pass)
{
    std::vector<std::size_t> order(spec.shard_paths.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng{derive_seed(spec.seed, {shard_order_salt, pass})};
    rng.shuffle(std::span{order});
    return order;
}

std::vector<std::size_t>
example_order(const StreamSpec &spec, std::uint64_t pass, std::size_t shard_index, std::size_t num_examples)
{
    std::vector<std::size_t> order(num_examples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng{derive_seed(spec.seed, {example_order_salt, pass, shard_index})};
    rng.shuffle(std::span{order});
    return order;
}

ShardStream::ShardStream(StreamSpec spec) : spec_{std::move(spec)}
{
    spec_.validate();
    order_ = shard_order(spec_, pass_);
}

void
ShardStream::open_next_shard()
{
    if (order_pos_ == order_.size()) {
        ++pass_;
        order_ = shard_order(spec_, pass_);
        order_pos_ = 0;
    }
    const std::size_t shard_index = order_[order_pos_++];
    current_ = load_shard(spec_.shard_paths[shard_index], spec_.source_id, spec_.modality);
    current_order_ = example_order(spec_, pass_, shard_index, current_.examples.size());
    example_pos_ = 0;
}

ExampleMeta
ShardStream::next()
{
    if (example_pos_ == current_order_.size())
        open_next_shard();
    return current_.examples[current_order_[example_pos_++]];
}

std::unique_ptr<ExampleSource>
open_stream(StreamSpec spec)
{
    return std::make_unique<ShardStream>(std::move(spec));
}

}  // namespace strata
