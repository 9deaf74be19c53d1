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

#include "commands.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strata/bucketing.hpp"
#include "strata/combiner.hpp"
#include "strata/datastream.hpp"
#include "strata/errors.hpp"
#include "strata/metrics.hpp"
#include "strata/mux.hpp"
#include "strata/oomptimizer.hpp"
#include "strata/rng.hpp"
#include "strata/serialization.hpp"
#include "strata/synthetic.hpp"

namespace strata::cli {

namespace fs = std::filesystem;

namespace {

struct GenArgs {
    std::string out_dir;
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

struct EstimateArgs {
    std::string manifest;
    std::string out;
    std::string modality;
    BucketConfig bucket;
    std::string mass = "input";
    std::uint64_t seed = 0;
};

struct OomArgs {
    std::string buckets;
    std::string model;
    std::string out;
    SearchConfig search;
    std::optional<double> baseline_max_total;
    double baseline_penalty = 0.0;
};

struct SimArgs {
    std::string manifest;
    std::vector<std::string> buckets;
    std::vector<std::string> profiles;
    std::vector<std::string> probs;
    std::string strategy = "round_robin";
    std::size_t steps = 10000;
    std::size_t window = 1000;
    std::uint64_t seed = 0;
    std::string out;
};

struct CompareArgs {
    std::string baseline;
    std::string candidate;
    std::string out;
};

/// Parses repeated "key=value" options.
std::map<std::string, std::string>
key_values(const std::vector<std::string> &items, const char *option)
{
    std::map<std::string, std::string> out;
    for (const std::string &item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw ConfigError{std::string{option} + " expects LANE=VALUE, got '" + item + "'"};
        if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
            throw ConfigError{std::string{option} + " given twice for lane '" + item.substr(0, eq) + "'"};
    }
    return out;
}

std::vector<StreamSpec>
specs_for(const std::vector<StreamSpec> &all, Modality modality)
{
    std::vector<StreamSpec> out;
    for (const StreamSpec &s : all)
        if (s.modality == modality)
            out.push_back(s);
    if (out.empty())
        throw ConfigError{"manifest has no " + std::string{to_string(modality)} + " datasets"};
    return out;
}

int
gen_synthetic(const GenArgs &args, std::ostream &out)
{
    CorpusConfig config = args.config_path.empty() ? default_corpus_config()
                                                   : corpus_config_from_json(read_text_file(args.config_path));
    if (args.seed)
        config.seed = *args.seed;
    const fs::path manifest = write_corpus(config, args.out_dir);
    out << "wrote " << manifest.string() << "\n";
    return exit_ok;
}

int
estimate_buckets(EstimateArgs args, std::ostream &out, std::ostream &err)
{
    if (args.mass == "input")
        args.bucket.mass_measure = MassMeasure::input_mass;
    else if (args.mass == "count")
        args.bucket.mass_measure = MassMeasure::example_count;
    else
        throw ConfigError{"--mass must be 'input' or 'count'"};
    args.bucket.validate();

    const std::vector<StreamSpec> all = load_manifest(args.manifest);
    std::set<Modality> present;
    for (const StreamSpec &s : all)
        present.insert(s.modality);
    Modality modality = all.front().modality;
    if (!args.modality.empty())
        modality = parse_modality(args.modality);
    else if (present.size() > 1)
        throw ConfigError{"manifest mixes modalities; pass --modality audio|text"};
    const std::vector<StreamSpec> specs = specs_for(all, modality);

    std::size_t corpus_size = 0;
    for (const StreamSpec &s : specs)
        corpus_size += count_dataset(s).num_examples;
    if (args.bucket.sample_size > corpus_size)
        err << "warning: sample size " << args.bucket.sample_size << " exceeds the " << corpus_size
            << " available examples; the sample wraps around the streams\n";

    auto stream = open_blend(specs, derive_seed(args.seed, {hash_name("estimate-buckets")}));
    std::vector<ExampleMeta> sample;
    sample.reserve(args.bucket.sample_size);
    for (std::size_t k = 0; k < args.bucket.sample_size; ++k)
        sample.push_back(stream->next());

    const BucketTree tree = estimate_bins(sample, args.bucket);
    if (tree.degenerate)
        err << "warning: degenerate bucket tree (sample lengths do not vary enough to split)\n";
    write_text_file(args.out, to_json(tree));
    out << "wrote " << tree.num_buckets() << "x" << tree.num_subbuckets() << " " << to_string(modality)
        << " bucket tree to " << args.out << "\n";
    return exit_ok;
}

int
oomptimize(const OomArgs &args, std::ostream &out)
{
    const BucketTree tree = bucket_tree_from_json(read_text_file(args.buckets));
    BatchProfile profile;
    if (args.baseline_max_total) {
        profile = baseline_heuristic_profile(tree, *args.baseline_max_total, args.baseline_penalty);
    } else {
        if (args.model.empty())
            throw ConfigError{"--model is required unless --baseline-max-total is given"};
        SyntheticMemoryModel model = memory_model_from_json(read_text_file(args.model));
        profile = build_profile(model, tree, args.search);
    }
    write_text_file(args.out, to_json(profile));
    char mean[32];
    std::snprintf(mean, sizeof mean, "%.2f", profile.mean());
    out << "wrote " << profile.num_buckets() << "x" << profile.num_subbuckets() << " batch profile to " << args.out
        << " (mean batch size " << mean << ")\n";
    return exit_ok;
}

int
simulate_cmd(const SimArgs &args, std::ostream &out)
{
    const auto trees = key_values(args.buckets, "--buckets");
    const auto profiles = key_values(args.profiles, "--profile");
    if (trees.empty())
        throw ConfigError{"at least one --buckets LANE=FILE is required"};
    for (const auto &[lane, _] : trees)
        if (!profiles.contains(lane))
            throw ConfigError{"no --profile given for lane '" + lane + "'"};
    for (const auto &[lane, _] : profiles)
        if (!trees.contains(lane))
            throw ConfigError{"no --buckets given for lane '" + lane + "'"};

    const std::vector<StreamSpec> all = load_manifest(args.manifest);
    SimulateOptions options;
    options.steps = args.steps;
    options.window = args.window;

    SamplerMap samplers;
    for (const auto &[lane, tree_path] : trees) {
        const Modality modality = parse_modality(lane);
        const std::vector<StreamSpec> specs = specs_for(all, modality);
        for (const StreamSpec &s : specs)
            options.sources[s.source_id] = {s.modality, s.weight};

        BucketTree tree = bucket_tree_from_json(read_text_file(tree_path));
        BatchProfile profile = batch_profile_from_json(read_text_file(profiles.at(lane)));
        auto stream = open_blend(specs, derive_seed(args.seed, {hash_name(lane), 1}));
        samplers.emplace(lane, dynamic_bucketing_sampler(std::move(stream), std::move(tree), std::move(profile),
                                                         derive_seed(args.seed, {hash_name(lane), 2})));
    }

    CombinerConfig combiner;
    combiner.strategy = parse_strategy(args.strategy);
    combiner.seed = derive_seed(args.seed, {hash_name("combiner")});
    for (const auto &[lane, p] : key_values(args.probs, "--prob")) {
        try {
            combiner.lane_probs[lane] = std::stod(p);
        } catch (const std::exception &) {
            throw ConfigError{"--prob value for lane '" + lane + "' is not a number"};
        }
    }
    auto pipeline = combine(std::move(samplers), combiner);
    const SimulationReport report = simulate(*pipeline, options);

    const std::string table = format_report_table(report);
    write_text_file(args.out, to_json(report));
    write_text_file(fs::path{args.out}.replace_extension(".txt"), table);
    out << table;
    return exit_ok;
}

int
compare_cmd(const CompareArgs &args, std::ostream &out)
{
    BatchProfile a = batch_profile_from_json(read_text_file(args.baseline));
    const BatchProfile b = batch_profile_from_json(read_text_file(args.candidate));
    if (a.num_subbuckets() == 1 && b.num_subbuckets() > 1)
        a = a.broadcast(b.num_subbuckets());
    const ProfileComparison cmp = compare_profiles(a, b);
    if (!args.out.empty())
        write_text_file(args.out, to_json(cmp));
    for (const auto &[threshold, fraction] : cmp.bands) {
        char line[96];
        std::snprintf(line, sizeof line, "ratio >= %.2f: %5.1f%% of cells\n", threshold, 100.0 * fraction);
        out << line;
    }
    return exit_ok;
}

}  // namespace

int
run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"strata: stationary blending, 2D bucketing and batch-size search for variable-length corpora"};
    app.name("strata");
    app.require_subcommand(1);

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen-synthetic", "Write a deterministic synthetic corpus and manifest");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--config", gen.config_path, "Corpus config JSON (default: built-in corpus)")
        ->check(CLI::ExistingFile);
    gen_cmd->add_option("--seed", gen.seed, "Override the config seed");

    EstimateArgs est;
    auto *est_cmd = app.add_subcommand("estimate-buckets", "Estimate equal-mass 2D bucket bins from a sample");
    est_cmd->add_option("--manifest", est.manifest, "Top-level manifest")->required()->check(CLI::ExistingFile);
    est_cmd->add_option("--out", est.out, "Output bucket tree JSON")->required();
    est_cmd->add_option("--modality", est.modality, "audio or text (required for mixed manifests)");
    est_cmd->add_option("--num-buckets", est.bucket.num_buckets, "Input-length buckets")->capture_default_str();
    est_cmd->add_option("--num-subbuckets", est.bucket.num_subbuckets, "Output-length sub-buckets per bucket")
        ->capture_default_str();
    est_cmd->add_option("--sample-size", est.bucket.sample_size, "Examples drawn for estimation")
        ->capture_default_str();
    est_cmd->add_option("--mass", est.mass, "Bucket mass: input or count")->capture_default_str();
    est_cmd->add_option("--seed", est.seed, "Sampling seed")->capture_default_str();

    OomArgs oom;
    auto *oom_cmd = app.add_subcommand("oomptimize", "Search the maximal batch size for every bucket");
    oom_cmd->add_option("--buckets", oom.buckets, "Bucket tree JSON")->required()->check(CLI::ExistingFile);
    oom_cmd->add_option("--model", oom.model, "Synthetic memory model JSON")->check(CLI::ExistingFile);
    oom_cmd->add_option("--out", oom.out, "Output batch profile JSON")->required();
    oom_cmd->add_option("--initial-batch-size", oom.search.initial_batch_size)->capture_default_str();
    oom_cmd->add_option("--tolerance", oom.search.tolerance)->capture_default_str();
    oom_cmd->add_option("--max-batch-size", oom.search.max_batch_size_cap)->capture_default_str();
    oom_cmd->add_option("--baseline-max-total", oom.baseline_max_total,
                        "Emit the total-length heuristic profile with this length budget instead of searching");
    oom_cmd->add_option("--baseline-penalty", oom.baseline_penalty, "Quadratic length penalty of the heuristic")
        ->capture_default_str();

    SimArgs sim;
    auto *sim_cmd = app.add_subcommand("simulate", "Run the full sampling pipeline and report diagnostics");
    sim_cmd->add_option("--manifest", sim.manifest, "Top-level manifest")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--buckets", sim.buckets, "LANE=bucket_tree.json (repeatable)")->required();
    sim_cmd->add_option("--profile", sim.profiles, "LANE=batch_profile.json (repeatable)")->required();
    sim_cmd->add_option("--prob", sim.probs, "LANE=probability for round robin (repeatable; default equal)");
    sim_cmd->add_option("--strategy", sim.strategy, "round_robin or zip")->capture_default_str();
    sim_cmd->add_option("--steps", sim.steps)->capture_default_str();
    sim_cmd->add_option("--window", sim.window, "Steps per stationarity window")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Output report JSON (a .txt table is written alongside)")->required();

    CompareArgs cmp;
    auto *cmp_cmd = app.add_subcommand("compare-profiles", "Cell-wise batch size ratios of two profiles");
    cmp_cmd->add_option("--baseline", cmp.baseline)->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--candidate", cmp.candidate)->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--out", cmp.out, "Optional comparison JSON");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*gen_cmd)
            return gen_synthetic(gen, out);
        if (*est_cmd)
            return estimate_buckets(est, out, err);
        if (*oom_cmd)
            return oomptimize(oom, out);
        if (*sim_cmd)
            return simulate_cmd(sim, out);
        if (*cmp_cmd)
            return compare_cmd(cmp, out);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

}  // namespace strata::cli
