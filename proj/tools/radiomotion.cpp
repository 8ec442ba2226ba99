// SPDX-License-Identifier: Apache-2.0
//
// radiomotion: dynamic radio-map sequence generation and forecasting
// Copyright (C) 2026 The radiomotion authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// radiomotion command line: generate | train | evaluate | ablate | all

#include "radiomotion/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <iostream>

namespace
{

void fail(const std::string &command, const std::string &message)
{
    std::cerr << nlohmann::json{{"status", "error"}, {"command", command}, {"message", message}}.dump() << std::endl;
}

} // namespace

int main(int argc, char **argv)
{
    using namespace radiomotion;

    CLI::App app{"Dynamic radio-map sequence generation and forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    bool force = false;
    bool quiet = false;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t &v) { seed = v, seed_given = true; }, "Override the base seed");
        sub->add_option("--out", out_dir, "Override the output root");
        sub->add_flag("--force", force, "Overwrite existing outputs");
        sub->add_flag("-q,--quiet", quiet, "Only print errors");
    };

    CLI::App *gen = app.add_subcommand("generate", "Build environments, trajectories and radio-map sequences");
    common(gen);
    bool dry_run = false;
    gen->add_flag("--dry-run", dry_run, "Print split counts of the index without computing maps");

    CLI::App *train = app.add_subcommand("train", "Train a model on the generated dataset");
    common(train);
    std::string model = "radiolstm";
    train->add_option("--model", model, "radiolstm or nextframe")
        ->check(CLI::IsMember({"radiolstm", "nextframe"}));

    CLI::App *eval = app.add_subcommand("evaluate", "Evaluate baselines and trained models on both test splits");
    common(eval);
    CLI::App *ablate = app.add_subcommand("ablate", "Context-length ablation");
    common(ablate);
    CLI::App *all = app.add_subcommand("all", "generate, train both models, evaluate, ablate");
    common(all);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        fail(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name(), e.what());
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try
    {
        PipelineConfig config = PipelineConfig::load(config_path);
        if (seed_given)
            config.seed = seed;
        if (!out_dir.empty())
            config.output_root = out_dir;
        config.validate();

        RunOptions options;
        options.force = force;
        if (!quiet)
            options.log = [start = std::chrono::steady_clock::now()](const std::string &msg) {
                const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::cerr << '[' << static_cast<long>(t) << "s] " << msg << std::endl;
            };

        if (command == "generate" && dry_run)
        {
            std::map<std::string, int> counts;
            for (const auto &[key, tag] : build_index(config))
                ++counts[to_string(tag)];
            std::cout << nlohmann::json(counts).dump() << std::endl;
        }
        else if (command == "generate")
            cmd_generate(config, options);
        else if (command == "train")
            cmd_train(config, parse_model_kind(model), options);
        else if (command == "evaluate")
            cmd_evaluate(config, options);
        else if (command == "ablate")
            cmd_ablate(config, options);
        else
            cmd_all(config, options);
    }
    catch (const std::exception &e)
    {
        fail(command, e.what());
        return 1;
    }
    return 0;
}
