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

#pragma once

#include "radiomotion/baselines.hpp"
#include "radiomotion/dataset.hpp"
#include "radiomotion/env_model.hpp"
#include "radiomotion/forecaster.hpp"
#include "radiomotion/metrics.hpp"
#include "radiomotion/pathloss.hpp"
#include "radiomotion/training.hpp"
#include "radiomotion/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace radiomotion
{

struct PipelineConfig
{
    std::filesystem::path output_root = "radiomotion_out";
    std::uint64_t seed = 1;

    EnvParams env;
    int n_envs = 20;
    int n_trajs = 5;
    int n_tx = 3;
    int frames = kFramesPerSequence;
    double held_out_env_fraction = 1.0 / 6.0;

    int vehicles = 10;
    VehicleSpec vehicle;
    MotionRules motion;

    SolverParams solver;
    ClipRange clip;

    int context = 10;
    int horizon = 5;

    ChannelPlan plan;
    int nextframe_channels = 16;
    TrainConfig training;
    TrainConfig nextframe_training;

    std::vector<int> ablation_contexts{2, 4, 6, 8, 10};
    TrainConfig ablation_training;

    void validate() const;
    nlohmann::json to_json() const;
    // Missing keys keep their defaults; unknown keys are rejected.
    static PipelineConfig from_json(const nlohmann::json &j);
    static PipelineConfig load(const std::filesystem::path &path);
};

using Log = std::function<void(const std::string &)>;

struct RunOptions
{
    bool force = false;
    int threads = 0; // 0: RADIOMOTION_THREADS or hardware concurrency
    Log log;
};

// Per-purpose seeds derived from the config seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Split assignment of every (env, traj, tx) without producing any map.
std::map<SequenceKey, SplitTag> build_index(const PipelineConfig &config);

// Transmitter cells of one environment given all of its trajectories: free
// cells no vehicle ever covers, drawn without replacement.
std::vector<Cell> place_transmitters(const EnvironmentGrid &env, const std::vector<Trajectory> &trajectories,
                                     int count, std::uint64_t seed);

struct Layout
{
    std::filesystem::path root;
    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path index() const { return root / "index.csv"; }
    std::filesystem::path dataset() const { return root / "dataset"; }
    std::filesystem::path envs() const { return root / "envs"; }
    std::filesystem::path trajectories() const { return root / "trajectories"; }
    std::filesystem::path models() const { return root / "models"; }
    std::filesystem::path results() const { return root / "results"; }
};

struct GenerateSummary
{
    int sequences = 0;
    int files_per_format = 0;
    int capacity_warnings = 0;
};

GenerateSummary cmd_generate(const PipelineConfig &config, const RunOptions &options = {});

enum class ModelKind
{
    RadioLSTM,
    NextFrame
};
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string &text);

TrainHistory cmd_train(const PipelineConfig &config, ModelKind kind, const RunOptions &options = {});

// Last-frame repeat always; trained models when their checkpoints exist.
std::vector<MetricsRecord> cmd_evaluate(const PipelineConfig &config, const RunOptions &options = {});

std::vector<AblationEntry> cmd_ablate(const PipelineConfig &config, const RunOptions &options = {});

void cmd_all(const PipelineConfig &config, const RunOptions &options = {});

// Normalised frames of every sequence in one split, in index order.
std::vector<std::pair<SequenceKey, std::vector<Frame>>> load_split(const PipelineConfig &config, SplitTag tag);

} // namespace radiomotion
