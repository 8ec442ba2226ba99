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

#include "radiomotion/pipeline.hpp"

#include "radiomotion/checkpoint.hpp"
#include "radiomotion/plots.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace radiomotion
{

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

void PipelineConfig::validate() const
{
    auto positive = [](int v, const char *what) {
        if (v <= 0)
            throw std::invalid_argument(std::string("config: ") + what + " must be positive");
    };
    positive(n_envs, "dataset.envs");
    positive(n_trajs, "dataset.trajectories");
    positive(n_tx, "dataset.transmitters");
    positive(vehicles, "vehicles.count");
    positive(context, "forecast.context");
    positive(horizon, "forecast.horizon");
    positive(nextframe_channels, "model.nextframe_channels");
    if (env.size <= 0 || env.size % 2 != 0)
        throw std::invalid_argument("config: environment.size must be positive and even");
    if (frames != kFramesPerSequence)
        throw std::invalid_argument("config: dataset.frames must be " + std::to_string(kFramesPerSequence));
    if (context + horizon > frames)
        throw std::invalid_argument("config: forecast.context + forecast.horizon exceeds dataset.frames");
    if (!(clip.min_db < clip.max_db))
        throw std::invalid_argument("config: solver.clip_min_db must be below solver.clip_max_db");
    if (n_trajs < 3)
        throw std::invalid_argument("config: dataset.trajectories must be at least 3 (train, val, test1)");
    if (!(held_out_env_fraction > 0.0 && held_out_env_fraction < 1.0))
        throw std::invalid_argument("config: dataset.held_out_fraction must lie in (0, 1)");
    if (!(vehicle.speed > 0 && vehicle.length > 0 && vehicle.width > 0))
        throw std::invalid_argument("config: vehicle speed and dimensions must be positive");
    training.validate();
    nextframe_training.validate();
    ablation_training.validate();
    for (int tc : ablation_contexts)
        if (tc < 1 || tc + horizon > frames)
            throw std::invalid_argument("config: ablation context " + std::to_string(tc) + " does not fit");
}

namespace
{

json train_json(const TrainConfig &t)
{
    return {{"learning_rate", t.learning_rate}, {"batch_size", t.batch_size}, {"max_epochs", t.max_epochs},
            {"patience", t.patience},           {"weight_decay", t.weight_decay}, {"seed", t.seed},
            {"min_improvement", t.min_improvement}};
}

// Reads known keys of one object and rejects the rest.
class Section
{
  public:
    Section(const json &j, std::string name) : j_(j), name_(std::move(name))
    {
        if (!j_.is_object())
            throw std::invalid_argument("config: " + name_ + " must be an object");
    }

    template <typename T>
    void get(const char *key, T &out)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        try
        {
            out = j_.at(key).get<T>();
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument("config: " + name_ + "." + key + ": " + e.what());
        }
    }

    Section sub(const char *key)
    {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, name_.empty() ? key : name_ + "." + key);
    }

    void finish() const
    {
        for (const auto &item : j_.items())
            if (!seen_.count(item.key()))
                throw std::invalid_argument("config: unknown key " + (name_.empty() ? "" : name_ + ".") + item.key());
    }

  private:
    const json &j_;
    std::string name_;
    std::set<std::string> seen_;
};

void read_train(Section s, TrainConfig &t)
{
    s.get("learning_rate", t.learning_rate);
    s.get("batch_size", t.batch_size);
    s.get("max_epochs", t.max_epochs);
    s.get("patience", t.patience);
    s.get("weight_decay", t.weight_decay);
    s.get("seed", t.seed);
    s.get("min_improvement", t.min_improvement);
    s.finish();
}

} // namespace

json PipelineConfig::to_json() const
{
    json j;
    j["output_root"] = output_root.string();
    j["seed"] = seed;
    j["environment"] = {{"size", env.size},
                        {"resolution", env.resolution},
                        {"block_min", env.block_size.min},
                        {"block_max", env.block_size.max},
                        {"street_min", env.street_width.min},
                        {"street_max", env.street_width.max},
                        {"max_setback", env.max_setback},
                        {"split_probability", env.split_probability}};
    j["dataset"] = {{"envs", n_envs},
                    {"trajectories", n_trajs},
                    {"transmitters", n_tx},
                    {"frames", frames},
                    {"held_out_fraction", held_out_env_fraction}};
    j["vehicles"] = {{"count", vehicles},
                     {"speed", vehicle.speed},
                     {"length", vehicle.length},
                     {"width", vehicle.width},
                     {"spacing_lengths", motion.spacing_in_lengths},
                     {"lookahead_lengths", motion.lookahead_in_lengths},
                     {"lookahead_window", motion.lookahead_window},
                     {"smoothing", motion.smoothing},
                     {"stuck_threshold", motion.stuck_threshold}};
    j["solver"] = {{"tx_power_dbm", solver.tx_power_dbm},
                   {"frequency_hz", solver.frequency_hz},
                   {"tx_height_m", solver.tx_height_m},
                   {"rx_height_m", solver.rx_height_m},
                   {"diffraction_loss_db", solver.diffraction_loss_db},
                   {"floor_dbm", solver.floor_dbm},
                   {"min_distance_m", solver.min_distance_m},
                   {"clip_min_db", clip.min_db},
                   {"clip_max_db", clip.max_db}};
    j["forecast"] = {{"context", context}, {"horizon", horizon}};
    j["model"] = {{"level1", plan.level1},
                  {"level2", plan.level2},
                  {"kernel_size", plan.kernel_size},
                  {"nextframe_channels", nextframe_channels}};
    j["training"] = train_json(training);
    j["nextframe_training"] = train_json(nextframe_training);
    j["ablation"] = {{"contexts", ablation_contexts}, {"training", train_json(ablation_training)}};
    return j;
}

PipelineConfig PipelineConfig::from_json(const json &j)
{
    PipelineConfig c;
    Section root(j, "");
    std::string out = c.output_root.string();
    root.get("output_root", out);
    c.output_root = out;
    root.get("seed", c.seed);
    {
        Section s = root.sub("environment");
        s.get("size", c.env.size);
        s.get("resolution", c.env.resolution);
        s.get("block_min", c.env.block_size.min);
        s.get("block_max", c.env.block_size.max);
        s.get("street_min", c.env.street_width.min);
        s.get("street_max", c.env.street_width.max);
        s.get("max_setback", c.env.max_setback);
        s.get("split_probability", c.env.split_probability);
        s.finish();
    }
    {
        Section s = root.sub("dataset");
        s.get("envs", c.n_envs);
        s.get("trajectories", c.n_trajs);
        s.get("transmitters", c.n_tx);
        s.get("frames", c.frames);
        s.get("held_out_fraction", c.held_out_env_fraction);
        s.finish();
    }
    {
        Section s = root.sub("vehicles");
        s.get("count", c.vehicles);
        s.get("speed", c.vehicle.speed);
        s.get("length", c.vehicle.length);
        s.get("width", c.vehicle.width);
        s.get("spacing_lengths", c.motion.spacing_in_lengths);
        s.get("lookahead_lengths", c.motion.lookahead_in_lengths);
        s.get("lookahead_window", c.motion.lookahead_window);
        s.get("smoothing", c.motion.smoothing);
        s.get("stuck_threshold", c.motion.stuck_threshold);
        s.finish();
    }
    {
        Section s = root.sub("solver");
        s.get("tx_power_dbm", c.solver.tx_power_dbm);
        s.get("frequency_hz", c.solver.frequency_hz);
        s.get("tx_height_m", c.solver.tx_height_m);
        s.get("rx_height_m", c.solver.rx_height_m);
        s.get("diffraction_loss_db", c.solver.diffraction_loss_db);
        s.get("floor_dbm", c.solver.floor_dbm);
        s.get("min_distance_m", c.solver.min_distance_m);
        s.get("clip_min_db", c.clip.min_db);
        s.get("clip_max_db", c.clip.max_db);
        s.finish();
    }
    {
        Section s = root.sub("forecast");
        s.get("context", c.context);
        s.get("horizon", c.horizon);
        s.finish();
    }
    {
        Section s = root.sub("model");
        s.get("level1", c.plan.level1);
        s.get("level2", c.plan.level2);
        s.get("kernel_size", c.plan.kernel_size);
        s.get("nextframe_channels", c.nextframe_channels);
        s.finish();
    }
    read_train(root.sub("training"), c.training);
    read_train(root.sub("nextframe_training"), c.nextframe_training);
    // Ablation runs default to the main training settings.
    c.ablation_training = c.training;
    {
        Section s = root.sub("ablation");
        s.get("contexts", c.ablation_contexts);
        read_train(s.sub("training"), c.ablation_training);
        s.finish();
    }
    root.finish();
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path.string());
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (const json::parse_error &e)
    {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

// ---------------------------------------------------------------- helpers

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    // splitmix64 over the tuple
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    for (std::uint64_t v : {a, b, c})
        h = mix(h ^ v);
    return h;
}

namespace
{

enum SeedTag : std::uint64_t
{
    kEnvSeed = 1,
    kTrajSeed = 2,
    kTxSeed = 3,
    kTrainSeed = 4,
    kInitSeed = 5
};

void say(const RunOptions &o, const std::string &msg)
{
    if (o.log)
        o.log(msg);
}

int worker_count(const RunOptions &o)
{
    if (o.threads > 0)
        return o.threads;
    if (const char *env = std::getenv("RADIOMOTION_THREADS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0)
            throw std::invalid_argument("RADIOMOTION_THREADS must be a positive integer, got '" + std::string(env) +
                                        "'");
        return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs job(i) for i in [0, n) on a bounded pool. The lowest-index failure is
// rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &job)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i; !failed && (i = next++) < n;)
        {
            try
            {
                job(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (t == 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        for (int k = 0; k < t; ++k)
            pool.emplace_back(worker);
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string seq_name(const SequenceKey &k)
{
    std::ostringstream s;
    s << "(env " << k.env_id << ", traj " << k.traj_id << ", tx " << k.tx_id << ")";
    return s.str();
}

std::string padded(int v, int width)
{
    std::ostringstream s;
    s << std::setw(width) << std::setfill('0') << v;
    return s.str();
}

SplitConfig split_config(const PipelineConfig &c)
{
    return {c.n_envs, c.n_trajs, c.held_out_env_fraction};
}

void write_json(const fs::path &path, const json &j)
{
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::map<SequenceKey, SplitTag> build_index(const PipelineConfig &config)
{
    std::vector<SequenceKey> keys;
    for (int e = 0; e < config.n_envs; ++e)
        for (int t = 0; t < config.n_trajs; ++t)
            for (int x = 0; x < config.n_tx; ++x)
                keys.push_back({e, t, x});
    return split_dataset(keys, split_config(config));
}

std::vector<Cell> place_transmitters(const EnvironmentGrid &env, const std::vector<Trajectory> &trajectories,
                                     int count, std::uint64_t seed)
{
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(env.size()) * env.size(), 0);
    for (const Trajectory &t : trajectories)
        for (const auto &frame : t.frames)
            for (const Cell &c : rasterize_vehicles(frame, env))
                covered[env.index(c.col, c.row)] = 1;
    std::vector<Cell> free;
    for (int row = 0; row < env.size(); ++row)
        for (int col = 0; col < env.size(); ++col)
            if (!env.is_building({col, row}) && !covered[env.index(col, row)])
                free.push_back({col, row});
    if (static_cast<int>(free.size()) < count)
        throw std::runtime_error("environment " + std::to_string(env.env_id()) + " has only " +
                                 std::to_string(free.size()) + " cells free for transmitters");
    std::mt19937_64 rng(seed);
    std::shuffle(free.begin(), free.end(), rng);
    free.resize(static_cast<std::size_t>(count));
    return free;
}

// ---------------------------------------------------------------- generate

GenerateSummary cmd_generate(const PipelineConfig &config, const RunOptions &options)
{
    config.validate();
    const Layout layout{config.output_root};
    if (fs::exists(layout.manifest()) && !options.force)
        throw std::runtime_error("output " + layout.root.string() + " already holds a dataset (use --force)");
    fs::create_directories(layout.envs());
    fs::create_directories(layout.trajectories());
    fs::create_directories(layout.dataset());

    const int threads = worker_count(options);
    const auto t0 = std::chrono::steady_clock::now();

    struct EnvData
    {
        EnvironmentGrid grid;
        std::vector<Trajectory> trajectories;
        std::vector<Cell> tx;
        int warnings = 0;
    };
    std::vector<EnvData> envs(static_cast<std::size_t>(config.n_envs));
    say(options, "generating " + std::to_string(config.n_envs) + " environments and trajectories");
    parallel_for(envs.size(), threads, [&](std::size_t e) {
        const int env_id = static_cast<int>(e);
        EnvData &d = envs[e];
        try
        {
            d.grid = generate_environment(derive_seed(config.seed, kEnvSeed, e), config.env, env_id);
            for (int t = 0; t < config.n_trajs; ++t)
            {
                SeedResult seeded = seed_vehicles(d.grid, config.vehicles, derive_seed(config.seed, kTrajSeed, e, t),
                                                  config.vehicle, config.motion);
                d.warnings += seeded.capacity_warning ? 1 : 0;
                d.trajectories.push_back(
                    simulate_trajectory(d.grid, seeded.vehicles, config.frames, t, config.motion));
            }
            d.tx = place_transmitters(d.grid, d.trajectories, config.n_tx, derive_seed(config.seed, kTxSeed, e));
            write_png(layout.envs() / ("env_" + padded(env_id, 3) + ".png"), export_environment(d.grid));
            for (const Trajectory &t : d.trajectories)
                write_trajectory_csv(layout.trajectories() /
                                         ("env_" + padded(env_id, 3) + "_traj_" + padded(t.traj_id, 2) + ".csv"),
                                     t);
        }
        catch (const std::exception &ex)
        {
            throw std::runtime_error("environment " + std::to_string(env_id) + ": " + ex.what());
        }
    });

    const auto index = build_index(config);
    std::vector<SequenceKey> keys;
    for (const auto &[k, tag] : index)
        keys.push_back(k);
    say(options, "computing " + std::to_string(keys.size()) + " sequences on " + std::to_string(threads) +
                     " worker(s)");
    std::atomic<int> done{0};
    std::mutex log_mutex;
    parallel_for(keys.size(), threads, [&](std::size_t i) {
        const SequenceKey &key = keys[i];
        try
        {
            const EnvData &d = envs[static_cast<std::size_t>(key.env_id)];
            const Trajectory &traj = d.trajectories[static_cast<std::size_t>(key.traj_id)];
            SequenceRecord rec;
            rec.key = key;
            rec.split = index.at(key);
            SceneSnapshot scene{d.grid, {}, d.tx[static_cast<std::size_t>(key.tx_id)], config.solver};
            for (int f = 0; f < config.frames; ++f)
            {
                scene.vehicle_cells = rasterize_vehicles(traj.frames[static_cast<std::size_t>(f)], d.grid);
                RadioMap map = compute_radio_map(scene);
                map.scene_ref = {key.env_id, key.traj_id, key.tx_id, f};
                rec.frames.push_back(std::move(map));
            }
            export_sequence(rec, layout.dataset(), {config.clip, options.force});
        }
        catch (const std::exception &ex)
        {
            throw std::runtime_error("sequence " + seq_name(key) + ": " + ex.what());
        }
        const int n = ++done;
        if (n % 50 == 0 || n == static_cast<int>(keys.size()))
        {
            std::lock_guard lock(log_mutex);
            say(options, "  " + std::to_string(n) + "/" + std::to_string(keys.size()) + " sequences");
        }
    });

    write_index_csv(layout.index(), index);

    GenerateSummary summary;
    summary.sequences = static_cast<int>(keys.size());
    summary.files_per_format = summary.sequences * config.frames;
    json manifest;
    manifest["config"] = config.to_json();
    manifest["sequences"] = summary.sequences;
    manifest["frames_per_format"] = summary.files_per_format;
    json env_list = json::array();
    for (const EnvData &d : envs)
    {
        json tx = json::array();
        for (const Cell &c : d.tx)
            tx.push_back({c.col, c.row});
        summary.capacity_warnings += d.warnings;
        env_list.push_back({{"env_id", d.grid.env_id()},
                            {"seed", derive_seed(config.seed, kEnvSeed, static_cast<std::uint64_t>(d.grid.env_id()))},
                            {"tx_cells", tx},
                            {"capacity_warnings", d.warnings}});
    }
    manifest["environments"] = env_list;
    std::map<std::string, int> counts;
    for (const auto &[k, tag] : index)
        ++counts[to_string(tag)];
    manifest["split_counts"] = counts;
    write_json(layout.manifest(), manifest);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream msg;
    msg << "generated " << summary.sequences << " sequences (" << summary.files_per_format
        << " frames per format) in " << std::fixed << std::setprecision(1) << secs << " s";
    if (summary.capacity_warnings)
        msg << "; " << summary.capacity_warnings << " trajectories seeded fewer vehicles than requested";
    say(options, msg.str());
    return summary;
}

// ---------------------------------------------------------------- training

std::string to_string(ModelKind kind)
{
    return kind == ModelKind::RadioLSTM ? "radiolstm" : "nextframe";
}

ModelKind parse_model_kind(const std::string &text)
{
    if (text == "radiolstm")
        return ModelKind::RadioLSTM;
    if (text == "nextframe")
        return ModelKind::NextFrame;
    throw std::invalid_argument("unknown model '" + text + "' (expected radiolstm or nextframe)");
}

std::vector<std::pair<SequenceKey, std::vector<Frame>>> load_split(const PipelineConfig &config, SplitTag tag)
{
    const Layout layout{config.output_root};
    if (!fs::exists(layout.index()))
        throw std::runtime_error("no dataset index at " + layout.index().string() + " (run generate first)");
    std::vector<std::pair<SequenceKey, std::vector<Frame>>> out;
    for (const auto &[key, t] : read_index_csv(layout.index()))
        if (t == tag)
        {
            std::vector<Frame> frames = load_sequence(layout.dataset(), key, config.clip);
            if (frames.empty() || frames.front().size != config.env.size)
                throw std::runtime_error("sequence " + seq_name(key) + " does not match the configured grid size");
            out.emplace_back(key, std::move(frames));
        }
    if (out.empty())
        throw std::runtime_error("split " + to_string(tag) + " is empty in " + layout.index().string());
    return out;
}

namespace
{

std::vector<SequencePair> pairs_of(const std::vector<std::pair<SequenceKey, std::vector<Frame>>> &seqs, int context,
                                   int horizon)
{
    std::vector<SequencePair> out;
    for (const auto &[key, frames] : seqs)
        out.push_back(make_pairs(frames, context, horizon, key));
    return out;
}

std::vector<std::vector<Frame>> frames_of(const std::vector<std::pair<SequenceKey, std::vector<Frame>>> &seqs)
{
    std::vector<std::vector<Frame>> out;
    for (const auto &s : seqs)
        out.push_back(s.second);
    return out;
}

TrainConfig seeded(const TrainConfig &t, std::uint64_t base, std::uint64_t salt)
{
    TrainConfig out = t;
    out.seed = derive_seed(base, kTrainSeed, salt, t.seed);
    return out;
}

json model_metadata(const PipelineConfig &config, ModelKind kind, int context, const TrainConfig &train)
{
    json m;
    m["model"] = to_string(kind);
    m["grid_size"] = config.env.size;
    m["context"] = context;
    m["horizon"] = config.horizon;
    m["level1"] = config.plan.level1;
    m["level2"] = config.plan.level2;
    m["kernel_size"] = config.plan.kernel_size;
    m["channels"] = config.nextframe_channels;
    m["training"] = train_json(train);
    m["dataset_seed"] = config.seed;
    return m;
}

fs::path model_dir(const PipelineConfig &config, ModelKind kind)
{
    return Layout{config.output_root}.models() / to_string(kind);
}

void log_epoch(const RunOptions &options, const std::string &what, const EpochRecord &e)
{
    std::ostringstream s;
    s << what << " epoch " << e.epoch << ": train " << std::scientific << std::setprecision(4) << e.train_loss
      << ", val " << e.val_loss;
    say(options, s.str());
}

ForecasterParams<float> train_radiolstm(const PipelineConfig &config, int context, const TrainConfig &train,
                                        const std::vector<SequencePair> &tr, const std::vector<SequencePair> &va,
                                        const RunOptions &options, TrainHistory *history)
{
    ForecasterParams<float> params =
        ForecasterParams<float>::initialized(config.plan, derive_seed(config.seed, kInitSeed, context));
    TrainHistory h = train_forecaster(params, tr, va, train, [&](const EpochRecord &e) {
        log_epoch(options, "radiolstm Tc=" + std::to_string(context), e);
    });
    if (history)
        *history = std::move(h);
    return params;
}

void save_radiolstm(const fs::path &dir, ForecasterParams<float> &params, const json &meta)
{
    auto t = params.tensors();
    save_checkpoint(dir, t, meta);
}

// Loads a RadioLSTM checkpoint after checking it fits the dataset.
ForecasterParams<float> load_radiolstm(const fs::path &dir, const PipelineConfig &config)
{
    json meta = read_checkpoint_metadata(dir);
    if (meta.value("model", "") != "radiolstm")
        throw std::runtime_error("checkpoint " + dir.string() + " is not a radiolstm model");
    if (meta.at("grid_size").get<int>() != config.env.size)
        throw std::runtime_error("checkpoint " + dir.string() + " was trained on " +
                                 std::to_string(meta.at("grid_size").get<int>()) + "x grids, dataset uses " +
                                 std::to_string(config.env.size));
    ChannelPlan plan{meta.at("level1").get<int>(), meta.at("level2").get<int>(), meta.at("kernel_size").get<int>()};
    ForecasterParams<float> params = ForecasterParams<float>::zeros(plan);
    auto t = params.tensors();
    load_checkpoint(dir, t);
    return params;
}

} // namespace

TrainHistory cmd_train(const PipelineConfig &config, ModelKind kind, const RunOptions &options)
{
    config.validate();
    const auto train_seqs = load_split(config, SplitTag::Train);
    const auto val_seqs = load_split(config, SplitTag::Val);
    const fs::path dir = model_dir(config, kind);
    fs::create_directories(dir);
    TrainHistory history;
    const auto t0 = std::chrono::steady_clock::now();
    if (kind == ModelKind::RadioLSTM)
    {
        const TrainConfig train = seeded(config.training, config.seed, 0);
        say(options, "training radiolstm on " + std::to_string(train_seqs.size()) + " sequences");
        ForecasterParams<float> params =
            train_radiolstm(config, config.context, train, pairs_of(train_seqs, config.context, config.horizon),
                            pairs_of(val_seqs, config.context, config.horizon), options, &history);
        save_radiolstm(dir, params, model_metadata(config, kind, config.context, train));
    }
    else
    {
        const TrainConfig train = seeded(config.nextframe_training, config.seed, 1);
        say(options, "training nextframe on " + std::to_string(train_seqs.size()) + " sequences");
        NextFramePredictor model =
            NextFramePredictor::initialized(config.nextframe_channels, derive_seed(config.seed, kInitSeed, 1000));
        history = model.train(frames_of(train_seqs), frames_of(val_seqs), train,
                              [&](const EpochRecord &e) { log_epoch(options, "nextframe", e); });
        model.save(dir, model_metadata(config, kind, config.context, train));
    }
    write_history_csv(dir / "history.csv", history);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream msg;
    msg << to_string(kind) << ": best epoch " << history.best_epoch << " (val " << std::scientific
        << std::setprecision(4) << history.best_val_loss << ") after " << history.epochs.size() << " epochs, "
        << std::fixed << std::setprecision(1) << secs << " s";
    say(options, msg.str());
    return history;
}

// ---------------------------------------------------------------- evaluate

std::vector<MetricsRecord> cmd_evaluate(const PipelineConfig &config, const RunOptions &options)
{
    config.validate();
    const Layout layout{config.output_root};
    fs::create_directories(layout.results());

    std::vector<std::pair<std::string, Predictor>> models;
    models.emplace_back("last_frame_repeat",
                        [](std::span<const Frame> ctx, int h) { return last_frame_repeat(ctx, h); });
    std::shared_ptr<ForecasterParams<float>> lstm;
    if (fs::exists(model_dir(config, ModelKind::RadioLSTM) / "manifest.json"))
    {
        lstm = std::make_shared<ForecasterParams<float>>(
            load_radiolstm(model_dir(config, ModelKind::RadioLSTM), config));
        models.emplace_back("radiolstm", [lstm](std::span<const Frame> ctx, int h) { return predict(*lstm, ctx, h); });
    }
    std::shared_ptr<NextFramePredictor> nf;
    if (fs::exists(model_dir(config, ModelKind::NextFrame) / "manifest.json"))
    {
        const fs::path dir = model_dir(config, ModelKind::NextFrame);
        if (read_checkpoint_metadata(dir).at("grid_size").get<int>() != config.env.size)
            throw std::runtime_error("checkpoint " + dir.string() + " was trained on a different grid size");
        nf = std::make_shared<NextFramePredictor>(NextFramePredictor::load(dir));
        models.emplace_back("nextframe", [nf](std::span<const Frame> ctx, int h) { return nf->apply(ctx, h); });
    }

    std::vector<MetricsRecord> records;
    json timing = json::object();
    for (SplitTag tag : {SplitTag::Test1, SplitTag::Test2})
    {
        const auto seqs = load_split(config, tag);
        const auto pairs = pairs_of(seqs, config.context, config.horizon);
        for (const auto &[name, predictor] : models)
        {
            const auto t0 = std::chrono::steady_clock::now();
            records.push_back(evaluate(name, to_string(tag), predictor, pairs));
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            timing[name + "/" + to_string(tag)] = {{"pairs", pairs.size()},
                                                   {"ms_per_sequence", ms / static_cast<double>(pairs.size())}};
            std::ostringstream s;
            s << name << " on " << to_string(tag) << ": nmse " << std::scientific << std::setprecision(4)
              << records.back().aggregate.nmse << ", ssim " << std::fixed << records.back().aggregate.ssim
              << ", psnr " << std::setprecision(2) << records.back().aggregate.psnr_db << " dB";
            say(options, s.str());
        }
    }
    write_results_csv(layout.results() / "results.csv", records);
    write_json(layout.results() / "timing.json", timing);

    for (const std::string split : {"test1", "test2"})
    {
        std::vector<Series> series;
        for (const MetricsRecord &r : records)
            if (r.split == split)
            {
                Series s{r.model, {}, {}};
                for (std::size_t k = 0; k < r.per_frame.size(); ++k)
                {
                    s.x.push_back(static_cast<double>(k + 1));
                    s.y.push_back(r.per_frame[k].nmse);
                }
                series.push_back(std::move(s));
            }
        write_line_plot(layout.results() / ("nmse_per_frame_" + split + ".svg"), "Per-frame NMSE (" + split + ")",
                        "predicted frame", "NMSE", series);
    }

    // Partial autocorrelation of pixel series on the unseen-trajectory split.
    const int max_lag = std::min(10, config.frames - 2);
    std::vector<double> p = mean_pixel_pacf(frames_of(load_split(config, SplitTag::Test1)), max_lag);
    {
        std::ofstream out(layout.results() / "pacf.csv");
        out << "lag,pacf\n" << std::setprecision(17);
        for (std::size_t k = 0; k < p.size(); ++k)
            out << k + 1 << ',' << p[k] << '\n';
    }
    write_bar_plot(layout.results() / "pacf.svg", "Mean per-pixel PACF", "lag", "PACF", p,
                   1.96 / std::sqrt(static_cast<double>(config.frames)));
    return records;
}

// ---------------------------------------------------------------- ablation

std::vector<AblationEntry> cmd_ablate(const PipelineConfig &config, const RunOptions &options)
{
    config.validate();
    const Layout layout{config.output_root};
    fs::create_directories(layout.results());
    const auto train_seqs = frames_of(load_split(config, SplitTag::Train));
    const auto val_seqs = frames_of(load_split(config, SplitTag::Val));
    const auto test_seqs = frames_of(load_split(config, SplitTag::Test2));

    std::vector<std::shared_ptr<ForecasterParams<float>>> keep;
    auto trainer = [&](int tc, const std::vector<SequencePair> &tr, const std::vector<SequencePair> &va) -> Predictor {
        // At the main context length the ablation run is the main training run,
        // so a matching main checkpoint is reused as is.
        const std::uint64_t salt = tc == config.context ? 0 : 100 + static_cast<std::uint64_t>(tc);
        const TrainConfig train = seeded(config.ablation_training, config.seed, salt);
        const fs::path dir = layout.models() / ("ablation_tc" + padded(tc, 2));
        const fs::path main_dir = model_dir(config, ModelKind::RadioLSTM);
        const json meta = model_metadata(config, ModelKind::RadioLSTM, tc, train);
        auto matches = [&](const fs::path &d) {
            return !options.force && fs::exists(d / "manifest.json") && read_checkpoint_metadata(d) == meta;
        };
        std::shared_ptr<ForecasterParams<float>> params;
        if (tc == config.context && matches(main_dir))
        {
            say(options, "ablation Tc=" + std::to_string(tc) + ": reusing " + main_dir.string());
            params = std::make_shared<ForecasterParams<float>>(load_radiolstm(main_dir, config));
        }
        else if (matches(dir))
        {
            say(options, "ablation Tc=" + std::to_string(tc) + ": reusing " + dir.string());
            params = std::make_shared<ForecasterParams<float>>(load_radiolstm(dir, config));
        }
        else
        {
            TrainHistory h;
            params = std::make_shared<ForecasterParams<float>>(train_radiolstm(config, tc, train, tr, va, options, &h));
            save_radiolstm(dir, *params, meta);
            write_history_csv(dir / "history.csv", h);
        }
        keep.push_back(params);
        return [params](std::span<const Frame> ctx, int h) { return predict(*params, ctx, h); };
    };
    std::vector<AblationEntry> entries = ablate_context(train_seqs, val_seqs, test_seqs, to_string(SplitTag::Test2),
                                                        config.ablation_contexts, config.horizon, trainer);

    std::vector<MetricsRecord> records;
    Series curve{"NMSE", {}, {}};
    std::vector<Series> frames;
    std::ofstream digests(layout.results() / "ablation_targets.csv");
    digests << "Tc,target_digest\n";
    for (const AblationEntry &e : entries)
    {
        records.push_back(e.record);
        curve.x.push_back(e.context);
        curve.y.push_back(e.record.aggregate.nmse);
        Series s{"Tc=" + std::to_string(e.context), {}, {}};
        for (std::size_t k = 0; k < e.record.per_frame.size(); ++k)
        {
            s.x.push_back(static_cast<double>(k + 1));
            s.y.push_back(e.record.per_frame[k].nmse);
        }
        frames.push_back(std::move(s));
        std::ostringstream hex;
        hex << std::hex << std::setw(16) << std::setfill('0') << e.target_digest;
        digests << e.context << ',' << hex.str() << '\n';
        std::ostringstream msg;
        msg << "ablation Tc=" << e.context << ": nmse " << std::scientific << std::setprecision(4)
            << e.record.aggregate.nmse;
        say(options, msg.str());
    }
    write_results_csv(layout.results() / "ablation.csv", records);
    write_line_plot(layout.results() / "ablation_nmse.svg", "NMSE vs context length", "Tc", "NMSE", {curve});
    write_line_plot(layout.results() / "ablation_per_frame.svg", "Per-frame NMSE by context length",
                    "predicted frame", "NMSE", frames);
    return entries;
}

void cmd_all(const PipelineConfig &config, const RunOptions &options)
{
    cmd_generate(config, options);
    cmd_train(config, ModelKind::RadioLSTM, options);
    cmd_train(config, ModelKind::NextFrame, options);
    cmd_evaluate(config, options);
    cmd_ablate(config, options);
}

} // namespace radiomotion
