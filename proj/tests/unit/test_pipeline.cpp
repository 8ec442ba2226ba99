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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radiomotion/pipeline.hpp"

#include <fstream>
#include <iterator>
#include <set>

using namespace radiomotion;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<fs::path, std::string> tree_bytes(const fs::path &root)
{
    std::map<fs::path, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[fs::relative(e.path(), root)] = slurp(e.path());
    return out;
}

int count_files(const fs::path &root, const std::string &ext)
{
    int n = 0;
    for (const auto &e : fs::recursive_directory_iterator(root))
        n += e.is_regular_file() && e.path().extension() == ext;
    return n;
}

PipelineConfig small_config(const fs::path &root)
{
    PipelineConfig c;
    c.output_root = root;
    c.env.size = 32;
    c.n_envs = 6;
    c.n_trajs = 3;
    c.n_tx = 2;
    c.vehicles = 3;
    return c;
}

std::map<SplitTag, int> split_counts(const std::map<SequenceKey, SplitTag> &index)
{
    std::map<SplitTag, int> counts;
    for (const auto &[k, tag] : index)
        ++counts[tag];
    return counts;
}

} // namespace

TEST_CASE("config json is strict and round-trips")
{
    const PipelineConfig defaults;
    CHECK(PipelineConfig::from_json(json::object()).to_json() == defaults.to_json());
    CHECK(PipelineConfig::from_json(defaults.to_json()).to_json() == defaults.to_json());

    CHECK_THROWS(PipelineConfig::from_json(json{{"sede", 3}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"dataset", {{"env", 3}}}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"training", {{"epochs", 3}}}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"dataset", {{"envs", "many"}}}}));

    const PipelineConfig c = PipelineConfig::from_json(
        json{{"seed", 9}, {"dataset", {{"envs", 4}}}, {"training", {{"max_epochs", 7}, {"patience", 5}}}});
    CHECK(c.seed == 9);
    CHECK(c.n_envs == 4);
    CHECK(c.training.max_epochs == 7);
    // Ablation runs inherit the main training settings unless given.
    CHECK(c.ablation_training.max_epochs == 7);
}

TEST_CASE("config validation")
{
    CHECK_THROWS(PipelineConfig::from_json(json{{"forecast", {{"context", 11}, {"horizon", 5}}}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"dataset", {{"trajectories", 2}}}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"environment", {{"size", 63}}}}));
    CHECK_THROWS(PipelineConfig::from_json(json{{"ablation", {{"contexts", {2, 12}}}}}));
    CHECK_NOTHROW(PipelineConfig::from_json(json{{"forecast", {{"context", 4}, {"horizon", 5}}}}));
}

TEST_CASE("index at full-scale dimensions")
{
    PipelineConfig c;
    c.n_envs = 300;
    c.n_trajs = 5;
    c.n_tx = 20;
    const auto counts = split_counts(build_index(c));
    CHECK(counts.at(SplitTag::Train) == 15000);
    CHECK(counts.at(SplitTag::Val) == 5000);
    CHECK(counts.at(SplitTag::Test1) == 5000);
    CHECK(counts.at(SplitTag::Test2) == 5000);
}

TEST_CASE("derive_seed separates purposes")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 1; tag <= 5; ++tag)
        for (std::uint64_t a = 0; a < 20; ++a)
            for (std::uint64_t b = 0; b < 5; ++b)
                seen.insert(derive_seed(1, tag, a, b));
    CHECK(seen.size() == 5 * 20 * 5);
    CHECK(derive_seed(1, 2, 3, 4) == derive_seed(1, 2, 3, 4));
    CHECK(derive_seed(1, 2, 3, 4) != derive_seed(2, 2, 3, 4));
}

TEST_CASE("place_transmitters avoids buildings and every vehicle position")
{
    const EnvironmentGrid env = generate_environment(4, EnvParams{});
    std::vector<Trajectory> trajs;
    for (int t = 0; t < 3; ++t)
        trajs.push_back(simulate_trajectory(env, seed_vehicles(env, 10, 40 + static_cast<std::uint64_t>(t)).vehicles, 15, t));
    const auto tx = place_transmitters(env, trajs, 5, 77);
    REQUIRE(tx.size() == 5);
    CHECK(place_transmitters(env, trajs, 5, 77) == tx);
    CHECK(std::set<Cell>(tx.begin(), tx.end()).size() == 5);
    for (const Cell &c : tx)
    {
        CHECK_FALSE(env.is_building(c));
        for (const auto &t : trajs)
            for (const auto &frame : t.frames)
            {
                const auto occupied = rasterize_vehicles(frame, env);
                CHECK(std::find(occupied.begin(), occupied.end(), c) == occupied.end());
            }
    }
}

TEST_CASE("generate writes a complete, reproducible tree")
{
    const fs::path a = fs::temp_directory_path() / "radiomotion_gen_a";
    const fs::path b = fs::temp_directory_path() / "radiomotion_gen_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const PipelineConfig ca = small_config(a), cb = small_config(b);

    const GenerateSummary s = cmd_generate(ca);
    CHECK(s.sequences == 6 * 3 * 2);
    CHECK(s.files_per_format == 36 * 15);
    CHECK(count_files(Layout{a}.dataset() / "raw", ".rmm") == 540);
    CHECK(count_files(Layout{a}.dataset() / "png", ".png") == 540);
    CHECK(fs::exists(Layout{a}.manifest()));

    const auto index = read_index_csv(Layout{a}.index());
    CHECK(index == build_index(ca));
    const auto counts = split_counts(index);
    CHECK(counts.at(SplitTag::Test2) == 6);
    CHECK(counts.at(SplitTag::Train) == 10);
    CHECK(counts.at(SplitTag::Val) == 10);
    CHECK(counts.at(SplitTag::Test1) == 10);

    // Each png is the quantised normalised raw frame.
    for (const auto &[key, tag] : index)
        for (int f = 0; f < kFramesPerSequence; f += 7)
        {
            const auto stem = frame_file_stem(f);
            const auto raw = read_rmm(Layout{a}.dataset() / "raw" / sequence_dir(key) / (stem + ".rmm"));
            const GrayImage png = read_png(Layout{a}.dataset() / "png" / sequence_dir(key) / (stem + ".png"));
            REQUIRE(png.pixels.size() == raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i)
                CHECK(png.pixels[i] == quantize_8bit(normalize_db(raw[i], ca.clip)));
        }

    CHECK_THROWS_AS(cmd_generate(ca), std::runtime_error);

    RunOptions single;
    single.threads = 1;
    cmd_generate(cb, single);
    const auto ta = tree_bytes(Layout{a}.dataset()), tb = tree_bytes(Layout{b}.dataset());
    CHECK(ta.size() == tb.size());
    CHECK(ta == tb);
    CHECK(slurp(Layout{a}.index()) == slurp(Layout{b}.index()));

    SUBCASE("evaluate without checkpoints scores the repeat baseline")
    {
        PipelineConfig e = ca;
        e.env.size = 32;
        const auto records = cmd_evaluate(e);
        REQUIRE(records.size() == 2);
        CHECK(records[0].model == "last_frame_repeat");
        CHECK(fs::exists(Layout{a}.results() / "results.csv"));
        CHECK(records[0].pairs == 10);
        CHECK(records[1].pairs == 6);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}
