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

// Acceptance suite. Prints one PASS/FAIL line per criterion on stdout and
// exits non-zero when any criterion fails. Pipeline progress goes to stderr.

#include "gradcheck.hpp"
#include "lstm_oracle.hpp"
#include "metric_oracles.hpp"
#include "pathloss_oracle.hpp"

#include "radiomotion/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace radiomotion;
namespace fs = std::filesystem;
using testing::GradCheck;

namespace
{

// Pinned tolerances.
constexpr double kMinRelativeGain = 0.20;    // ordering: radiolstm vs last-frame repeat on test1
constexpr double kLstmOracleTol = 1e-12;     // ConvLSTM vs scalar LSTM
constexpr double kEndToEndGradTol = 1e-5;    // forecaster finite differences, double
constexpr double kPerOpGradTol = 1e-4;       // single-op finite differences
constexpr double kMaxKinkFraction = 0.01;    // pooling kinks skipped by the gradient check
constexpr double kSolverOracleTol = 1e-9;    // dB, solver vs shortest-path oracle
constexpr double kFsplTol = 1e-9;            // dB, empty scene vs closed form
constexpr double kFsplSpotTol = 0.01;        // dB, spot value at 10 m
constexpr double kHeadingSlack = 1e-9;       // rad
constexpr double kMetricTol = 1e-12;
constexpr double kPsnrTol = 1e-9;            // dB
constexpr double kPacfLag1Tol = 0.05;
constexpr double kPacfHigherLagTol = 0.05;
constexpr int kTrajectorySeeds = 100;
constexpr int kOracleDraws = 100;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4)
{
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> bytes for every regular file below root.
std::map<std::string, std::string> tree_bytes(const fs::path &root)
{
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

// ---- 4: ConvLSTM fidelity -------------------------------------------------

Outcome convlstm_fidelity()
{
    const auto oracle = testing::scalar_lstm_oracle(kOracleDraws, 2024);
    const auto zero = testing::zero_parameter_step();
    const double worst = std::max(oracle.max_error_fused, oracle.max_error_reference);
    return {worst <= kLstmOracleTol && zero.zero_state_stays_zero && zero.half_gates,
            "scalar oracle max error " + fmt(worst) + " over " + std::to_string(kOracleDraws) +
                " draws (tol " + fmt(kLstmOracleTol) + "); zero-param step: zero state stays zero " +
                (zero.zero_state_stays_zero ? "yes" : "NO") + ", gates 0.5 " + (zero.half_gates ? "yes" : "NO")};
}

// ---- 5: gradient correctness ----------------------------------------------

ad::Var<double> weighted_sum(ad::Tape<double> &tape, const ad::Var<double> &out, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return ad::sum(ad::mul(out, tape.constant(testing::random_tensor(out.shape(), rng))));
}

Outcome gradient_correctness()
{
    using V = std::vector<ad::Var<double>>;
    using T = ad::Tape<double>;
    std::mt19937_64 rng(5);
    auto rt = [&](ad::Shape s, double lo = -1.0, double hi = 1.0) { return testing::random_tensor(std::move(s), rng, lo, hi); };
    const std::optional<ad::Var<double>> no_bias;

    struct OpCase
    {
        std::string name;
        std::vector<ad::Tensor<double>> inputs;
        testing::LossFn loss;
    };
    std::vector<OpCase> cases;
    cases.push_back({"add", {rt({2, 3, 4}), rt({2, 3, 4})}, [](T &t, const V &v) { return weighted_sum(t, ad::add(v[0], v[1]), 1); }});
    cases.push_back({"sub", {rt({2, 3, 4}), rt({2, 3, 4})}, [](T &t, const V &v) { return weighted_sum(t, ad::sub(v[0], v[1]), 2); }});
    cases.push_back({"mul", {rt({2, 3, 4}), rt({2, 3, 4})}, [](T &t, const V &v) { return weighted_sum(t, ad::mul(v[0], v[1]), 3); }});
    cases.push_back({"scale", {rt({2, 3, 4})}, [](T &t, const V &v) { return weighted_sum(t, ad::scale(v[0], -2.5), 4); }});
    cases.push_back({"sigmoid", {rt({2, 3, 4}, -3, 3)}, [](T &t, const V &v) { return weighted_sum(t, ad::sigmoid(v[0]), 5); }});
    cases.push_back({"tanh", {rt({2, 3, 4}, -3, 3)}, [](T &t, const V &v) { return weighted_sum(t, ad::tanh(v[0]), 6); }});
    cases.push_back({"mse", {rt({2, 3, 4}), rt({2, 3, 4})}, [](T &, const V &v) { return ad::mse(v[0], v[1]); }});
    cases.push_back({"concat", {rt({2, 3, 4}), rt({1, 3, 4})},
                     [](T &t, const V &v) { return weighted_sum(t, ad::concat<double>({v[0], v[1]}, 0), 7); }});
    cases.push_back({"slice", {rt({2, 5, 4})}, [](T &t, const V &v) { return weighted_sum(t, ad::slice(v[0], 1, 1, 3), 8); }});
    cases.push_back({"conv2d", {rt({3, 6, 5}), rt({4, 3, 3, 3}), rt({4})}, [](T &t, const V &v) {
                         return weighted_sum(t, ad::conv2d(v[0], v[1], std::optional<ad::Var<double>>(v[2]), 1), 9);
                     }});
    cases.push_back({"conv2d_nobias", {rt({2, 5, 5}), rt({3, 2, 5, 5})},
                     [no_bias](T &t, const V &v) { return weighted_sum(t, ad::conv2d(v[0], v[1], no_bias, 2), 10); }});
    cases.push_back({"conv_transpose2", {rt({3, 3, 4}), rt({3, 2, 2, 2}), rt({2})}, [](T &t, const V &v) {
                         return weighted_sum(t, ad::conv_transpose2(v[0], v[1], std::optional<ad::Var<double>>(v[2])), 11);
                     }});
    cases.push_back({"max_pool2", {rt({2, 4, 6})}, [](T &t, const V &v) { return weighted_sum(t, ad::max_pool2(v[0]), 12); }});
    cases.push_back({"lstm_pointwise", {rt({8, 3, 3}, -2, 2), rt({2, 3, 3})},
                     [](T &t, const V &v) { return weighted_sum(t, ad::lstm_pointwise(v[0], v[1]), 13); }});

    double worst_op = 0.0;
    std::string worst_name;
    for (auto &c : cases)
    {
        const GradCheck r = testing::check_gradients(c.inputs, c.loss);
        if (r.max_rel_error >= worst_op)
        {
            worst_op = r.max_rel_error;
            worst_name = c.name;
        }
    }

    const GradCheck e2e = testing::forecaster_gradient_check(8, 3, 2, ChannelPlan{2, 3, 3}, 21);
    const double kink_fraction = static_cast<double>(e2e.kinks) / static_cast<double>(e2e.checked + e2e.kinks);
    const bool pass = worst_op < kPerOpGradTol && e2e.max_rel_error < kEndToEndGradTol &&
                      kink_fraction <= kMaxKinkFraction && e2e.checked > 0;
    return {pass, "end-to-end (8x8, Tc=3, Tp=2) max rel " + fmt(e2e.max_rel_error) + " < " + fmt(kEndToEndGradTol) +
                      " over " + std::to_string(e2e.checked) + " params, " + std::to_string(e2e.kinks) +
                      " pooling kinks skipped (<= " + fmt(100 * kMaxKinkFraction) + "%); per-op worst " +
                      fmt(worst_op) + " (" + worst_name + ") < " + fmt(kPerOpGradTol) + " over " +
                      std::to_string(cases.size()) + " ops"};
}

// ---- 6: post-processing bit-exactness -------------------------------------

struct EndpointResult
{
    bool pass = true;
    std::string failures;
};

EndpointResult postprocessing_endpoints()
{
    EndpointResult r;
    auto expect = [&](bool ok, const std::string &what) {
        if (!ok)
        {
            r.pass = false;
            r.failures += " " + what;
        }
    };
    expect(normalize_db(-135.0) == 0.0, "normalize(-135)");
    expect(normalize_db(-39.5) == 1.0, "normalize(-39.5)");
    expect(quantize_8bit(0.5) == 127, "quantize(0.5)");
    const std::vector<SamplePoint> lo{{1.0, 1.0, 7.0}}, hi{{256.0, 256.0, 9.0}};
    const auto glo = rasterize_points(lo, 256), ghi = rasterize_points(hi, 256);
    expect(glo[0] == 7.0 && std::count(glo.begin(), glo.end(), 0.0) == 256 * 256 - 1, "rasterize(1.0)");
    expect(ghi[255 * 256 + 255] == 9.0 && std::count(ghi.begin(), ghi.end(), 0.0) == 256 * 256 - 1,
           "rasterize(256.0)");
    return r;
}

// Every png pixel against quantize(normalize(raw)) recomputed here.
Outcome png_matches_raw(const PipelineConfig &config, const EndpointResult &endpoints)
{
    const Layout layout{config.output_root};
    std::size_t frames = 0, pixels = 0, mismatches = 0;
    for (const auto &[key, tag] : read_index_csv(layout.index()))
        for (int f = 0; f < kFramesPerSequence; ++f)
        {
            const fs::path rel = sequence_dir(key) / frame_file_stem(f);
            std::uint32_t rows = 0, cols = 0;
            const auto raw = read_rmm(layout.dataset() / "raw" / rel.string().append(".rmm"), &rows, &cols);
            const GrayImage png = read_png(layout.dataset() / "png" / rel.string().append(".png"));
            ++frames;
            if (png.pixels.size() != raw.size() || rows != static_cast<std::uint32_t>(config.env.size))
            {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < raw.size(); ++i)
            {
                const double norm = (std::clamp(static_cast<double>(raw[i]), config.clip.min_db, config.clip.max_db) -
                                     config.clip.min_db) /
                                    (config.clip.max_db - config.clip.min_db);
                const int expected = norm >= 1.0 ? 255 : static_cast<int>(std::floor(norm * 255.0));
                mismatches += png.pixels[i] != expected;
                ++pixels;
            }
        }
    return {endpoints.pass && mismatches == 0 && frames > 0,
            std::string("endpoints ") + (endpoints.pass ? "exact" : "FAILED:" + endpoints.failures) + "; " +
                std::to_string(mismatches) + " mismatching pixels over " + std::to_string(frames) + " frames (" +
                std::to_string(pixels) + " pixels)"};
}

// ---- 7: solver oracle ------------------------------------------------------

Outcome solver_oracle()
{
    double worst = 0.0;
    int scenes = 0;
    for (std::uint64_t seed = 0; seed < 24; ++seed)
    {
        const int n = seed % 3 == 0 ? 12 : 16;
        const SceneSnapshot s = testing::random_scene(seed + 5000, n, seed % 2 ? 0.25 : 0.4);
        const RadioMap map = compute_radio_map(s);
        const auto oracle = testing::oracle_map(s, 2 * n);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            worst = std::max(worst, std::abs(map.values_db[i] - oracle[i]));
        ++scenes;
    }

    // Empty scene against 23 dBm - 20 log10(4 pi d f / c), d clamped at 0.5 m.
    SceneSnapshot empty;
    empty.env = EnvironmentGrid(16, 1.0, 0, CellKind::Road);
    empty.tx = {5, 9};
    const RadioMap free_map = compute_radio_map(empty);
    const double c = 299792458.0;
    double worst_fspl = 0.0;
    for (int r = 0; r < 16; ++r)
        for (int col = 0; col < 16; ++col)
        {
            const double d = std::max(0.5, std::hypot(col - empty.tx.col, r - empty.tx.row));
            const double expected =
                empty.params.tx_power_dbm - 20.0 * std::log10(4.0 * std::numbers::pi * d * empty.params.frequency_hz / c);
            worst_fspl = std::max(worst_fspl, std::abs(free_map.at(col, r) - expected));
        }
    const double spot = free_space_gain(10.0, 3.5e9, 23.0);
    const bool pass = worst <= kSolverOracleTol && worst_fspl <= kFsplTol && std::abs(spot - -40.32) <= kFsplSpotTol;
    return {pass, "max |solver - oracle| " + fmt(worst) + " dB over " + std::to_string(scenes) +
                      " scenes <= 16x16 (tol " + fmt(kSolverOracleTol) + "); empty-scene FSPL max dev " +
                      fmt(worst_fspl) + " dB (tol " + fmt(kFsplTol) + "); d=10 m -> " + fmt(spot, 6) +
                      " dBm (-40.32 +/- " + fmt(kFsplSpotTol) + ")"};
}

// ---- 8: trajectory invariants ----------------------------------------------

// Interior sample points of a footprint, kept off the rectangle edges.
std::vector<Vec2> footprint_samples(const VehicleState &v)
{
    std::vector<Vec2> pts;
    const Vec2 along = unit_vector(v.heading), across = unit_vector(v.heading + 0.5 * std::numbers::pi);
    constexpr int nl = 40, nw = 20;
    for (int a = 0; a < nl; ++a)
        for (int b = 0; b < nw; ++b)
        {
            const double s = ((a + 0.5) / nl - 0.5) * v.length, t = ((b + 0.5) / nw - 0.5) * v.width;
            pts.push_back(v.position + along * s + across * t);
        }
    return pts;
}

bool point_in_footprint(const VehicleState &v, Vec2 p)
{
    const Vec2 d = p - v.position;
    const double c = std::cos(v.heading), s = std::sin(v.heading);
    const double lx = c * d.x + s * d.y, ly = -s * d.x + c * d.y;
    return std::abs(lx) < 0.5 * v.length && std::abs(ly) < 0.5 * v.width;
}

Outcome trajectory_invariants()
{
    const MotionRules rules;
    const VehicleSpec spec;
    long collisions = 0, building_overlaps = 0, heading_violations = 0, spacing_violations = 0, steps = 0;
    double worst_excess = -INFINITY;
    for (int seed = 0; seed < kTrajectorySeeds; ++seed)
    {
        const EnvironmentGrid env = generate_environment(static_cast<std::uint64_t>(seed), EnvParams{}, seed);
        const auto initial = seed_vehicles(env, 10, 10000 + static_cast<std::uint64_t>(seed), spec, rules).vehicles;
        for (std::size_t i = 0; i < initial.size(); ++i)
            for (std::size_t j = i + 1; j < initial.size(); ++j)
                spacing_violations += (initial[i].position - initial[j].position).norm() <
                                      rules.spacing_in_lengths * spec.length;

        const Trajectory t = simulate_trajectory(env, initial, kFramesPerSequence, 0, rules);
        for (std::size_t f = 0; f < t.frames.size(); ++f)
        {
            const auto &vs = t.frames[f];
            for (std::size_t i = 0; i < vs.size(); ++i)
            {
                const auto samples = footprint_samples(vs[i]);
                bool over_building = false;
                for (const Vec2 &p : samples)
                {
                    const Cell c{static_cast<int>(std::floor(p.x / env.resolution())),
                                 static_cast<int>(std::floor(p.y / env.resolution()))};
                    over_building |= !env.in_bounds(c) || env.is_building(c);
                }
                building_overlaps += over_building;
                for (std::size_t j = i + 1; j < vs.size(); ++j)
                {
                    bool hit = rects_overlap(vs[i].footprint(), vs[j].footprint());
                    for (const Vec2 &p : samples)
                        hit |= point_in_footprint(vs[j], p);
                    collisions += hit;
                }
                if (f == 0)
                    continue;
                const VehicleState &prev = t.frames[f - 1][i];
                const auto target = select_target(env, prev, rules);
                const double delta = target ? std::abs(wrap_pi(target->heading - prev.heading)) : 0.0;
                const double turned = std::abs(wrap_pi(vs[i].heading - prev.heading));
                const double excess = turned - rules.smoothing * delta;
                worst_excess = std::max(worst_excess, excess);
                heading_violations += excess > kHeadingSlack;
                ++steps;
            }
        }
    }
    const bool pass = collisions == 0 && building_overlaps == 0 && heading_violations == 0 && spacing_violations == 0;
    return {pass, std::to_string(kTrajectorySeeds) + " seeds x " + std::to_string(kFramesPerSequence) +
                      " frames (" + std::to_string(steps) + " vehicle steps): collisions " +
                      std::to_string(collisions) + ", building overlaps " + std::to_string(building_overlaps) +
                      ", heading violations " + std::to_string(heading_violations) + " (worst excess " +
                      fmt(worst_excess) + " rad, slack " + fmt(kHeadingSlack) + "), spacing violations " +
                      std::to_string(spacing_violations)};
}

// ---- 9: dataset structure --------------------------------------------------

Outcome dataset_structure(const PipelineConfig &config)
{
    const Layout layout{config.output_root};
    auto count = [](const fs::path &root, const std::string &ext) {
        long n = 0;
        for (const auto &e : fs::recursive_directory_iterator(root))
            n += e.is_regular_file() && e.path().extension() == ext;
        return n;
    };
    const long expected_files = static_cast<long>(config.n_envs) * config.n_trajs * config.n_tx * kFramesPerSequence;
    const long raw = count(layout.dataset() / "raw", ".rmm"), png = count(layout.dataset() / "png", ".png");

    // Expected partition, derived here from the split rule.
    const int held_out = static_cast<int>(std::ceil(config.n_envs / 6.0));
    const auto index = read_index_csv(layout.index());
    bool exact = index.size() == static_cast<std::size_t>(config.n_envs * config.n_trajs * config.n_tx);
    std::set<int> test2_envs, other_envs;
    for (const auto &[key, tag] : index)
    {
        SplitTag expected = SplitTag::Train;
        if (key.env_id >= config.n_envs - held_out)
            expected = SplitTag::Test2;
        else if (key.traj_id == config.n_trajs - 2)
            expected = SplitTag::Val;
        else if (key.traj_id == config.n_trajs - 1)
            expected = SplitTag::Test1;
        exact &= tag == expected;
        (tag == SplitTag::Test2 ? test2_envs : other_envs).insert(key.env_id);
    }
    std::vector<int> shared;
    std::set_intersection(test2_envs.begin(), test2_envs.end(), other_envs.begin(), other_envs.end(),
                          std::back_inserter(shared));

    PipelineConfig full = config;
    full.n_envs = 300;
    full.n_trajs = 5;
    full.n_tx = 20;
    std::map<SplitTag, int> counts;
    for (const auto &[key, tag] : build_index(full))
        ++counts[tag];
    const bool full_ok = counts[SplitTag::Train] == 15000 && counts[SplitTag::Val] == 5000 &&
                          counts[SplitTag::Test1] == 5000 && counts[SplitTag::Test2] == 5000;

    const bool pass = raw == expected_files && png == expected_files && exact && shared.empty() && full_ok;
    return {pass, "raw " + std::to_string(raw) + " / png " + std::to_string(png) + " files (expected " +
                      std::to_string(expected_files) + "); partition " + (exact ? "exact" : "WRONG") +
                      ", test2 envs shared with other splits: " + std::to_string(shared.size()) +
                      "; full-scale index " + std::to_string(counts[SplitTag::Train]) + "/" +
                      std::to_string(counts[SplitTag::Val]) + "/" + std::to_string(counts[SplitTag::Test1]) + "/" +
                      std::to_string(counts[SplitTag::Test2])};
}

// ---- 10: metrics sanity ----------------------------------------------------

Outcome metrics_sanity()
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<float> u(0.05f, 1.0f);
    Frame gt(32);
    for (float &v : gt.values)
        v = u(rng);
    const Frame zeros(32, 0.0f);
    const double n_same = nmse(gt.values, gt.values);
    const double n_zero = nmse(zeros.values, gt.values);
    const double s_same = ssim(gt, gt);
    const double p = psnr_from_mse(0.01);

    const auto x = testing::ar_series(20000, 0.8, 0.0, 3);
    const auto phi = pacf(x, 10); // phi[k - 1] is lag k
    double beyond = 0.0;
    for (std::size_t k = 1; k < phi.size(); ++k)
        beyond = std::max(beyond, std::abs(phi[k]));

    const bool pass = n_same == 0.0 && std::abs(n_zero - 1.0) <= kMetricTol && std::abs(s_same - 1.0) <= kMetricTol &&
                      std::abs(p - 20.0) <= kPsnrTol && phi.size() == 10 && std::abs(phi[0] - 0.8) <= kPacfLag1Tol &&
                      beyond < kPacfHigherLagTol;
    return {pass, "nmse(gt,gt) " + fmt(n_same) + ", nmse(0,gt) " + fmt(n_zero, 15) + ", ssim(x,x) " +
                      fmt(s_same, 15) + ", psnr(mse 0.01) " + fmt(p, 15) + " dB; AR(1) phi=0.8 pacf lag1 " +
                      fmt(phi[0]) + " (+/- " + fmt(kPacfLag1Tol) + "), max |lag 2..10| " + fmt(beyond) + " < " +
                      fmt(kPacfHigherLagTol)};
}

// ---- pipeline-based criteria ----------------------------------------------

const MetricsRecord &find_record(const std::vector<MetricsRecord> &records, const std::string &model,
                                 const std::string &split)
{
    for (const auto &r : records)
        if (r.model == model && r.split == split)
            return r;
    throw std::runtime_error("no " + model + " record on " + split);
}

Outcome ordering(const std::vector<MetricsRecord> &records)
{
    const double l1 = find_record(records, "radiolstm", "test1").aggregate.nmse;
    const double b1 = find_record(records, "last_frame_repeat", "test1").aggregate.nmse;
    const double l2 = find_record(records, "radiolstm", "test2").aggregate.nmse;
    const double b2 = find_record(records, "last_frame_repeat", "test2").aggregate.nmse;
    const double gain = 1.0 - l1 / b1;
    return {gain >= kMinRelativeGain && l2 < b2,
            "test1 nmse radiolstm " + fmt(l1) + " vs last-frame " + fmt(b1) + " (relative gain " + fmt(gain, 3) +
                " >= " + fmt(kMinRelativeGain) + "); test2 " + fmt(l2) + " vs " + fmt(b2)};
}

Outcome error_accumulation(const std::vector<MetricsRecord> &records)
{
    bool pass = true;
    std::string detail;
    for (const std::string split : {"test1", "test2"})
    {
        const auto &pf = find_record(records, "radiolstm", split).per_frame;
        const bool ok = pf.size() >= 2 && pf.back().nmse > pf.front().nmse;
        pass &= ok;
        detail += (detail.empty() ? "" : "; ") + split + " per-frame nmse";
        for (const auto &m : pf)
            detail += " " + fmt(m.nmse, 3);
    }
    return {pass, detail + " (last > first required)"};
}

Outcome context_ablation(const std::vector<AblationEntry> &entries)
{
    const AblationEntry *short_ctx = nullptr, *long_ctx = nullptr;
    for (const auto &e : entries)
    {
        if (e.context == 2)
            short_ctx = &e;
        if (e.context == 10)
            long_ctx = &e;
    }
    if (!short_ctx || !long_ctx)
        return {false, "ablation did not produce Tc=2 and Tc=10"};
    const bool same_targets = short_ctx->target_digest == long_ctx->target_digest &&
                              short_ctx->record.pairs == long_ctx->record.pairs;
    const double n10 = long_ctx->record.aggregate.nmse, n2 = short_ctx->record.aggregate.nmse;
    return {same_targets && n10 <= n2, "test2 nmse Tc=10 " + fmt(n10) + " <= Tc=2 " + fmt(n2) + "; targets " +
                                           (same_targets ? "identical" : "DIFFER") + " (" +
                                           std::to_string(long_ctx->record.pairs) + " pairs)"};
}

Outcome determinism(const PipelineConfig &a, const PipelineConfig &b)
{
    const Layout la{a.output_root}, lb{b.output_root};
    const auto ta = tree_bytes(la.dataset()), tb = tree_bytes(lb.dataset());
    std::size_t differing = ta.size() == tb.size() ? 0 : std::max(ta.size(), tb.size());
    if (differing == 0)
        for (const auto &[path, bytes] : ta)
        {
            const auto it = tb.find(path);
            differing += it == tb.end() || it->second != bytes;
        }
    const bool index_same = slurp(la.index()) == slurp(lb.index());
    const bool results_same = slurp(la.results() / "results.csv") == slurp(lb.results() / "results.csv");
    const bool history_same =
        slurp(la.models() / "radiolstm" / "history.csv") == slurp(lb.models() / "radiolstm" / "history.csv");
    return {differing == 0 && index_same && results_same && history_same,
            std::to_string(ta.size()) + " dataset files, " + std::to_string(differing) + " differ; index.csv " +
                (index_same ? "identical" : "DIFFERS") + "; results.csv " + (results_same ? "identical" : "DIFFERS") +
                "; training history " + (history_same ? "identical" : "DIFFERS")};
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"radiomotion acceptance suite"};
    fs::path config_path, work_dir = "acceptance_runs";
    std::vector<int> only;
    app.add_option("--config", config_path, "Desk-scale pipeline config")->required()->check(CLI::ExistingFile);
    app.add_option("--work-dir", work_dir, "Scratch directory for the pipeline runs (wiped first)");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    std::map<int, std::pair<std::string, Outcome>> results;
    auto run = [&](int id, const std::string &name, const std::function<Outcome()> &fn) {
        if (!wanted(id))
            return;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << id << "] " << name << ": " << o.detail
                  << " (" << std::fixed << std::setprecision(1) << s << " s)" << std::defaultfloat << std::endl;
        results[id] = {name, o};
    };

    run(4, "convlstm fidelity", convlstm_fidelity);
    run(5, "gradient correctness", gradient_correctness);
    run(7, "solver oracle", solver_oracle);
    run(8, "trajectory invariants", trajectory_invariants);
    run(10, "metrics sanity", metrics_sanity);

    const bool need_run_a = wanted(1) || wanted(2) || wanted(3) || wanted(6) || wanted(9) || wanted(11);
    const bool need_model = wanted(1) || wanted(2) || wanted(3) || wanted(11);
    if (need_run_a)
    {
        PipelineConfig a = PipelineConfig::load(config_path);
        a.output_root = work_dir / "run_a";
        a.ablation_contexts = {2, 10};
        PipelineConfig b = a;
        b.output_root = work_dir / "run_b";

        RunOptions opts;
        opts.log = [](const std::string &msg) { std::cerr << "  | " << msg << std::endl; };
        fs::remove_all(work_dir);

        std::string setup_error;
        std::vector<MetricsRecord> records;
        try
        {
            cmd_generate(a, opts);
            if (need_model)
            {
                cmd_train(a, ModelKind::RadioLSTM, opts);
                records = cmd_evaluate(a, opts);
            }
        }
        catch (const std::exception &e)
        {
            setup_error = e.what();
        }
        auto guarded = [&](const std::function<Outcome()> &fn) {
            return [&, fn]() -> Outcome {
                if (!setup_error.empty())
                    return {false, "pipeline run failed: " + setup_error};
                return fn();
            };
        };

        run(1, "ordering vs last-frame repeat", guarded([&] { return ordering(records); }));
        run(2, "error accumulation", guarded([&] { return error_accumulation(records); }));
        run(3, "context-length ablation", guarded([&] { return context_ablation(cmd_ablate(a, opts)); }));
        run(6, "post-processing bit-exactness", guarded([&] { return png_matches_raw(a, postprocessing_endpoints()); }));
        run(9, "dataset structure", guarded([&] { return dataset_structure(a); }));
        run(11, "determinism", guarded([&] {
                cmd_generate(b, opts);
                cmd_train(b, ModelKind::RadioLSTM, opts);
                cmd_evaluate(b, opts);
                return determinism(a, b);
            }));
    }

    int failed = 0;
    for (const auto &[id, r] : results)
        failed += !r.second.pass;
    std::cout << (failed == 0 ? "PASS" : "FAIL") << " acceptance: " << results.size() - failed << "/"
              << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
