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

#include "radiomotion/image_io.hpp"
#include "radiomotion/pathloss.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace radiomotion
{

inline constexpr int kFramesPerSequence = 15;

struct ClipRange
{
    double min_db = -135.0;
    double max_db = -39.5;
};

// Square grid of single-precision values, row-major (row = y, col = x).
struct Frame
{
    int size = 0;
    std::vector<float> values;

    Frame() = default;
    explicit Frame(int n, float fill = 0.0f) : size(n), values(static_cast<std::size_t>(n) * n, fill) {}
    float at(int row, int col) const { return values[static_cast<std::size_t>(row) * size + col]; }
    float &at(int row, int col) { return values[static_cast<std::size_t>(row) * size + col]; }
    bool operator==(const Frame &) const = default;
};

struct SamplePoint
{
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

// Maps continuous coordinates to cells by i = ceil(x) - 1 (column) and
// j = ceil(y) - 1 (row). Unvisited cells stay zero; later points overwrite
// earlier ones. Throws std::out_of_range for coordinates outside (0, n].
std::vector<double> rasterize_points(std::span<const SamplePoint> points, int n);

// Clip to the range, then scale linearly onto [0, 1]. NaN throws.
double normalize_db(double p_db, const ClipRange &clip = {});

// floor(norm * 255); 1.0 maps to 255. Values outside [0, 1] throw.
std::uint8_t quantize_8bit(double norm);

// Flat little-endian grid: "RMM1", u32 rows, u32 cols, rows*cols float32 row-major.
void write_rmm(const std::filesystem::path &path, std::uint32_t rows, std::uint32_t cols, std::span<const float> data);
std::vector<float> read_rmm(const std::filesystem::path &path, std::uint32_t *rows = nullptr,
                            std::uint32_t *cols = nullptr);

enum class SplitTag
{
    Train,
    Val,
    Test1,
    Test2
};

std::string to_string(SplitTag tag);
SplitTag parse_split_tag(const std::string &text);

struct SequenceKey
{
    int env_id = 0;
    int traj_id = 0;
    int tx_id = 0;
    auto operator<=>(const SequenceKey &) const = default;
};

struct SequenceRecord
{
    SequenceKey key;
    std::vector<RadioMap> frames; // exactly kFramesPerSequence
    SplitTag split = SplitTag::Train;
};

struct SequencePair
{
    std::vector<Frame> context; // normalised, oldest first
    std::vector<Frame> target;
    SequenceKey source;
    int start = 0; // frame index of context[0] in the source sequence
};

struct ExportOptions
{
    ClipRange clip;
    bool force = false; // overwrite existing files
};

std::filesystem::path sequence_dir(const SequenceKey &key);            // env_XXX/traj_XX/tx_XX
std::string frame_file_stem(int frame_index);                          // frame_FF

// Writes raw/<seq>/frame_FF.rmm and png/<seq>/frame_FF.png under `root`.
// Returns the written paths (raw first, then png).
std::vector<std::filesystem::path> export_sequence(const SequenceRecord &record, const std::filesystem::path &root,
                                                   const ExportOptions &options = {});

// Normalises one stored raw frame the way the png is produced.
Frame normalize_frame(std::span<const float> raw_db, int n, const ClipRange &clip = {});
GrayImage quantize_frame(const Frame &normalized);

struct SplitConfig
{
    int n_envs = 0;
    int n_trajs = 0;
    double held_out_env_fraction = 1.0 / 6.0;
};

// Number of trailing environments reserved for the unseen-environment split.
int held_out_env_count(const SplitConfig &config);

// The last held-out environments go entirely to Test2; elsewhere trajectories
// [0, n-2) train, n-2 validates, n-1 is Test1.
std::map<SequenceKey, SplitTag> split_dataset(std::span<const SequenceKey> index, const SplitConfig &config);

// Target is always the last `horizon` frames; context the `context` frames
// immediately before it.
SequencePair make_pairs(std::span<const Frame> frames, int context, int horizon, SequenceKey source = {});

// CSV with header env_id,traj_id,tx_id,split_tag.
void write_index_csv(const std::filesystem::path &path, const std::map<SequenceKey, SplitTag> &index);
std::map<SequenceKey, SplitTag> read_index_csv(const std::filesystem::path &path);

// Reads the raw frames of one sequence and normalises them.
std::vector<Frame> load_sequence(const std::filesystem::path &root, const SequenceKey &key,
                                 const ClipRange &clip = {});

} // namespace radiomotion
