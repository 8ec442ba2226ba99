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

#include "radiomotion/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radiomotion
{

std::vector<double> rasterize_points(std::span<const SamplePoint> points, int n)
{
    if (n <= 0)
        throw std::invalid_argument("rasterize_points: grid size must be positive");
    std::vector<double> grid(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto &p : points)
    {
        if (!(p.x > 0.0 && p.x <= n && p.y > 0.0 && p.y <= n))
            throw std::out_of_range("rasterize_points: coordinate (" + std::to_string(p.x) + ", " +
                                    std::to_string(p.y) + ") outside (0, " + std::to_string(n) + "]");
        const auto i = static_cast<std::size_t>(std::ceil(p.x)) - 1;
        const auto j = static_cast<std::size_t>(std::ceil(p.y)) - 1;
        grid[j * static_cast<std::size_t>(n) + i] = p.value;
    }
    return grid;
}

double normalize_db(double p_db, const ClipRange &clip)
{
    if (std::isnan(p_db))
        throw std::invalid_argument("normalize_db: NaN input");
    if (!(clip.min_db < clip.max_db))
        throw std::invalid_argument("normalize_db: clip range must be increasing");
    const double clipped = std::max(clip.min_db, std::min(clip.max_db, p_db));
    return (clipped - clip.min_db) / (clip.max_db - clip.min_db);
}

std::uint8_t quantize_8bit(double norm)
{
    if (!(norm >= 0.0 && norm <= 1.0))
        throw std::invalid_argument("quantize_8bit: value " + std::to_string(norm) + " outside [0, 1]");
    if (norm == 1.0)
        return 255;
    return static_cast<std::uint8_t>(std::min(255.0, std::floor(norm * 255.0)));
}

namespace
{
void put_u32(std::ostream &out, std::uint32_t v)
{
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream &in)
{
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char *>(b), 4))
        throw std::runtime_error("RMM1: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
} // namespace

void write_rmm(const std::filesystem::path &path, std::uint32_t rows, std::uint32_t cols, std::span<const float> data)
{
    if (data.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("write_rmm: data size does not match rows x cols");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write("RMM1", 4);
    put_u32(out, rows);
    put_u32(out, cols);
    for (float f : data)
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<float> read_rmm(const std::filesystem::path &path, std::uint32_t *rows, std::uint32_t *cols)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "RMM1")
        throw std::runtime_error("'" + path.string() + "' is not an RMM1 file");
    const std::uint32_t r = get_u32(in);
    const std::uint32_t c = get_u32(in);
    std::vector<float> data(static_cast<std::size_t>(r) * c);
    for (float &f : data)
        f = std::bit_cast<float>(get_u32(in));
    if (rows)
        *rows = r;
    if (cols)
        *cols = c;
    return data;
}

std::string to_string(SplitTag tag)
{
    switch (tag)
    {
    case SplitTag::Train:
        return "train";
    case SplitTag::Val:
        return "val";
    case SplitTag::Test1:
        return "test1";
    case SplitTag::Test2:
        return "test2";
    }
    return "unknown";
}

SplitTag parse_split_tag(const std::string &text)
{
    if (text == "train")
        return SplitTag::Train;
    if (text == "val")
        return SplitTag::Val;
    if (text == "test1")
        return SplitTag::Test1;
    if (text == "test2")
        return SplitTag::Test2;
    throw std::invalid_argument("unknown split tag '" + text + "'");
}

namespace
{
std::string numbered(const char *prefix, int width, int value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
    return buf;
}
} // namespace

std::filesystem::path sequence_dir(const SequenceKey &key)
{
    return std::filesystem::path(numbered("env_", 3, key.env_id)) / numbered("traj_", 2, key.traj_id) /
           numbered("tx_", 2, key.tx_id);
}

std::string frame_file_stem(int frame_index) { return numbered("frame_", 2, frame_index); }

Frame normalize_frame(std::span<const float> raw_db, int n, const ClipRange &clip)
{
    if (raw_db.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("normalize_frame: size mismatch");
    Frame f(n);
    for (std::size_t i = 0; i < raw_db.size(); ++i)
        f.values[i] = static_cast<float>(normalize_db(static_cast<double>(raw_db[i]), clip));
    return f;
}

GrayImage quantize_frame(const Frame &normalized)
{
    GrayImage img(normalized.size, normalized.size);
    for (std::size_t i = 0; i < normalized.values.size(); ++i)
        img.pixels[i] = quantize_8bit(static_cast<double>(normalized.values[i]));
    return img;
}

std::vector<std::filesystem::path> export_sequence(const SequenceRecord &record, const std::filesystem::path &root,
                                                   const ExportOptions &options)
{
    if (record.frames.size() != kFramesPerSequence)
        throw std::invalid_argument("export_sequence: expected " + std::to_string(kFramesPerSequence) +
                                    " frames, got " + std::to_string(record.frames.size()));
    const int n = record.frames.front().size;
    for (const auto &f : record.frames)
        if (f.size != n || f.values_db.size() != static_cast<std::size_t>(n) * n)
            throw std::invalid_argument("export_sequence: frames differ in size");

    const auto rel = sequence_dir(record.key);
    const auto raw_dir = root / "raw" / rel;
    const auto png_dir = root / "png" / rel;

    std::vector<std::filesystem::path> raw_paths, png_paths;
    for (int k = 0; k < kFramesPerSequence; ++k)
    {
        raw_paths.push_back(raw_dir / (frame_file_stem(k) + ".rmm"));
        png_paths.push_back(png_dir / (frame_file_stem(k) + ".png"));
    }
    if (!options.force)
    {
        for (const auto *list : {&raw_paths, &png_paths})
            for (const auto &p : *list)
                if (std::filesystem::exists(p))
                    throw std::runtime_error("export_sequence: '" + p.string() + "' exists (use force to overwrite)");
    }
    std::filesystem::create_directories(raw_dir);
    std::filesystem::create_directories(png_dir);

    std::vector<SamplePoint> points(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < kFramesPerSequence; ++k)
    {
        // Receivers sit at cell centres; aggregate them onto the grid.
        const RadioMap &map = record.frames[static_cast<std::size_t>(k)];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                points[static_cast<std::size_t>(r) * n + c] = {c + 0.5, r + 0.5, map.at(c, r)};
        const auto grid = rasterize_points(points, n);

        std::vector<float> raw(grid.begin(), grid.end());
        write_rmm(raw_paths[static_cast<std::size_t>(k)], static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n),
                  raw);
        write_png(png_paths[static_cast<std::size_t>(k)], quantize_frame(normalize_frame(raw, n, options.clip)));
    }

    std::vector<std::filesystem::path> written = std::move(raw_paths);
    written.insert(written.end(), png_paths.begin(), png_paths.end());
    return written;
}

int held_out_env_count(const SplitConfig &config)
{
    if (config.held_out_env_fraction < 0.0 || config.held_out_env_fraction > 1.0)
        throw std::invalid_argument("split_dataset: held-out fraction must lie in [0, 1]");
    // The epsilon keeps exact products such as 300 * (1/6) from rounding up.
    return static_cast<int>(std::ceil(config.held_out_env_fraction * config.n_envs - 1e-9));
}

std::map<SequenceKey, SplitTag> split_dataset(std::span<const SequenceKey> index, const SplitConfig &config)
{
    if (config.n_trajs < 3)
        throw std::invalid_argument("split_dataset: need at least 3 trajectories per environment");
    if (config.n_envs <= 0)
        throw std::invalid_argument("split_dataset: need at least one environment");
    const int first_held_out = config.n_envs - held_out_env_count(config);

    std::map<SequenceKey, SplitTag> out;
    for (const auto &key : index)
    {
        if (key.env_id < 0 || key.env_id >= config.n_envs || key.traj_id < 0 || key.traj_id >= config.n_trajs)
            throw std::out_of_range("split_dataset: sequence outside the configured env/traj ranges");
        SplitTag tag;
        if (key.env_id >= first_held_out)
            tag = SplitTag::Test2;
        else if (key.traj_id < config.n_trajs - 2)
            tag = SplitTag::Train;
        else if (key.traj_id == config.n_trajs - 2)
            tag = SplitTag::Val;
        else
            tag = SplitTag::Test1;
        out[key] = tag;
    }
    return out;
}

SequencePair make_pairs(std::span<const Frame> frames, int context, int horizon, SequenceKey source)
{
    const int total = static_cast<int>(frames.size());
    if (context < 1 || horizon < 0)
        throw std::invalid_argument("make_pairs: context must be >= 1 and horizon >= 0");
    if (context + horizon > total)
        throw std::invalid_argument("make_pairs: context + horizon = " + std::to_string(context + horizon) +
                                    " exceeds " + std::to_string(total) + " frames");
    SequencePair pair;
    pair.source = source;
    pair.start = total - horizon - context;
    pair.context.assign(frames.begin() + pair.start, frames.begin() + (total - horizon));
    pair.target.assign(frames.begin() + (total - horizon), frames.end());
    return pair;
}

void write_index_csv(const std::filesystem::path &path, const std::map<SequenceKey, SplitTag> &index)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "env_id,traj_id,tx_id,split_tag\n";
    for (const auto &[key, tag] : index)
        out << key.env_id << ',' << key.traj_id << ',' << key.tx_id << ',' << to_string(tag) << '\n';
}

std::map<SequenceKey, SplitTag> read_index_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open index '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line != "env_id,traj_id,tx_id,split_tag")
        throw std::runtime_error("'" + path.string() + "': unexpected index header");
    std::map<SequenceKey, SplitTag> out;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string a, b, c, tag;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            !std::getline(ss, tag))
            throw std::runtime_error("'" + path.string() + "': malformed row '" + line + "'");
        out[{std::stoi(a), std::stoi(b), std::stoi(c)}] = parse_split_tag(tag);
    }
    return out;
}

std::vector<Frame> load_sequence(const std::filesystem::path &root, const SequenceKey &key, const ClipRange &clip)
{
    std::vector<Frame> frames;
    const auto dir = root / "raw" / sequence_dir(key);
    for (int k = 0; k < kFramesPerSequence; ++k)
    {
        std::uint32_t rows = 0, cols = 0;
        const auto raw = read_rmm(dir / (frame_file_stem(k) + ".rmm"), &rows, &cols);
        if (rows != cols)
            throw std::runtime_error("load_sequence: non-square frame in '" + dir.string() + "'");
        frames.push_back(normalize_frame(raw, static_cast<int>(rows), clip));
    }
    return frames;
}

} // namespace radiomotion
