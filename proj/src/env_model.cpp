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

#include "radiomotion/env_model.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace radiomotion
{

EnvironmentGrid::EnvironmentGrid(int size, double resolution, int env_id, CellKind fill)
    : size_(size), resolution_(resolution), env_id_(env_id)
{
    if (size <= 0)
        throw std::invalid_argument("EnvironmentGrid: size must be positive");
    if (!(resolution > 0.0))
        throw std::invalid_argument("EnvironmentGrid: resolution must be positive");
    cells_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), fill);
}

std::vector<bool> EnvironmentGrid::building_mask() const
{
    std::vector<bool> mask(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
        mask[i] = cells_[i] == CellKind::Building;
    return mask;
}

std::vector<bool> EnvironmentGrid::road_mask() const
{
    std::vector<bool> mask(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
        mask[i] = cells_[i] == CellKind::Road;
    return mask;
}

namespace
{

struct Segment
{
    int begin = 0;
    int length = 0;
    bool street = false;
};

// Splits [0, size) into street, block, street, ..., block, street.
std::vector<Segment> partition_axis(int size, const EnvParams &p, std::mt19937_64 &rng)
{
    const auto [bmin, bmax] = p.block_size;
    const auto [smin, smax] = p.street_width;

    std::vector<int> feasible;
    for (int k = 1; k * bmin + (k + 1) * smin <= size; ++k)
        if (k * bmax + (k + 1) * smax >= size)
            feasible.push_back(k);
    if (feasible.empty())
        throw std::invalid_argument("generate_environment: block/street ranges admit no street circuit for size " +
                                    std::to_string(size));

    const int blocks = feasible[std::uniform_int_distribution<std::size_t>(0, feasible.size() - 1)(rng)];
    std::vector<int> lengths;
    std::vector<int> caps;
    for (int i = 0; i < 2 * blocks + 1; ++i)
    {
        const bool street = (i % 2) == 0;
        lengths.push_back(street ? smin : bmin);
        caps.push_back(street ? smax : bmax);
    }

    // Hand out the slack one cell at a time to segments below their cap.
    int slack = size - (blocks * bmin + (blocks + 1) * smin);
    while (slack > 0)
    {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < lengths.size(); ++i)
            if (lengths[i] < caps[i])
                open.push_back(i);
        const std::size_t pick = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
        ++lengths[pick];
        --slack;
    }

    std::vector<Segment> segments;
    int pos = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i)
    {
        segments.push_back({pos, lengths[i], (i % 2) == 0});
        pos += lengths[i];
    }
    return segments;
}

void fill_rect(EnvironmentGrid &env, int c0, int r0, int c1, int r1, CellKind kind)
{
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c)
            env.set(c, r, kind);
}

} // namespace

EnvironmentGrid generate_environment(std::uint64_t seed, const EnvParams &params, int env_id)
{
    const int n = params.size;
    if (n <= 0)
        throw std::invalid_argument("generate_environment: size must be positive");
    if (params.block_size.min <= 0 || params.street_width.min <= 0 || params.block_size.max < params.block_size.min ||
        params.street_width.max < params.street_width.min)
        throw std::invalid_argument("generate_environment: ranges must be positive and ordered");
    if (params.block_size.min >= n || params.street_width.min >= n)
        throw std::invalid_argument("generate_environment: ranges must be smaller than the grid size");
    if (params.max_setback < 0)
        throw std::invalid_argument("generate_environment: max_setback must be non-negative");

    std::mt19937_64 rng(seed);
    const auto cols = partition_axis(n, params, rng);
    const auto rows = partition_axis(n, params, rng);

    EnvironmentGrid env(n, params.resolution, env_id, CellKind::Ground);
    for (const auto &s : cols)
        if (s.street)
            fill_rect(env, s.begin, 0, s.begin + s.length, n, CellKind::Road);
    for (const auto &s : rows)
        if (s.street)
            fill_rect(env, 0, s.begin, n, s.begin + s.length, CellKind::Road);

    std::uniform_int_distribution<int> setback(0, params.max_setback);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto &bc : cols)
    {
        if (bc.street)
            continue;
        for (const auto &br : rows)
        {
            if (br.street)
                continue;
            int c0 = bc.begin + setback(rng);
            int c1 = bc.begin + bc.length - setback(rng);
            int r0 = br.begin + setback(rng);
            int r1 = br.begin + br.length - setback(rng);
            const bool split = unit(rng) < params.split_probability;
            if (c1 - c0 < 2 || r1 - r0 < 2)
                continue;

            // A split leaves a two-cell open-ground gap across the longer side.
            const int w = c1 - c0;
            const int h = r1 - r0;
            if (split && std::max(w, h) >= 8)
            {
                if (w >= h)
                {
                    const int mid = c0 + w / 2;
                    fill_rect(env, c0, r0, mid - 1, r1, CellKind::Building);
                    fill_rect(env, mid + 1, r0, c1, r1, CellKind::Building);
                }
                else
                {
                    const int mid = r0 + h / 2;
                    fill_rect(env, c0, r0, c1, mid - 1, CellKind::Building);
                    fill_rect(env, c0, mid + 1, c1, r1, CellKind::Building);
                }
            }
            else
            {
                fill_rect(env, c0, r0, c1, r1, CellKind::Building);
            }
        }
    }
    return env;
}

std::vector<Cell> drivable_cells(const EnvironmentGrid &env)
{
    std::vector<Cell> out;
    for (int r = 0; r < env.size(); ++r)
        for (int c = 0; c < env.size(); ++c)
            if (env.at(c, r) == CellKind::Road)
                out.push_back({c, r});
    return out;
}

EnvironmentGrid load_environment(const GrayImage &image, const RasterCoding &coding, int env_id, double resolution)
{
    if (image.width != image.height)
        throw std::invalid_argument("load_environment: image must be square, got " + std::to_string(image.width) +
                                    "x" + std::to_string(image.height));
    EnvironmentGrid env(image.width, resolution, env_id);
    for (int r = 0; r < image.height; ++r)
    {
        for (int c = 0; c < image.width; ++c)
        {
            const std::uint8_t v = image.at(r, c);
            if (v == coding.building_value)
                env.set(c, r, CellKind::Building);
            else if (v == coding.road_value)
                env.set(c, r, CellKind::Road);
            else if (v == coding.ground_value || !coding.strict)
                env.set(c, r, CellKind::Ground);
            else
                throw std::invalid_argument("load_environment: unknown pixel value " + std::to_string(v) + " at (" +
                                            std::to_string(r) + ", " + std::to_string(c) + ")");
        }
    }
    return env;
}

GrayImage export_environment(const EnvironmentGrid &env, const RasterCoding &coding)
{
    GrayImage image(env.size(), env.size());
    for (int r = 0; r < env.size(); ++r)
    {
        for (int c = 0; c < env.size(); ++c)
        {
            switch (env.at(c, r))
            {
            case CellKind::Building:
                image.at(r, c) = coding.building_value;
                break;
            case CellKind::Road:
                image.at(r, c) = coding.road_value;
                break;
            case CellKind::Ground:
                image.at(r, c) = coding.ground_value;
                break;
            }
        }
    }
    return image;
}

} // namespace radiomotion
