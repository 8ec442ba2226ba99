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

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace radiomotion
{

// Grid cell address. Cell (col, row) covers [col, col+1) x [row, row+1) in
// cell units; world x runs along columns and y along rows.
struct Cell
{
    int col = 0;
    int row = 0;
    auto operator<=>(const Cell &) const = default;
};

enum class CellKind : std::uint8_t
{
    Ground = 0, // open ground: transparent to signals, not drivable
    Building,
    Road
};

// Static urban layout. Buildings and roads are stored as a single ternary
// raster so the two masks are disjoint by construction.
class EnvironmentGrid
{
  public:
    EnvironmentGrid() = default;
    EnvironmentGrid(int size, double resolution, int env_id, CellKind fill = CellKind::Ground);

    int size() const { return size_; }
    double resolution() const { return resolution_; }
    int env_id() const { return env_id_; }

    bool in_bounds(int col, int row) const { return col >= 0 && row >= 0 && col < size_ && row < size_; }
    bool in_bounds(Cell c) const { return in_bounds(c.col, c.row); }

    CellKind at(int col, int row) const { return cells_[index(col, row)]; }
    CellKind at(Cell c) const { return at(c.col, c.row); }
    void set(int col, int row, CellKind kind) { cells_[index(col, row)] = kind; }

    bool is_building(Cell c) const { return at(c) == CellKind::Building; }
    bool is_road(Cell c) const { return at(c) == CellKind::Road; }

    std::vector<bool> building_mask() const;
    std::vector<bool> road_mask() const;
    std::span<const CellKind> cells() const { return cells_; }

    std::size_t index(int col, int row) const
    {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(col);
    }

    bool operator==(const EnvironmentGrid &) const = default;

  private:
    int size_ = 0;
    double resolution_ = 1.0;
    int env_id_ = 0;
    std::vector<CellKind> cells_;
};

struct IntRange
{
    int min = 0;
    int max = 0;
};

struct EnvParams
{
    int size = 64;
    double resolution = 1.0;
    IntRange block_size{8, 14};
    IntRange street_width{4, 6};
    int max_setback = 1;             // open-ground margin between a block edge and its building
    double split_probability = 0.3;  // chance a long block is split in two by an open-ground gap
};

// Rectangular building blocks separated by streets. The outermost rows and
// columns are always streets, so the road network contains the perimeter ring.
// Throws std::invalid_argument when the parameters admit no street layout.
EnvironmentGrid generate_environment(std::uint64_t seed, const EnvParams &params, int env_id = 0);

// Road cells in row-major order.
std::vector<Cell> drivable_cells(const EnvironmentGrid &env);

struct RasterCoding
{
    std::uint8_t building_value = 0;
    std::uint8_t road_value = 128;
    std::uint8_t ground_value = 255;
    bool strict = false; // reject pixels matching none of the three values
};

EnvironmentGrid load_environment(const GrayImage &image, const RasterCoding &coding = {}, int env_id = 0,
                                 double resolution = 1.0);
GrayImage export_environment(const EnvironmentGrid &env, const RasterCoding &coding = {});

} // namespace radiomotion
