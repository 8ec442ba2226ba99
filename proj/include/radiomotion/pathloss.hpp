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

#include "radiomotion/env_model.hpp"
#include "radiomotion/trajectory.hpp"

#include <cstdint>
#include <vector>

namespace radiomotion
{

struct SolverParams
{
    double tx_power_dbm = 23.0;
    double frequency_hz = 3.5e9;
    double tx_height_m = 1.5;
    double rx_height_m = 1.5;
    double diffraction_loss_db = 12.0; // per direction change on a non-line-of-sight path
    double floor_dbm = -135.0;         // value of blocked and unreachable cells
    double min_distance_m = 0.5;       // clamp below which free-space loss is not evaluated
};

// A static environment plus the cells occupied by vehicles in one frame.
struct SceneSnapshot
{
    EnvironmentGrid env;
    std::vector<Cell> vehicle_cells;
    Cell tx;
    SolverParams params;

    // Building or vehicle cell mask, row-major.
    std::vector<std::uint8_t> blocked_mask() const;
};

struct SceneRef
{
    int env_id = 0;
    int traj_id = 0;
    int tx_id = 0;
    int frame_index = 0;
};

struct RadioMap
{
    int size = 0;
    std::vector<double> values_db; // received power in dBm, row-major
    SceneRef scene_ref;

    double at(int col, int row) const { return values_db[static_cast<std::size_t>(row) * size + col]; }
    double at(Cell c) const { return at(c.col, c.row); }
};

// Received power after free-space loss. Distances below the clamp are clamped.
double free_space_gain(double distance_m, double frequency_hz, double tx_power_dbm, double min_distance_m = 0.5);

// Free-space path loss in dB.
double free_space_loss_db(double distance_m, double frequency_hz);

// True when the segment between the two cell centres meets no blocked cell.
// Passing exactly through a lattice corner touches the two side cells as well.
bool line_of_sight(const std::vector<std::uint8_t> &blocked, int size, Cell from, Cell to);

// Dominant-path received power at one receiver cell.
//
// Paths are either the direct ray from the transmitter (line of sight) or a
// ray to some lit cell followed by 8-connected grid moves through free cells
// (no corner cutting). Each direction change, including leaving the ray,
// costs `diffraction_loss_db`. The gain is the best over all paths of
// tx_power - FSPL(path length) - interactions * diffraction_loss_db, floored
// at `floor_dbm`. Blocked receivers get the floor.
double dominant_path_gain(const SceneSnapshot &scene, Cell rx);

// All cells at once from a single expansion; bit-identical to per-cell calls.
RadioMap compute_radio_map(const SceneSnapshot &scene);

// Cells whose centre lies inside any vehicle footprint.
std::vector<Cell> rasterize_vehicles(const std::vector<VehicleState> &frame, const EnvironmentGrid &env);

} // namespace radiomotion
