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
#include "radiomotion/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace radiomotion
{

struct VehicleState
{
    Vec2 position;        // metres
    double heading = 0.0; // radians in [0, 2*pi), measured from +x towards +y
    double speed = 1.0;   // metres per frame
    double length = 4.0;
    double width = 2.0;
    int stuck_counter = 0;

    OrientedRect footprint() const { return {position, heading, length, width}; }
    bool operator==(const VehicleState &) const = default;
};

struct Trajectory
{
    std::vector<std::vector<VehicleState>> frames;
    double frame_interval = 0.1; // seconds
    int traj_id = 0;
};

struct VehicleSpec
{
    double speed = 1.0;
    double length = 4.0;
    double width = 2.0;
};

// Constants of the navigation and smoothing rules.
struct MotionRules
{
    double spacing_in_lengths = 4.0;   // minimum seeding distance between centres
    double lookahead_in_lengths = 1.5; // probe distance
    double lookahead_window = 0.5;     // cells searched either side of the ideal probe point
    double smoothing = 0.4;            // fraction of the heading error corrected per frame
    int stuck_threshold = 3;           // wide probing once stuck for more than this many frames
};

struct SeedResult
{
    std::vector<VehicleState> vehicles;
    bool capacity_warning = false; // fewer vehicles than requested could be placed
};

// Places vehicles on road cells, headings following a clockwise circulation
// around the map centre (as displayed, y pointing down).
SeedResult seed_vehicles(const EnvironmentGrid &env, int count, std::uint64_t rng_seed, const VehicleSpec &spec = {},
                         const MotionRules &rules = {});

enum class ProbeDirection
{
    Straight,
    Plus45,
    Minus45,
    Plus90,
    Minus90
};

struct ProbeCandidate
{
    ProbeDirection direction;
    double heading; // towards the target cell centre, in [0, 2*pi)
    Cell target;
};

// Candidates in probe order (straight, +45, -45, then +90, -90 when wide);
// blocked directions are omitted.
std::vector<ProbeCandidate> probe_directions(const EnvironmentGrid &env, const VehicleState &v, bool wide,
                                             const MotionRules &rules = {});

// Heading the vehicle steers towards this frame; nullopt when every probe is blocked.
std::optional<ProbeCandidate> select_target(const EnvironmentGrid &env, const VehicleState &v,
                                            const MotionRules &rules = {});

// True when the footprint lies on road cells inside the grid and shares no
// cell with any of `others`.
bool footprint_is_free(const EnvironmentGrid &env, const OrientedRect &rect, const std::vector<VehicleState> &others);

// One frame of motion. `others` holds every other vehicle (not `v`).
VehicleState step_vehicle(const EnvironmentGrid &env, const VehicleState &v, const std::vector<VehicleState> &others,
                          const MotionRules &rules = {});

Trajectory simulate_trajectory(const EnvironmentGrid &env, const std::vector<VehicleState> &initial, int num_frames,
                               int traj_id = 0, const MotionRules &rules = {});

// frame_index,vehicle_index,x,y,heading
void write_trajectory_csv(const std::filesystem::path &path, const Trajectory &traj);

} // namespace radiomotion
