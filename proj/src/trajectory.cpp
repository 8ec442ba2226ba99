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

#include "radiomotion/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace radiomotion
{

namespace
{

constexpr double kPi = std::numbers::pi;

Cell cell_of(Vec2 p, double resolution)
{
    return {static_cast<int>(std::floor(p.x / resolution)), static_cast<int>(std::floor(p.y / resolution))};
}

Vec2 center_of(Cell c, double resolution) { return {(c.col + 0.5) * resolution, (c.row + 0.5) * resolution}; }

bool road_at(const EnvironmentGrid &env, Cell c) { return env.in_bounds(c) && env.is_road(c); }

int run_length(const EnvironmentGrid &env, Cell c, int dc, int dr)
{
    int n = 0;
    for (Cell k{c.col + dc, c.row + dr}; road_at(env, k); k = {k.col + dc, k.row + dr})
        ++n;
    return n;
}

// Axis-aligned heading along the local street, signed to follow a clockwise
// loop around the map centre.
double clockwise_heading(const EnvironmentGrid &env, Cell c)
{
    const double half = 0.5 * env.size() * env.resolution();
    const Vec2 p = center_of(c, env.resolution());
    const Vec2 r{p.x - half, p.y - half};
    // Clockwise tangent on screen (y down) is (-r.y, r.x).
    const Vec2 tangent{-r.y, r.x};

    const int horizontal = run_length(env, c, 1, 0) + run_length(env, c, -1, 0);
    const int vertical = run_length(env, c, 0, 1) + run_length(env, c, 0, -1);
    if (horizontal >= vertical)
        return tangent.x >= 0.0 ? 0.0 : kPi;
    return tangent.y >= 0.0 ? 0.5 * kPi : 1.5 * kPi;
}

double probe_offset(ProbeDirection d)
{
    switch (d)
    {
    case ProbeDirection::Straight:
        return 0.0;
    case ProbeDirection::Plus45:
        return 0.25 * kPi;
    case ProbeDirection::Minus45:
        return -0.25 * kPi;
    case ProbeDirection::Plus90:
        return 0.5 * kPi;
    case ProbeDirection::Minus90:
        return -0.5 * kPi;
    }
    return 0.0;
}

// Every sample along the segment falls on a road cell.
bool segment_on_road(const EnvironmentGrid &env, Vec2 a, Vec2 b)
{
    const double res = env.resolution();
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.25 * res))));
    for (int i = 0; i <= steps; ++i)
    {
        const Vec2 p = a + (b - a) * (static_cast<double>(i) / steps);
        if (!road_at(env, cell_of(p, res)))
            return false;
    }
    return true;
}

} // namespace

SeedResult seed_vehicles(const EnvironmentGrid &env, int count, std::uint64_t rng_seed, const VehicleSpec &spec,
                         const MotionRules &rules)
{
    if (count < 0)
        throw std::invalid_argument("seed_vehicles: count must be non-negative");
    SeedResult result;
    if (count == 0)
        return result;

    auto candidates = drivable_cells(env);
    if (candidates.empty())
        throw std::invalid_argument("seed_vehicles: environment has no drivable cells");

    std::mt19937_64 rng(rng_seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);

    const double min_spacing = rules.spacing_in_lengths * spec.length;
    for (const Cell &c : candidates)
    {
        if (static_cast<int>(result.vehicles.size()) == count)
            break;
        VehicleState v;
        v.position = center_of(c, env.resolution());
        v.heading = clockwise_heading(env, c);
        v.speed = spec.speed;
        v.length = spec.length;
        v.width = spec.width;

        const bool spaced = std::all_of(result.vehicles.begin(), result.vehicles.end(), [&](const VehicleState &o) {
            return (o.position - v.position).norm() >= min_spacing;
        });
        if (spaced && footprint_is_free(env, v.footprint(), result.vehicles))
            result.vehicles.push_back(v);
    }
    result.capacity_warning = static_cast<int>(result.vehicles.size()) < count;
    return result;
}

std::vector<ProbeCandidate> probe_directions(const EnvironmentGrid &env, const VehicleState &v, bool wide,
                                             const MotionRules &rules)
{
    static constexpr ProbeDirection order[] = {ProbeDirection::Straight, ProbeDirection::Plus45,
                                               ProbeDirection::Minus45, ProbeDirection::Plus90,
                                               ProbeDirection::Minus90};
    const double res = env.resolution();
    const double lookahead = rules.lookahead_in_lengths * v.length;
    const double window = rules.lookahead_window * res;
    // Ideal point first, then the near and far edges of the search window.
    const double offsets[] = {0.0, -window, window};

    std::vector<ProbeCandidate> out;
    const int n = wide ? 5 : 3;
    for (int k = 0; k < n; ++k)
    {
        const double angle = v.heading + probe_offset(order[k]);
        const Vec2 dir = unit_vector(angle);
        for (double off : offsets)
        {
            const Vec2 point = v.position + dir * (lookahead + off);
            const Cell target = cell_of(point, res);
            if (!road_at(env, target) || !segment_on_road(env, v.position, point))
                continue;
            const Vec2 to = center_of(target, res) - v.position;
            out.push_back({order[k], wrap_two_pi(std::atan2(to.y, to.x)), target});
            break;
        }
    }
    return out;
}

std::optional<ProbeCandidate> select_target(const EnvironmentGrid &env, const VehicleState &v,
                                            const MotionRules &rules)
{
    const bool wide = v.stuck_counter > rules.stuck_threshold;
    const auto candidates = probe_directions(env, v, wide, rules);
    std::optional<ProbeCandidate> best;
    double best_cos = -2.0;
    for (const auto &c : candidates)
    {
        // Earlier probes win ties; the margin absorbs rounding in the wrapped angles.
        const double cs = std::cos(c.heading - v.heading);
        if (cs > best_cos + 1e-12)
        {
            best = c;
            best_cos = cs;
        }
    }
    return best;
}

bool footprint_is_free(const EnvironmentGrid &env, const OrientedRect &rect, const std::vector<VehicleState> &others)
{
    bool outside = false;
    const auto cells = covered_cells(rect, env.size(), env.resolution(), &outside);
    if (outside)
        return false;
    for (const Cell &c : cells)
        if (!env.is_road(c))
            return false;
    for (const auto &o : others)
    {
        // Cheap reject before rasterising the other footprint.
        const double reach = 0.5 * (std::hypot(rect.length, rect.width) + std::hypot(o.length, o.width)) +
                             2.0 * env.resolution();
        if ((o.position - rect.center).norm() > reach)
            continue;
        const auto theirs = covered_cells(o.footprint(), env.size(), env.resolution());
        for (const Cell &a : cells)
            if (std::find(theirs.begin(), theirs.end(), a) != theirs.end())
                return false;
    }
    return true;
}

VehicleState step_vehicle(const EnvironmentGrid &env, const VehicleState &v, const std::vector<VehicleState> &others,
                          const MotionRules &rules)
{
    const auto target = select_target(env, v, rules);
    const double delta = target ? wrap_pi(target->heading - v.heading) : 0.0;

    VehicleState next = v;
    next.heading = wrap_two_pi(v.heading + rules.smoothing * delta);
    next.position = v.position + unit_vector(next.heading) * v.speed;
    if (footprint_is_free(env, next.footprint(), others))
    {
        next.stuck_counter = 0;
        return next;
    }

    // Blocked: stay put, turning in place only if the turned footprint fits.
    next.position = v.position;
    if (!footprint_is_free(env, next.footprint(), others))
        next.heading = v.heading;
    next.stuck_counter = v.stuck_counter + 1;
    return next;
}

Trajectory simulate_trajectory(const EnvironmentGrid &env, const std::vector<VehicleState> &initial, int num_frames,
                               int traj_id, const MotionRules &rules)
{
    if (num_frames < 1)
        throw std::invalid_argument("simulate_trajectory: num_frames must be at least 1");
    Trajectory traj;
    traj.traj_id = traj_id;
    traj.frames.reserve(static_cast<std::size_t>(num_frames));
    traj.frames.push_back(initial);

    std::vector<VehicleState> others;
    for (int f = 1; f < num_frames; ++f)
    {
        std::vector<VehicleState> state = traj.frames.back();
        // Ascending index order; earlier vehicles have already moved.
        for (std::size_t i = 0; i < state.size(); ++i)
        {
            others.clear();
            for (std::size_t j = 0; j < state.size(); ++j)
                if (j != i)
                    others.push_back(state[j]);
            state[i] = step_vehicle(env, state[i], others, rules);
        }
        traj.frames.push_back(std::move(state));
    }
    return traj;
}

void write_trajectory_csv(const std::filesystem::path &path, const Trajectory &traj)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "frame_index,vehicle_index,x,y,heading\n";
    out << std::setprecision(17);
    for (std::size_t f = 0; f < traj.frames.size(); ++f)
        for (std::size_t i = 0; i < traj.frames[f].size(); ++i)
        {
            const auto &v = traj.frames[f][i];
            out << f << ',' << i << ',' << v.position.x << ',' << v.position.y << ',' << v.heading << '\n';
        }
}

} // namespace radiomotion
