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

#include "radiomotion/trajectory.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <numbers>

using namespace radiomotion;
using radiomotion::testing::fill_rect;

namespace
{

constexpr double kPi = std::numbers::pi;

bool has_direction(const std::vector<ProbeCandidate> &c, ProbeDirection d)
{
    return std::any_of(c.begin(), c.end(), [d](const ProbeCandidate &p) { return p.direction == d; });
}

// Independent ray march: every point at a fine step along the ray lies on road.
bool ray_on_road(const EnvironmentGrid &env, Vec2 from, double angle, double length)
{
    for (double t = 0.0; t <= length; t += 0.01)
    {
        const Vec2 p = from + unit_vector(angle) * t;
        const Cell c{static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
        if (!env.in_bounds(c) || !env.is_road(c))
            return false;
    }
    return true;
}

VehicleState vehicle_at(double x, double y, double heading)
{
    VehicleState v;
    v.position = {x, y};
    v.heading = heading;
    return v;
}

} // namespace

TEST_CASE("seed_vehicles spacing")
{
    const EnvironmentGrid env = generate_environment(5, EnvParams{});
    const SeedResult two = seed_vehicles(env, 2, 42);
    REQUIRE(two.vehicles.size() == 2);
    CHECK((two.vehicles[0].position - two.vehicles[1].position).norm() >= 16.0);
    CHECK_FALSE(two.capacity_warning);

    CHECK(seed_vehicles(env, 0, 42).vehicles.empty());
    CHECK_THROWS_AS(seed_vehicles(env, -1, 42), std::invalid_argument);
}

TEST_CASE("seed_vehicles on a tiny ring reports capacity")
{
    EnvironmentGrid ring(24, 1.0, 0, CellKind::Road);
    fill_rect(ring, 4, 4, 19, 19, CellKind::Building);
    const SeedResult r = seed_vehicles(ring, 10000, 3);
    CHECK(r.capacity_warning);
    CHECK(r.vehicles.size() < 10000);
    CHECK_FALSE(r.vehicles.empty());
    for (std::size_t i = 0; i < r.vehicles.size(); ++i)
    {
        CHECK(footprint_is_free(ring, r.vehicles[i].footprint(), {}));
        for (std::size_t j = i + 1; j < r.vehicles.size(); ++j)
            CHECK((r.vehicles[i].position - r.vehicles[j].position).norm() >= 16.0);
    }
}

TEST_CASE("probe_directions in a straight corridor")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Building);
    fill_rect(env, 0, 10, 39, 17, CellKind::Road);
    const auto c = probe_directions(env, vehicle_at(10.5, 13.5, 0.0), false);
    CHECK(c.size() >= 1);
    CHECK(c.size() <= 3);
    CHECK(has_direction(c, ProbeDirection::Straight));
    CHECK_FALSE(has_direction(c, ProbeDirection::Plus90));
}

TEST_CASE("probe_directions at a dead end with a diagonal side street")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Building);
    // Street running +x that stops at column 17.
    fill_rect(env, 0, 18, 17, 23, CellKind::Road);
    // Side street leaving at +45 degrees (towards +y) through the vehicle.
    for (int r = 18; r < 40; ++r)
        for (int c = 0; c < 40; ++c)
            if (std::abs((c - r) - (14 - 20)) <= 2)
                env.set(c, r, CellKind::Road);

    const VehicleState v = vehicle_at(14.5, 20.5, 0.0);
    // The geometry as a ray march sees it.
    REQUIRE_FALSE(ray_on_road(env, v.position, 0.0, 6.0));
    REQUIRE(ray_on_road(env, v.position, 0.25 * kPi, 6.0));
    REQUIRE_FALSE(ray_on_road(env, v.position, -0.25 * kPi, 6.0));

    const auto c = probe_directions(env, v, false);
    CHECK_FALSE(has_direction(c, ProbeDirection::Straight));
    CHECK(has_direction(c, ProbeDirection::Plus45));
    CHECK_FALSE(has_direction(c, ProbeDirection::Minus45));
}

TEST_CASE("wide probing adds the perpendicular directions")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Road);
    const VehicleState v = vehicle_at(20.5, 20.5, 0.0);
    const auto narrow = probe_directions(env, v, false);
    const auto wide = probe_directions(env, v, true);
    CHECK(narrow.size() == 3);
    CHECK(wide.size() == 5);
    CHECK(has_direction(wide, ProbeDirection::Plus90));
    CHECK(has_direction(wide, ProbeDirection::Minus90));
}

TEST_CASE("step_vehicle turns 0.4 of the way towards a perpendicular target")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Ground);
    fill_rect(env, 6, 0, 13, 39, CellKind::Road);
    VehicleState v = vehicle_at(10.5, 20.5, 0.0);
    v.stuck_counter = 4;

    const auto target = select_target(env, v);
    REQUIRE(target.has_value());
    CHECK(target->direction == ProbeDirection::Plus90);
    CHECK(target->heading == doctest::Approx(0.5 * kPi).epsilon(1e-12));

    const VehicleState next = step_vehicle(env, v, {});
    CHECK(next.heading == doctest::Approx(0.2 * kPi).epsilon(1e-12));
    CHECK((next.position - v.position).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(next.stuck_counter == 0);
}

TEST_CASE("stuck_counter above the threshold widens the probe set")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Ground);
    fill_rect(env, 6, 0, 13, 39, CellKind::Road);
    VehicleState v = vehicle_at(10.5, 20.5, 0.0);
    v.stuck_counter = 3;
    CHECK_FALSE(select_target(env, v).has_value());
    v.stuck_counter = 4;
    CHECK(select_target(env, v).has_value());
}

TEST_CASE("open straight road: heading unchanged, advance 1 m")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Road);
    const VehicleState v = vehicle_at(10.5, 20.5, 0.0);
    const VehicleState next = step_vehicle(env, v, {});
    CHECK(next.heading == 0.0);
    CHECK(next.position.x == doctest::Approx(11.5).epsilon(1e-12));
    CHECK(next.position.y == doctest::Approx(20.5).epsilon(1e-12));
}

TEST_CASE("blocked vehicle stays put and counts frames")
{
    EnvironmentGrid env(40, 1.0, 0, CellKind::Road);
    std::vector<VehicleState> others{vehicle_at(14.5, 20.5, 0.0)};
    // No probes are blocked by vehicles, but the advanced footprint overlaps the one ahead.
    VehicleState v = vehicle_at(10.5, 20.5, 0.0);
    const VehicleState next = step_vehicle(env, v, others);
    CHECK(next.position == v.position);
    CHECK(next.stuck_counter == 1);
}

TEST_CASE("simulate_trajectory")
{
    const EnvironmentGrid env = generate_environment(2, EnvParams{});
    const auto initial = seed_vehicles(env, 10, 9).vehicles;

    SUBCASE("single frame")
    {
        const Trajectory t = simulate_trajectory(env, initial, 1, 4);
        REQUIRE(t.frames.size() == 1);
        CHECK(t.frames[0] == initial);
        CHECK(t.traj_id == 4);
        CHECK_THROWS_AS(simulate_trajectory(env, initial, 0), std::invalid_argument);
    }
    SUBCASE("deterministic")
    {
        const Trajectory a = simulate_trajectory(env, initial, 15);
        const Trajectory b = simulate_trajectory(env, initial, 15);
        CHECK(a.frames == b.frames);
    }
}

TEST_CASE("trajectories are collision-free with bounded motion")
{
    const MotionRules rules;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        CAPTURE(seed);
        const EnvironmentGrid env = generate_environment(seed, EnvParams{});
        const auto initial = seed_vehicles(env, 10, seed + 100).vehicles;
        const Trajectory t = simulate_trajectory(env, initial, 15);
        REQUIRE(t.frames.size() == 15);
        for (std::size_t f = 0; f < t.frames.size(); ++f)
        {
            const auto &vs = t.frames[f];
            for (std::size_t i = 0; i < vs.size(); ++i)
            {
                CHECK(footprint_is_free(env, vs[i].footprint(), {}));
                for (std::size_t j = i + 1; j < vs.size(); ++j)
                    CHECK_FALSE(rects_overlap(vs[i].footprint(), vs[j].footprint()));
                if (f == 0)
                    continue;
                const auto &prev = t.frames[f - 1][i];
                const double step = (vs[i].position - prev.position).norm();
                CHECK((step == doctest::Approx(0.0) || step == doctest::Approx(1.0)));
                // Probe targets sit within a few degrees of the probe axis, so a
                // single frame never turns by more than 0.4 of a right angle plus that.
                CHECK(std::abs(wrap_pi(vs[i].heading - prev.heading)) <= rules.smoothing * (0.5 * kPi + 0.15));
                CHECK(vs[i].heading >= 0.0);
                CHECK(vs[i].heading < 2.0 * kPi);
            }
        }
    }
}

TEST_CASE("single vehicle on a ring road moves at most 1 m per frame")
{
    EnvironmentGrid ring(64, 1.0, 0, CellKind::Road);
    fill_rect(ring, 6, 6, 57, 57, CellKind::Building);
    const auto initial = seed_vehicles(ring, 1, 1).vehicles;
    REQUIRE(initial.size() == 1);
    const Trajectory t = simulate_trajectory(ring, initial, 15);
    double path = 0.0;
    for (std::size_t f = 1; f < t.frames.size(); ++f)
        path += (t.frames[f][0].position - t.frames[f - 1][0].position).norm();
    const double net = (t.frames.back()[0].position - initial[0].position).norm();
    CHECK(path <= 14.0 + 1e-9);
    CHECK(net <= path + 1e-9);
    CHECK(net >= 0.0);
    CHECK(path > 0.0);
}
