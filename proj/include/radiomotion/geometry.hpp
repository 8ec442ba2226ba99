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

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace radiomotion
{

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool operator==(const Vec2 &) const = default;
};

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Wraps into [0, 2*pi).
double wrap_two_pi(double angle);
// Wraps into (-pi, pi].
double wrap_pi(double angle);

// Rectangle of extent length x width centred at `center`, long axis along `heading`.
struct OrientedRect
{
    Vec2 center;
    double heading = 0.0;
    double length = 0.0;
    double width = 0.0;

    std::array<Vec2, 4> corners() const;
    bool contains(Vec2 p) const;
};

// Separating-axis test; touching edges do not count as overlap.
bool rects_overlap(const OrientedRect &a, const OrientedRect &b, double tolerance = 1e-9);

// Cells (of a size x size grid with the given resolution) whose square shares
// interior area with the rectangle. Cells outside the grid are reported in
// `outside` when non-null.
std::vector<Cell> covered_cells(const OrientedRect &rect, int size, double resolution, bool *outside = nullptr);

// Cells whose centre lies inside the rectangle. Centres exactly on an edge
// count on the low side only (an axis-aligned 4 x 2 rectangle covers 8 cells
// wherever it sits).
std::vector<Cell> center_cells(const OrientedRect &rect, int size, double resolution);

} // namespace radiomotion
