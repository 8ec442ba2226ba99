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

#include "radiomotion/geometry.hpp"

#include <algorithm>
#include <array>

namespace radiomotion
{

double wrap_two_pi(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(angle, two_pi);
    if (a < 0.0)
        a += two_pi;
    if (a >= two_pi)
        a -= two_pi;
    return a;
}

double wrap_pi(double angle)
{
    constexpr double pi = std::numbers::pi;
    double a = wrap_two_pi(angle);
    if (a > pi)
        a -= 2.0 * pi;
    return a;
}

std::array<Vec2, 4> OrientedRect::corners() const
{
    const Vec2 u = unit_vector(heading) * (0.5 * length);
    const Vec2 v = Vec2{-std::sin(heading), std::cos(heading)} * (0.5 * width);
    return {center + u + v, center - u + v, center - u - v, center + u - v};
}

bool OrientedRect::contains(Vec2 p) const
{
    const Vec2 d = p - center;
    const double along = d.dot(unit_vector(heading));
    const double across = d.dot(Vec2{-std::sin(heading), std::cos(heading)});
    return std::abs(along) < 0.5 * length && std::abs(across) < 0.5 * width;
}

namespace
{
std::pair<double, double> project(const std::array<Vec2, 4> &pts, Vec2 axis)
{
    double lo = pts[0].dot(axis);
    double hi = lo;
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
        const double p = pts[i].dot(axis);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return {lo, hi};
}

bool separated_on(const std::array<Vec2, 4> &a, const std::array<Vec2, 4> &b, Vec2 axis, double tol)
{
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    return ahi <= blo + tol || bhi <= alo + tol;
}

bool overlap_corners(const std::array<Vec2, 4> &a, double heading_a, const std::array<Vec2, 4> &b, double heading_b,
                     double tol)
{
    const Vec2 axes[4] = {unit_vector(heading_a), Vec2{-std::sin(heading_a), std::cos(heading_a)},
                          unit_vector(heading_b), Vec2{-std::sin(heading_b), std::cos(heading_b)}};
    for (const Vec2 &axis : axes)
        if (separated_on(a, b, axis, tol))
            return false;
    return true;
}
} // namespace

bool rects_overlap(const OrientedRect &a, const OrientedRect &b, double tolerance)
{
    return overlap_corners(a.corners(), a.heading, b.corners(), b.heading, tolerance);
}

std::vector<Cell> covered_cells(const OrientedRect &rect, int size, double resolution, bool *outside)
{
    const auto pts = rect.corners();
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const Vec2 &p : pts)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int c0 = static_cast<int>(std::floor(xmin / resolution));
    const int c1 = static_cast<int>(std::floor(xmax / resolution));
    const int r0 = static_cast<int>(std::floor(ymin / resolution));
    const int r1 = static_cast<int>(std::floor(ymax / resolution));

    if (outside)
        *outside = false;
    std::vector<Cell> cells;
    for (int r = r0; r <= r1; ++r)
    {
        for (int c = c0; c <= c1; ++c)
        {
            const double x0 = c * resolution, y0 = r * resolution;
            const std::array<Vec2, 4> square = {Vec2{x0 + resolution, y0 + resolution}, Vec2{x0, y0 + resolution},
                                                Vec2{x0, y0}, Vec2{x0 + resolution, y0}};
            if (!overlap_corners(pts, rect.heading, square, 0.0, 1e-9))
                continue;
            if (c < 0 || r < 0 || c >= size || r >= size)
            {
                if (outside)
                    *outside = true;
                continue;
            }
            cells.push_back({c, r});
        }
    }
    return cells;
}

std::vector<Cell> center_cells(const OrientedRect &rect, int size, double resolution)
{
    const auto pts = rect.corners();
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const Vec2 &p : pts)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int c0 = std::max(0, static_cast<int>(std::floor(xmin / resolution)));
    const int c1 = std::min(size - 1, static_cast<int>(std::floor(xmax / resolution)));
    const int r0 = std::max(0, static_cast<int>(std::floor(ymin / resolution)));
    const int r1 = std::min(size - 1, static_cast<int>(std::floor(ymax / resolution)));

    // Vehicles sit on cell centres, so their edges often run exactly through
    // other centres. Testing a point nudged off the centre makes those ties
    // behave half-open instead of depending on rounding in sin/cos.
    const double nudge = 1e-6 * resolution;
    std::vector<Cell> cells;
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (rect.contains({(c + 0.5) * resolution + nudge, (r + 0.5) * resolution + nudge}))
                cells.push_back({c, r});
    return cells;
}

} // namespace radiomotion
