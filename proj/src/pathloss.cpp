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

#include "radiomotion/pathloss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace radiomotion
{

std::vector<std::uint8_t> SceneSnapshot::blocked_mask() const
{
    const int n = env.size();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            mask[env.index(c, r)] = env.at(c, r) == CellKind::Building ? 1 : 0;
    for (const Cell &v : vehicle_cells)
    {
        if (!env.in_bounds(v))
            throw std::invalid_argument("SceneSnapshot: vehicle cell outside the grid");
        mask[env.index(v.col, v.row)] = 1;
    }
    return mask;
}

double free_space_loss_db(double distance_m, double frequency_hz)
{
    constexpr double c = 299792458.0;
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
           20.0 * std::log10(4.0 * std::numbers::pi / c);
}

double free_space_gain(double distance_m, double frequency_hz, double tx_power_dbm, double min_distance_m)
{
    if (!(frequency_hz > 0.0))
        throw std::invalid_argument("free_space_gain: frequency must be positive");
    return tx_power_dbm - free_space_loss_db(std::max(distance_m, min_distance_m), frequency_hz);
}

bool line_of_sight(const std::vector<std::uint8_t> &blocked, int size, Cell from, Cell to)
{
    auto is_blocked = [&](int c, int r) { return blocked[static_cast<std::size_t>(r) * size + c] != 0; };
    if (is_blocked(from.col, from.row) || is_blocked(to.col, to.row))
        return false;

    const int dx = to.col - from.col;
    const int dy = to.row - from.row;
    const long nx = std::abs(dx);
    const long ny = std::abs(dy);
    const int sx = dx > 0 ? 1 : -1;
    const int sy = dy > 0 ? 1 : -1;

    int x = from.col;
    int y = from.row;
    long ix = 0;
    long iy = 0;
    // Compare the parameters at which the segment crosses the next vertical
    // and horizontal cell boundaries: (ix + 1/2) / nx against (iy + 1/2) / ny.
    while (ix < nx || iy < ny)
    {
        const long lhs = (1 + 2 * ix) * ny;
        const long rhs = (1 + 2 * iy) * nx;
        if (lhs == rhs)
        {
            if (is_blocked(x + sx, y) || is_blocked(x, y + sy))
                return false;
            x += sx;
            y += sy;
            ++ix;
            ++iy;
        }
        else if (lhs < rhs)
        {
            x += sx;
            ++ix;
        }
        else
        {
            y += sy;
            ++iy;
        }
        if (is_blocked(x, y))
            return false;
    }
    return true;
}

namespace
{

constexpr std::array<std::array<int, 2>, 8> kDirs = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Expansion
{
    int n;
    double res;
    const std::vector<std::uint8_t> &blocked;

    bool free(int c, int r) const
    {
        return c >= 0 && r >= 0 && c < n && r < n && blocked[static_cast<std::size_t>(r) * n + c] == 0;
    }

    // Grid move from (c, r) along direction d; diagonals may not cut a blocked corner.
    bool can_move(int c, int r, int d) const
    {
        const int dx = kDirs[d][0], dy = kDirs[d][1];
        if (!free(c + dx, r + dy))
            return false;
        return dx == 0 || dy == 0 || (free(c + dx, r) && free(c, r + dy));
    }

    double step(int d) const { return (kDirs[d][0] != 0 && kDirs[d][1] != 0) ? res * std::numbers::sqrt2 : res; }
};

std::vector<double> expand(const SceneSnapshot &scene)
{
    const EnvironmentGrid &env = scene.env;
    const SolverParams &p = scene.params;
    const int n = env.size();
    const auto cells = static_cast<std::size_t>(n) * n;

    if (!env.in_bounds(scene.tx))
        throw std::invalid_argument("compute_radio_map: transmitter outside the grid");
    if (!(p.diffraction_loss_db > 0.0))
        throw std::invalid_argument("compute_radio_map: diffraction loss must be positive");
    if (!(p.frequency_hz > 0.0) || !(p.min_distance_m > 0.0))
        throw std::invalid_argument("compute_radio_map: frequency and distance clamp must be positive");

    const auto blocked = scene.blocked_mask();
    if (blocked[env.index(scene.tx.col, scene.tx.row)])
        throw std::invalid_argument("compute_radio_map: transmitter inside an obstacle at (" +
                                    std::to_string(scene.tx.col) + ", " + std::to_string(scene.tx.row) + ")");

    const double res = env.resolution();
    const double dh = p.tx_height_m - p.rx_height_m;
    auto gain_at = [&](double horizontal, int interactions) {
        const double d = std::sqrt(horizontal * horizontal + dh * dh);
        return free_space_gain(d, p.frequency_hz, p.tx_power_dbm, p.min_distance_m) -
               interactions * p.diffraction_loss_db;
    };

    std::vector<double> gain(cells, p.floor_dbm);
    std::vector<double> ray(cells, kInf);
    for (int r = 0; r < n; ++r)
    {
        for (int c = 0; c < n; ++c)
        {
            if (!line_of_sight(blocked, n, scene.tx, {c, r}))
                continue;
            const std::size_t i = env.index(c, r);
            ray[i] = res * std::hypot(static_cast<double>(c - scene.tx.col), static_cast<double>(r - scene.tx.row));
            gain[i] = std::max(gain[i], gain_at(ray[i], 0));
        }
    }

    // Paths with more interactions than this cannot rise above the floor.
    const double budget = p.tx_power_dbm - free_space_loss_db(p.min_distance_m, p.frequency_hz) - p.floor_dbm;
    const int max_interactions = std::max(0, static_cast<int>(std::floor(budget / p.diffraction_loss_db)));

    const Expansion ex{n, res, blocked};
    // dist[d][cell]: shortest horizontal length reaching `cell` moving along d
    // with exactly `level` interactions.
    std::vector<std::vector<double>> dist(8, std::vector<double>(cells, kInf));
    std::vector<std::vector<double>> next(8, std::vector<double>(cells, kInf));

    // Level 1: leave any lit cell with a grid move.
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
        {
            const double base = ray[env.index(c, r)];
            if (base == kInf)
                continue;
            for (int d = 0; d < 8; ++d)
                if (ex.can_move(c, r, d))
                {
                    double &slot = dist[d][env.index(c + kDirs[d][0], r + kDirs[d][1])];
                    slot = std::min(slot, base + ex.step(d));
                }
        }

    for (int level = 1; level <= max_interactions; ++level)
    {
        // Straight runs keep the interaction count.
        for (int d = 0; d < 8; ++d)
        {
            const int dx = kDirs[d][0], dy = kDirs[d][1];
            const double s = ex.step(d);
            auto &plane = dist[d];
            for (int ri = 0; ri < n; ++ri)
            {
                const int r = dy < 0 ? n - 1 - ri : ri;
                for (int ci = 0; ci < n; ++ci)
                {
                    const int c = dx < 0 ? n - 1 - ci : ci;
                    const double v = plane[env.index(c, r)];
                    if (v == kInf || !ex.can_move(c, r, d))
                        continue;
                    double &slot = plane[env.index(c + dx, r + dy)];
                    slot = std::min(slot, v + s);
                }
            }
        }

        bool any = false;
        for (auto &plane : next)
            std::fill(plane.begin(), plane.end(), kInf);
        for (int r = 0; r < n; ++r)
        {
            for (int c = 0; c < n; ++c)
            {
                const std::size_t i = env.index(c, r);
                double best = kInf, second = kInf;
                int arg = -1;
                for (int d = 0; d < 8; ++d)
                {
                    const double v = dist[d][i];
                    if (v < best)
                    {
                        second = best;
                        best = v;
                        arg = d;
                    }
                    else if (v < second)
                    {
                        second = v;
                    }
                }
                if (best == kInf)
                    continue;
                any = true;
                gain[i] = std::max(gain[i], gain_at(best, level));

                if (level == max_interactions)
                    continue;
                // A direction change at this cell starts the next level.
                for (int d = 0; d < 8; ++d)
                {
                    const double from = (d == arg) ? second : best;
                    if (from == kInf || !ex.can_move(c, r, d))
                        continue;
                    double &slot = next[d][env.index(c + kDirs[d][0], r + kDirs[d][1])];
                    slot = std::min(slot, from + ex.step(d));
                }
            }
        }
        if (!any)
            break;
        std::swap(dist, next);
    }

    for (std::size_t i = 0; i < cells; ++i)
        if (blocked[i])
            gain[i] = p.floor_dbm;
    return gain;
}

} // namespace

double dominant_path_gain(const SceneSnapshot &scene, Cell rx)
{
    if (!scene.env.in_bounds(rx))
        throw std::out_of_range("dominant_path_gain: receiver (" + std::to_string(rx.col) + ", " +
                                std::to_string(rx.row) + ") outside the grid");
    return expand(scene)[scene.env.index(rx.col, rx.row)];
}

RadioMap compute_radio_map(const SceneSnapshot &scene)
{
    RadioMap map;
    map.size = scene.env.size();
    map.values_db = expand(scene);
    return map;
}

std::vector<Cell> rasterize_vehicles(const std::vector<VehicleState> &frame, const EnvironmentGrid &env)
{
    std::vector<Cell> cells;
    for (const auto &v : frame)
    {
        const auto mine = center_cells(v.footprint(), env.size(), env.resolution());
        cells.insert(cells.end(), mine.begin(), mine.end());
    }
    std::sort(cells.begin(), cells.end(), [](Cell a, Cell b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

} // namespace radiomotion
