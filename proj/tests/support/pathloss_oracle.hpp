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

#include "radiomotion/pathloss.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <tuple>
#include <vector>

namespace radiomotion::testing
{

// Exact rational in lowest-effort form; denominators kept positive.
struct Frac
{
    long long num;
    long long den;
};

inline Frac make_frac(long long n, long long d) { return d < 0 ? Frac{-n, -d} : Frac{n, d}; }
inline bool less_eq(Frac a, Frac b) { return a.num * b.den <= b.num * a.den; }
inline Frac max_of(Frac a, Frac b) { return less_eq(a, b) ? b : a; }
inline Frac min_of(Frac a, Frac b) { return less_eq(a, b) ? a : b; }

// Does the segment between two cell centres meet the closed square of cell q?
// Coordinates are doubled so centres are odd integers and squares are [2c, 2c + 2].
inline bool segment_meets_square(Cell a, Cell b, Cell q)
{
    const long long x0 = 2LL * a.col + 1, y0 = 2LL * a.row + 1;
    const long long dx = 2LL * (b.col - a.col), dy = 2LL * (b.row - a.row);
    Frac lo{0, 1}, hi{1, 1};
    auto clip = [&](long long p0, long long d, long long lo_edge, long long hi_edge) {
        if (d == 0)
            return p0 >= lo_edge && p0 <= hi_edge;
        Frac t0 = make_frac(lo_edge - p0, d), t1 = make_frac(hi_edge - p0, d);
        if (!less_eq(t0, t1))
            std::swap(t0, t1);
        lo = max_of(lo, t0);
        hi = min_of(hi, t1);
        return less_eq(lo, hi);
    };
    return clip(x0, dx, 2LL * q.col, 2LL * q.col + 2) && clip(y0, dy, 2LL * q.row, 2LL * q.row + 2);
}

inline bool brute_los(const std::vector<std::uint8_t> &blocked, int n, Cell a, Cell b)
{
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (blocked[static_cast<std::size_t>(r) * n + c] && segment_meets_square(a, b, {c, r}))
                return false;
    return true;
}

// Best gain over (ray to a lit cell, then grid moves) paths by Dijkstra over
// (cell, heading, interactions). Heading 8 marks "still on the direct ray".
inline std::vector<double> oracle_map(const SceneSnapshot &s, int max_k)
{
    const int n = s.env.size();
    const auto blocked = s.blocked_mask();
    const SolverParams &p = s.params;
    auto free = [&](int c, int r) { return c >= 0 && r >= 0 && c < n && r < n && !blocked[static_cast<std::size_t>(r) * n + c]; };
    const int dirs[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

    const std::size_t cells = static_cast<std::size_t>(n) * n;
    auto id = [&](int c, int r, int h, int k) { return ((static_cast<std::size_t>(k) * 9 + h) * cells) + static_cast<std::size_t>(r) * n + c; };
    std::vector<double> dist(cells * 9 * static_cast<std::size_t>(max_k + 1), INFINITY);
    using Item = std::tuple<double, int, int, int, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

    std::vector<double> best(cells, p.floor_dbm);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (free(c, r) && brute_los(blocked, n, s.tx, {c, r}))
            {
                const double d = std::hypot(c - s.tx.col, r - s.tx.row);
                dist[id(c, r, 8, 0)] = d;
                pq.emplace(d, c, r, 8, 0);
            }
    while (!pq.empty())
    {
        const auto [d, c, r, h, k] = pq.top();
        pq.pop();
        if (d > dist[id(c, r, h, k)])
            continue;
        const std::size_t cell = static_cast<std::size_t>(r) * n + c;
        best[cell] = std::max(best[cell], free_space_gain(d, p.frequency_hz, p.tx_power_dbm, p.min_distance_m) -
                                              k * p.diffraction_loss_db);
        for (int nd = 0; nd < 8; ++nd)
        {
            const int dx = dirs[nd][0], dy = dirs[nd][1];
            if (!free(c + dx, r + dy) || (dx != 0 && dy != 0 && (!free(c + dx, r) || !free(c, r + dy))))
                continue;
            const int nk = k + (nd != h ? 1 : 0);
            if (nk > max_k)
                continue;
            const double nd_len = d + ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
            double &slot = dist[id(c + dx, r + dy, nd, nk)];
            if (nd_len < slot)
            {
                slot = nd_len;
                pq.emplace(nd_len, c + dx, r + dy, nd, nk);
            }
        }
    }
    for (std::size_t i = 0; i < cells; ++i)
        if (blocked[i])
            best[i] = p.floor_dbm;
    return best;
}

inline SceneSnapshot random_scene(std::uint64_t seed, int n, double density)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution wall(density);
    SceneSnapshot s;
    s.env = EnvironmentGrid(n, 1.0, 0, CellKind::Road);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (wall(rng))
                s.env.set(c, r, CellKind::Building);
    std::uniform_int_distribution<int> pick(0, n - 1);
    do
        s.tx = {pick(rng), pick(rng)};
    while (s.env.is_building(s.tx));
    return s;
}

} // namespace radiomotion::testing
