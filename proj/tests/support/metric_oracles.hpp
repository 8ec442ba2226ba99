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

#include "radiomotion/dataset.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace radiomotion::testing
{

// SSIM with a direct (non-separable) 2-D Gaussian window, summed in double.
inline double brute_ssim(const Frame &x, const Frame &y, int win = 11, double sigma = 1.5)
{
    const int n = x.size, half = win / 2;
    std::vector<double> w(static_cast<std::size_t>(win) * win);
    double total = 0.0;
    for (int a = 0; a < win; ++a)
        for (int b = 0; b < win; ++b)
            total += w[static_cast<std::size_t>(a) * win + b] =
                std::exp(-((a - half) * (a - half) + (b - half) * (b - half)) / (2.0 * sigma * sigma));
    for (double &v : w)
        v /= total;
    const double c1 = 1e-4, c2 = 9e-4;
    double acc = 0.0;
    int count = 0;
    for (int r = 0; r + win <= n; ++r)
        for (int c = 0; c + win <= n; ++c)
        {
            double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
            for (int a = 0; a < win; ++a)
                for (int b = 0; b < win; ++b)
                {
                    const double k = w[static_cast<std::size_t>(a) * win + b];
                    const double u = x.at(r + a, c + b), v = y.at(r + a, c + b);
                    mx += k * u;
                    my += k * v;
                    xx += k * u * u;
                    yy += k * v * v;
                    xy += k * u * v;
                }
            const double vx = xx - mx * mx, vy = yy - my * my, cov = xy - mx * my;
            acc += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return acc / count;
}

// PACF at lag k as the last coefficient of the order-k Yule-Walker fit,
// solved by Gaussian elimination rather than the Levinson recursion.
inline std::vector<double> yule_walker_pacf(const std::vector<double> &x, int max_lag)
{
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> acov(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k)
    {
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
            acov[static_cast<std::size_t>(k)] += (x[t] - mean) * (x[t - static_cast<std::size_t>(k)] - mean);
        acov[static_cast<std::size_t>(k)] /= static_cast<double>(n);
    }
    std::vector<double> out;
    for (int k = 1; k <= max_lag; ++k)
    {
        std::vector<std::vector<double>> a(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k) + 1));
        for (int i = 0; i < k; ++i)
        {
            for (int j = 0; j < k; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acov[static_cast<std::size_t>(std::abs(i - j))];
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = acov[static_cast<std::size_t>(i) + 1];
        }
        for (int col = 0; col < k; ++col)
        {
            int piv = col;
            for (int r = col + 1; r < k; ++r)
                if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                    std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                    piv = r;
            std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
            for (int r = 0; r < k; ++r)
            {
                if (r == col)
                    continue;
                const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                                 a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
                for (int j = col; j <= k; ++j)
                    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -= f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
            }
        }
        out.push_back(a[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(k)] /
                      a[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(k) - 1]);
    }
    return out;
}

// x_t = phi1 x_{t-1} + phi2 x_{t-2} + e_t, after a burn-in.
inline std::vector<double> ar_series(std::size_t n, double phi1, double phi2, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e;
    std::vector<double> x;
    double a = 0.0, b = 0.0;
    for (std::size_t t = 0; t < n + 500; ++t)
    {
        const double v = phi1 * a + phi2 * b + e(rng);
        b = a;
        a = v;
        if (t >= 500)
            x.push_back(v);
    }
    return x;
}

} // namespace radiomotion::testing
