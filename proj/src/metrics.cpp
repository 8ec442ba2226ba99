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

#include "radiomotion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace radiomotion
{

namespace
{
void require_same_size(std::span<const float> a, std::span<const float> b, const char *what)
{
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument(std::string(what) + ": inputs must be non-empty and of equal size");
}
} // namespace

double mse(std::span<const float> pred, std::span<const float> gt)
{
    require_same_size(pred, gt, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
    {
        const double d = static_cast<double>(gt[i]) - static_cast<double>(pred[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

double nmse(std::span<const float> pred, std::span<const float> gt)
{
    require_same_size(pred, gt, "nmse");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
    {
        const double g = gt[i], d = g - static_cast<double>(pred[i]);
        num += d * d;
        den += g * g;
    }
    if (den == 0.0)
        throw std::domain_error("nmse: ground truth is identically zero");
    return num / den;
}

double rmse(std::span<const float> pred, std::span<const float> gt)
{
    return std::sqrt(mse(pred, gt));
}

double psnr_from_mse(double m)
{
    if (m <= 1e-10)
        return 100.0;
    return -10.0 * std::log10(m);
}

double psnr(std::span<const float> pred, std::span<const float> gt)
{
    return psnr_from_mse(mse(pred, gt));
}

double ssim(const Frame &pred, const Frame &gt, const SsimParams &p)
{
    if (pred.size != gt.size)
        throw std::invalid_argument("ssim: frames differ in size");
    const int n = gt.size, w = p.window;
    if (n < w)
        throw std::invalid_argument("ssim: image smaller than the " + std::to_string(w) + "x" + std::to_string(w) +
                                    " window");
    std::vector<double> g(static_cast<std::size_t>(w));
    double gs = 0.0;
    for (int i = 0; i < w; ++i)
    {
        const double d = i - (w - 1) / 2.0;
        g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
        gs += g[static_cast<std::size_t>(i)];
    }
    for (double &v : g)
        v /= gs;

    // Separable filtering of x, y, x^2, y^2, xy; valid region only.
    const int m = n - w + 1;
    auto filter = [&](auto value) {
        std::vector<double> rows(static_cast<std::size_t>(n) * m), out(static_cast<std::size_t>(m) * m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c)
            {
                double s = 0.0;
                for (int k = 0; k < w; ++k)
                    s += g[static_cast<std::size_t>(k)] * value(r, c + k);
                rows[static_cast<std::size_t>(r) * m + c] = s;
            }
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
            {
                double s = 0.0;
                for (int k = 0; k < w; ++k)
                    s += g[static_cast<std::size_t>(k)] * rows[static_cast<std::size_t>(r + k) * m + c];
                out[static_cast<std::size_t>(r) * m + c] = s;
            }
        return out;
    };
    auto x = [&](int r, int c) { return static_cast<double>(pred.at(r, c)); };
    auto y = [&](int r, int c) { return static_cast<double>(gt.at(r, c)); };
    const auto mx = filter(x), my = filter(y);
    const auto xx = filter([&](int r, int c) { return x(r, c) * x(r, c); });
    const auto yy = filter([&](int r, int c) { return y(r, c) * y(r, c); });
    const auto xy = filter([&](int r, int c) { return x(r, c) * y(r, c); });

    const double c1 = std::pow(p.k1 * p.dynamic_range, 2), c2 = std::pow(p.k2 * p.dynamic_range, 2);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i)
    {
        const double vx = xx[i] - mx[i] * mx[i], vy = yy[i] - my[i] * my[i], cxy = xy[i] - mx[i] * my[i];
        total += ((2 * mx[i] * my[i] + c1) * (2 * cxy + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

std::vector<double> pacf(std::span<const double> series, int max_lag)
{
    const std::size_t n = series.size();
    if (max_lag < 1 || n <= static_cast<std::size_t>(max_lag) + 1)
        throw std::invalid_argument("pacf: series length must exceed max_lag + 1");
    double mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k)
    {
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
            s += (series[t] - mean) * (series[t - static_cast<std::size_t>(k)] - mean);
        r[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
    }
    if (!(r[0] > 0.0))
        throw std::domain_error("pacf: series has zero variance");

    std::vector<double> out, phi, prev;
    double v = r[0];
    for (int k = 1; k <= max_lag; ++k)
    {
        double num = r[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j)
            num -= prev[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(k - j)];
        const double a = num / v;
        phi.assign(static_cast<std::size_t>(k), 0.0);
        for (int j = 1; j < k; ++j)
            phi[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - a * prev[static_cast<std::size_t>(k - j - 1)];
        phi[static_cast<std::size_t>(k - 1)] = a;
        v *= 1.0 - a * a;
        out.push_back(a);
        prev = phi;
        if (!(v > 0.0))
        {
            out.resize(static_cast<std::size_t>(max_lag), 0.0); // perfectly predictable: no further partial correlation
            break;
        }
    }
    return out;
}

std::vector<double> mean_pixel_pacf(const std::vector<std::vector<Frame>> &sequences, int max_lag, int stride)
{
    if (stride <= 0)
        throw std::invalid_argument("mean_pixel_pacf: stride must be positive");
    std::vector<double> acc(static_cast<std::size_t>(max_lag), 0.0);
    std::size_t count = 0;
    for (const auto &seq : sequences)
    {
        if (seq.empty())
            continue;
        const int n = seq.front().size;
        std::vector<double> series(seq.size());
        for (int r = 0; r < n; r += stride)
            for (int c = 0; c < n; c += stride)
            {
                for (std::size_t t = 0; t < seq.size(); ++t)
                    series[t] = seq[t].at(r, c);
                bool constant = std::all_of(series.begin(), series.end(), [&](double v) { return v == series[0]; });
                if (constant)
                    continue;
                std::vector<double> p = pacf(series, max_lag);
                for (std::size_t k = 0; k < acc.size(); ++k)
                    acc[k] += p[k];
                ++count;
            }
    }
    if (count == 0)
        throw std::domain_error("mean_pixel_pacf: every sampled pixel is constant");
    for (double &v : acc)
        v /= static_cast<double>(count);
    return acc;
}

MetricsRecord evaluate(const std::string &model, const std::string &split, const Predictor &predictor,
                       std::span<const SequencePair> pairs)
{
    if (pairs.empty())
        throw std::invalid_argument("evaluate: empty split " + split);
    MetricsRecord rec;
    rec.model = model;
    rec.split = split;
    rec.context = static_cast<int>(pairs.front().context.size());
    rec.pairs = static_cast<int>(pairs.size());
    const std::size_t horizon = pairs.front().target.size();
    rec.per_frame.assign(horizon, {});
    for (const SequencePair &pair : pairs)
    {
        if (pair.target.size() != horizon || static_cast<int>(pair.context.size()) != rec.context)
            throw std::invalid_argument("evaluate: pairs differ in context or horizon length");
        std::vector<Frame> pred = predictor(pair.context, static_cast<int>(horizon));
        if (pred.size() != horizon)
            throw std::runtime_error("evaluate: model " + model + " returned the wrong number of frames");
        for (std::size_t k = 0; k < horizon; ++k)
        {
            const Frame &p = pred[k], &g = pair.target[k];
            FrameMetrics &f = rec.per_frame[k];
            const double m = mse(p.values, g.values);
            f.nmse += nmse(p.values, g.values);
            f.rmse += std::sqrt(m);
            f.ssim += ssim(p, g);
            f.psnr_db += psnr_from_mse(m);
        }
    }
    const double np = static_cast<double>(pairs.size());
    for (FrameMetrics &f : rec.per_frame)
    {
        f.nmse /= np;
        f.rmse /= np;
        f.ssim /= np;
        f.psnr_db /= np;
        rec.aggregate.nmse += f.nmse;
        rec.aggregate.rmse += f.rmse;
        rec.aggregate.ssim += f.ssim;
        rec.aggregate.psnr_db += f.psnr_db;
    }
    if (horizon > 0)
    {
        const double nh = static_cast<double>(horizon);
        rec.aggregate.nmse /= nh;
        rec.aggregate.rmse /= nh;
        rec.aggregate.ssim /= nh;
        rec.aggregate.psnr_db /= nh;
    }
    return rec;
}

std::uint64_t target_digest(std::span<const SequencePair> pairs)
{
    std::uint64_t h = 1469598103934665603ull;
    for (const SequencePair &p : pairs)
        for (const Frame &f : p.target)
            for (float v : f.values)
            {
                std::uint32_t bits;
                std::memcpy(&bits, &v, sizeof bits);
                for (int b = 0; b < 4; ++b)
                {
                    h ^= (bits >> (8 * b)) & 0xffu;
                    h *= 1099511628211ull;
                }
            }
    return h;
}

std::vector<AblationEntry> ablate_context(const std::vector<std::vector<Frame>> &train,
                                          const std::vector<std::vector<Frame>> &val,
                                          const std::vector<std::vector<Frame>> &test, const std::string &split,
                                          std::span<const int> contexts, int horizon, const AblationTrainer &trainer)
{
    for (int tc : contexts)
        if (tc < 1 || tc + horizon > kFramesPerSequence)
            throw std::invalid_argument("ablate_context: context length " + std::to_string(tc) +
                                        " does not fit with horizon " + std::to_string(horizon));
    auto pairs = [horizon](const std::vector<std::vector<Frame>> &seqs, int tc) {
        std::vector<SequencePair> out;
        for (const auto &s : seqs)
            out.push_back(make_pairs(s, tc, horizon));
        return out;
    };
    std::vector<AblationEntry> out;
    for (int tc : contexts)
    {
        const std::vector<SequencePair> tr = pairs(train, tc), va = pairs(val, tc), te = pairs(test, tc);
        Predictor model = trainer(tc, tr, va);
        AblationEntry e;
        e.context = tc;
        e.record = evaluate("radiolstm", split, model, te);
        e.target_digest = target_digest(te);
        out.push_back(std::move(e));
    }
    return out;
}

void write_results_csv(const std::filesystem::path &path, std::span<const MetricsRecord> records)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "model,split,Tc,frame_index,nmse,rmse,ssim,psnr_db\n" << std::setprecision(17);
    auto row = [&](const MetricsRecord &r, std::size_t k, const FrameMetrics &f) {
        out << r.model << ',' << r.split << ',' << r.context << ',' << k << ',' << f.nmse << ',' << f.rmse << ','
            << f.ssim << ',' << f.psnr_db << '\n';
    };
    for (const MetricsRecord &r : records)
    {
        row(r, 0, r.aggregate);
        for (std::size_t k = 0; k < r.per_frame.size(); ++k)
            row(r, k + 1, r.per_frame[k]);
    }
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::vector<MetricsRecord> read_results_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "model,split,Tc,frame_index,nmse,rmse,ssim,psnr_db")
        throw std::runtime_error(path.string() + ": unexpected header");
    std::vector<MetricsRecord> out;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ','))
            f.push_back(field);
        if (f.size() != 8)
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        FrameMetrics m{std::stod(f[4]), std::stod(f[5]), std::stod(f[6]), std::stod(f[7])};
        const int tc = std::stoi(f[2]);
        const int k = std::stoi(f[3]);
        if (k == 0)
        {
            MetricsRecord r;
            r.model = f[0];
            r.split = f[1];
            r.context = tc;
            r.aggregate = m;
            out.push_back(std::move(r));
        }
        else
        {
            if (out.empty() || out.back().model != f[0] || out.back().split != f[1] || out.back().context != tc)
                throw std::runtime_error(path.string() + ": per-frame row without aggregate");
            out.back().per_frame.push_back(m);
        }
    }
    return out;
}

} // namespace radiomotion
