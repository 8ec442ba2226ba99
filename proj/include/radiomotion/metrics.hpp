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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace radiomotion
{

// sum (gt - pred)^2 / sum gt^2. Throws when gt is identically zero.
double nmse(std::span<const float> pred, std::span<const float> gt);
double mse(std::span<const float> pred, std::span<const float> gt);
double rmse(std::span<const float> pred, std::span<const float> gt);
// 10 log10(1 / mse), 100 dB when mse <= 1e-10.
double psnr(std::span<const float> pred, std::span<const float> gt);
double psnr_from_mse(double mse_value);

struct SsimParams
{
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

// Mean SSIM over all fully covered window positions, Gaussian weighting.
double ssim(const Frame &pred, const Frame &gt, const SsimParams &params = {});

// Partial autocorrelations for lags 1..max_lag (Durbin-Levinson on biased
// sample autocovariances).
std::vector<double> pacf(std::span<const double> series, int max_lag);

// PACF of per-pixel time series, averaged over every `stride`-th cell of each
// sequence. Constant pixels are skipped.
std::vector<double> mean_pixel_pacf(const std::vector<std::vector<Frame>> &sequences, int max_lag, int stride = 4);

struct FrameMetrics
{
    double nmse = 0.0;
    double rmse = 0.0;
    double ssim = 0.0;
    double psnr_db = 0.0;
};

struct MetricsRecord
{
    std::string model;
    std::string split;
    int context = 0;
    int pairs = 0;
    FrameMetrics aggregate;          // mean over all (pair, frame)
    std::vector<FrameMetrics> per_frame; // mean over pairs at each forecast step
};

using Predictor = std::function<std::vector<Frame>(std::span<const Frame> context, int horizon)>;

MetricsRecord evaluate(const std::string &model, const std::string &split, const Predictor &predictor,
                       std::span<const SequencePair> pairs);

// FNV-1a over the bit patterns of every target frame, in order.
std::uint64_t target_digest(std::span<const SequencePair> pairs);

struct AblationEntry
{
    int context = 0;
    MetricsRecord record;
    std::uint64_t target_digest = 0;
};

// Called once per context length with aligned train / val pairs; returns the
// trained predictor.
using AblationTrainer = std::function<Predictor(int context, const std::vector<SequencePair> &train,
                                                const std::vector<SequencePair> &val)>;

// Builds pairs for each context length (target = last `horizon` frames of
// every sequence), trains, and evaluates on `test`.
std::vector<AblationEntry> ablate_context(const std::vector<std::vector<Frame>> &train,
                                          const std::vector<std::vector<Frame>> &val,
                                          const std::vector<std::vector<Frame>> &test, const std::string &split,
                                          std::span<const int> contexts, int horizon, const AblationTrainer &trainer);

// model,split,Tc,frame_index,nmse,rmse,ssim,psnr_db; frame_index 0 is the aggregate.
void write_results_csv(const std::filesystem::path &path, std::span<const MetricsRecord> records);
std::vector<MetricsRecord> read_results_csv(const std::filesystem::path &path);

} // namespace radiomotion
