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

#include "radiomotion/forecaster.hpp"
#include "radiomotion/optim.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace radiomotion
{

struct TrainConfig
{
    double learning_rate = 1e-3;
    int batch_size = 8;
    int max_epochs = 40;
    int patience = 30;
    double weight_decay = 1e-4;
    std::uint64_t seed = 1;
    double min_improvement = 1e-6; // smaller validation gains do not reset patience

    void validate() const;
};

struct EpochRecord
{
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainHistory
{
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    bool early_stopped = false;
};

// Loss of sample `index`; when `train` is set it must also backpropagate,
// accumulating into the parameters' grad buffers.
using SampleLoss = std::function<double(std::size_t index, bool train)>;

// Minibatch AdamW over shuffled training samples, validation after each
// epoch, patience-based stop. Leaves the best-validation weights in `params`.
TrainHistory fit(const std::vector<ad::Tensor<float> *> &params, std::size_t n_train, std::size_t n_val,
                 const SampleLoss &train_loss, const SampleLoss &val_loss, const TrainConfig &config,
                 const std::function<void(const EpochRecord &)> &on_epoch = {});

// RadioLSTM over sequence pairs.
TrainHistory train_forecaster(ForecasterParams<float> &params, const std::vector<SequencePair> &train,
                              const std::vector<SequencePair> &val, const TrainConfig &config,
                              const std::function<void(const EpochRecord &)> &on_epoch = {});

void write_history_csv(const std::filesystem::path &path, const TrainHistory &history);

} // namespace radiomotion
