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

#include "radiomotion/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace radiomotion
{

void TrainConfig::validate() const
{
    if (!(learning_rate > 0) || batch_size <= 0 || max_epochs <= 0 || patience <= 0 || weight_decay < 0)
        throw std::invalid_argument("TrainConfig: learning_rate, batch_size, max_epochs, patience must be positive");
    if (patience > max_epochs)
        throw std::invalid_argument("TrainConfig: patience exceeds max_epochs");
}

TrainHistory fit(const std::vector<ad::Tensor<float> *> &params, std::size_t n_train, std::size_t n_val,
                 const SampleLoss &train_loss, const SampleLoss &val_loss, const TrainConfig &config,
                 const std::function<void(const EpochRecord &)> &on_epoch)
{
    config.validate();
    if (n_train == 0 || n_val == 0)
        throw std::invalid_argument("fit: empty training or validation split");
    for (ad::Tensor<float> *p : params)
        p->set_requires_grad(true);

    AdamW<float> opt(params, {config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay});
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory history;
    history.best_val_loss = std::numeric_limits<double>::infinity();
    std::vector<std::vector<float>> best(params.size());
    int since_best = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch)
    {
        std::shuffle(order.begin(), order.end(), rng);
        double train_sum = 0.0;
        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(config.batch_size))
        {
            const std::size_t end = std::min(n_train, start + static_cast<std::size_t>(config.batch_size));
            opt.zero_grad();
            for (std::size_t i = start; i < end; ++i)
                train_sum += train_loss(order[i], true);
            opt.scale_grads(1.0f / static_cast<float>(end - start));
            opt.step();
        }
        double val_sum = 0.0;
        for (std::size_t i = 0; i < n_val; ++i)
            val_sum += val_loss(i, false);

        EpochRecord rec{epoch, train_sum / static_cast<double>(n_train), val_sum / static_cast<double>(n_val)};
        history.epochs.push_back(rec);
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss))
            throw std::runtime_error("fit: loss diverged at epoch " + std::to_string(epoch));

        if (rec.val_loss < history.best_val_loss - config.min_improvement)
        {
            history.best_val_loss = rec.val_loss;
            history.best_epoch = epoch;
            since_best = 0;
            for (std::size_t k = 0; k < params.size(); ++k)
                best[k].assign(params[k]->data().begin(), params[k]->data().end());
        }
        else
        {
            ++since_best;
        }
        if (on_epoch)
            on_epoch(rec);
        if (since_best >= config.patience)
        {
            history.early_stopped = epoch < config.max_epochs;
            break;
        }
    }
    for (std::size_t k = 0; k < params.size(); ++k)
        if (!best[k].empty())
            std::copy(best[k].begin(), best[k].end(), params[k]->data().begin());
    for (ad::Tensor<float> *p : params)
    {
        p->zero_grad();
        p->set_requires_grad(false);
    }
    return history;
}

TrainHistory train_forecaster(ForecasterParams<float> &params, const std::vector<SequencePair> &train,
                              const std::vector<SequencePair> &val, const TrainConfig &config,
                              const std::function<void(const EpochRecord &)> &on_epoch)
{
    std::vector<ad::Tensor<float> *> tensors;
    for (auto &nt : params.tensors())
        tensors.push_back(nt.tensor);
    return fit(
        tensors, train.size(), val.size(),
        [&](std::size_t i, bool grad) { return pair_loss(params, train[i], grad); },
        [&](std::size_t i, bool grad) { return pair_loss(params, val[i], grad); }, config, on_epoch);
}

void write_history_csv(const std::filesystem::path &path, const TrainHistory &history)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "epoch,train_loss,val_loss\n" << std::setprecision(17);
    for (const EpochRecord &e : history.epochs)
        out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
}

} // namespace radiomotion
