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

#include "radiomotion/checkpoint.hpp"
#include "radiomotion/dataset.hpp"
#include "radiomotion/training.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace radiomotion
{

// `horizon` copies of the final context frame.
std::vector<Frame> last_frame_repeat(std::span<const Frame> context, int horizon);

// Frame-to-frame network without temporal memory: three 3x3 convolutions
// (ReLU between) predicting a residual in logit space,
//   y = sigmoid(logit(clamp(x)) + f(x)),
// applied autoregressively from the last context frame. With the last layer
// zeroed, f = 0 and the rollout reproduces last_frame_repeat.
class NextFramePredictor
{
  public:
    static constexpr float kClamp = 1e-6f;

    explicit NextFramePredictor(int channels = 16);

    static NextFramePredictor initialized(int channels, std::uint64_t seed);
    static NextFramePredictor identity(int channels = 16);
    static NextFramePredictor load(const std::filesystem::path &dir);

    int channels() const { return channels_; }
    bool ready() const { return ready_; }

    // Trains on consecutive-frame pairs of the given sequences.
    TrainHistory train(const std::vector<std::vector<Frame>> &train_sequences,
                       const std::vector<std::vector<Frame>> &val_sequences, const TrainConfig &config,
                       const std::function<void(const EpochRecord &)> &on_epoch = {});

    Frame step(const Frame &frame);
    std::vector<Frame> rollout(const Frame &start, int steps);
    // Rolls forward from the last context frame. Throws if untrained.
    std::vector<Frame> apply(std::span<const Frame> context, int horizon);

    void save(const std::filesystem::path &dir, nlohmann::json metadata = {});
    std::vector<NamedTensor<float>> tensors();

  private:
    double pair_loss(const Frame &input, const Frame &target, bool with_gradients);

    int channels_;
    bool ready_ = false;
    ad::Tensor<float> w1_, b1_, w2_, b2_, w3_, b3_;
};

} // namespace radiomotion
