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

#include "radiomotion/autodiff.hpp"
#include "radiomotion/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radiomotion
{

template <typename T>
struct NamedTensor
{
    std::string name;
    ad::Tensor<T> *tensor = nullptr;
};

// Gate kernels of one ConvLSTM cell, kept separate as in the textbook cell.
template <typename T>
struct ConvLSTMCellParams
{
    int in_channels = 0;
    int hidden_channels = 0;
    int kernel_size = 3;
    ad::Tensor<T> W_xi, W_hi, W_xf, W_hf, W_xo, W_ho, W_xg, W_hg;
    ad::Tensor<T> b_i, b_f, b_o, b_g;

    // All-zero parameters of the right shapes.
    static ConvLSTMCellParams zeros(int in_channels, int hidden_channels, int kernel_size);
    void append_tensors(const std::string &prefix, std::vector<NamedTensor<T>> &out);
};

template <typename T>
struct RecurrentState
{
    ad::Var<T> H;
    ad::Var<T> C;
};

template <typename T>
RecurrentState<T> zero_state(ad::Tape<T> &tape, int hidden_channels, int height, int width);

// The cell parameters placed on a tape. The stacked kernel (4h, in + h, k, k)
// and bias (4h) are built from the individual gate tensors with concat, so
// gradients reach the originals.
template <typename T>
struct BoundCell
{
    const ConvLSTMCellParams<T> *params = nullptr;
    ad::Var<T> W_xi, W_hi, W_xf, W_hf, W_xo, W_ho, W_xg, W_hg;
    ad::Var<T> b_i, b_f, b_o, b_g;
    ad::Var<T> stacked_weight;
    ad::Var<T> stacked_bias;
};

template <typename T>
BoundCell<T> bind_cell(ad::Tape<T> &tape, ConvLSTMCellParams<T> &params);

// One step: one convolution over concat(X, H), then the fused gate update.
template <typename T>
RecurrentState<T> convlstm_step(const BoundCell<T> &cell, const ad::Var<T> &input, const RecurrentState<T> &state);

// Same update with each gate convolved and activated separately.
template <typename T>
RecurrentState<T> convlstm_step_reference(const BoundCell<T> &cell, const ad::Var<T> &input,
                                          const RecurrentState<T> &state);

struct ChannelPlan
{
    int level1 = 16;
    int level2 = 32;
    int kernel_size = 3;
};

template <typename T>
struct ForecasterParams
{
    ChannelPlan plan;
    ConvLSTMCellParams<T> enc1, enc2, dec2, dec1;
    ad::Tensor<T> up_w, up_b;     // (level2, level1, 2, 2), (level1)
    ad::Tensor<T> head_w, head_b; // (1, level1, 1, 1), (1)

    static ForecasterParams zeros(const ChannelPlan &plan);
    // Uniform in +-sqrt(1 / fan_in); forget-gate biases start at 1.
    static ForecasterParams initialized(const ChannelPlan &plan, std::uint64_t seed);

    std::vector<NamedTensor<T>> tensors();
    void set_requires_grad(bool on);
    void zero_grad();

    template <typename U>
    ForecasterParams<U> cast() const;
};

template <typename T>
struct BoundForecaster
{
    ad::Tape<T> *tape = nullptr;
    int level1 = 0;
    int level2 = 0;
    BoundCell<T> enc1, enc2, dec2, dec1;
    ad::Var<T> up_w, up_b, head_w, head_b;
};

template <typename T>
BoundForecaster<T> bind(ad::Tape<T> &tape, ForecasterParams<T> &params);

template <typename T>
struct EncodedStates
{
    RecurrentState<T> level1;
    RecurrentState<T> level2;
};

// Frames are (1, N, N) with N even. Throws on an empty context.
template <typename T>
EncodedStates<T> encode(const BoundForecaster<T> &model, std::span<const ad::Var<T>> context);

template <typename T>
struct DecoderState
{
    RecurrentState<T> level1;
    RecurrentState<T> level2;
    ad::Var<T> skip; // final encoder level-1 hidden state
};

template <typename T>
DecoderState<T> start_decoder(const EncodedStates<T> &encoded);

// One autoregressive decoder step; advances `state` and returns the frame.
template <typename T>
ad::Var<T> forecast_step(const BoundForecaster<T> &model, DecoderState<T> &state);

template <typename T>
std::vector<ad::Var<T>> forecast(const BoundForecaster<T> &model, const EncodedStates<T> &encoded, int horizon);

// Mean squared error over all frames and pixels.
template <typename T>
ad::Var<T> mse_loss(std::span<const ad::Var<T>> pred, std::span<const ad::Var<T>> target);

template <typename T>
ad::Var<T> frame_var(ad::Tape<T> &tape, const Frame &frame);
Frame to_frame(const ad::Tensor<float> &tensor);

// Inference without gradient bookkeeping.
std::vector<Frame> predict(ForecasterParams<float> &params, std::span<const Frame> context, int horizon);

// Builds the graph for one pair, backpropagates when `with_gradients`, and
// returns the loss.
double pair_loss(ForecasterParams<float> &params, const SequencePair &pair, bool with_gradients);

} // namespace radiomotion
