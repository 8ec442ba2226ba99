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

#include "radiomotion/tensor.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace radiomotion::ad
{

template <typename T>
class Tape;

// Handle to a value recorded on a tape.
template <typename T>
class Var
{
  public:
    Var() = default;
    Var(Tape<T> *tape, std::size_t id) : tape_(tape), id_(id) {}

    const Tensor<T> &value() const { return tape_->value(id_); }
    const Shape &shape() const { return value().shape(); }
    Tape<T> *tape() const { return tape_; }
    std::size_t id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

  private:
    Tape<T> *tape_ = nullptr;
    std::size_t id_ = 0;
};

// Records operations in execution order; backward() replays them in reverse.
// Gradients of parameters accumulate into their Tensor::grad() buffers across
// calls until zero_grad().
template <typename T>
class Tape
{
  public:
    // Receives the gradient and the value of the node being differentiated.
    using Backward = std::function<void(std::span<const T> out_grad, const Tensor<T> &out_value)>;

    // With record_gradients off nothing needs a gradient and no backward
    // closures (or their saved buffers) are kept.
    explicit Tape(bool record_gradients = true) : record_gradients_(record_gradients) {}
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var<T> constant(Tensor<T> value);
    // The tensor must outlive the tape. Gradients flow only if it requires_grad.
    Var<T> parameter(Tensor<T> &tensor);

    void backward(const Var<T> &loss);

    const Tensor<T> &value(std::size_t id) const;
    bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
    std::size_t size() const { return nodes_.size(); }

    // For op implementations: `fn` is only kept when some parent needs a gradient.
    Var<T> record(Tensor<T> value, std::initializer_list<std::size_t> parents, Backward fn);
    Var<T> record(Tensor<T> value, const std::vector<std::size_t> &parents, Backward fn);
    // Gradient accumulator of a node that needs one.
    std::span<T> grad_buffer(std::size_t id);

  private:
    struct Node
    {
        Tensor<T> owned;
        Tensor<T> *external = nullptr;
        Buffer<T> grad;
        bool needs_grad = false;
        Backward backward;
    };
    std::deque<Node> nodes_;
    bool record_gradients_ = true;
};

// Elementwise.
template <typename T> Var<T> add(const Var<T> &a, const Var<T> &b);
template <typename T> Var<T> sub(const Var<T> &a, const Var<T> &b);
template <typename T> Var<T> mul(const Var<T> &a, const Var<T> &b);
template <typename T> Var<T> scale(const Var<T> &a, T s);
template <typename T> Var<T> sigmoid(const Var<T> &a);
template <typename T> Var<T> tanh(const Var<T> &a);
template <typename T> Var<T> relu(const Var<T> &a);

// Reductions to a one-element tensor.
template <typename T> Var<T> sum(const Var<T> &a);
template <typename T> Var<T> mse(const Var<T> &pred, const Var<T> &target);

// Shape manipulation along any axis.
template <typename T> Var<T> concat(const std::vector<Var<T>> &parts, int axis);
template <typename T> Var<T> slice(const Var<T> &a, int axis, int begin, int count);

// Cross-correlation of x (C, H, W) with w (O, C, k, k), zero padding.
template <typename T>
Var<T> conv2d(const Var<T> &x, const Var<T> &w, const std::optional<Var<T>> &bias, int padding);

// Stride-2, 2x2 transposed convolution: x (C, H, W), w (C, O, 2, 2) -> (O, 2H, 2W).
template <typename T>
Var<T> conv_transpose2(const Var<T> &x, const Var<T> &w, const std::optional<Var<T>> &bias);

// 2x2 max pooling; ties route the gradient to the first maximum in scan order.
template <typename T> Var<T> max_pool2(const Var<T> &x);

// Fused LSTM state update. `gates` stacks the pre-activations (i, f, o, g)
// along channels, each `hidden` wide; `cell` is the previous cell state.
// Returns (C', H') stacked along channels: C' = f*C + i*g, H' = o*tanh(C').
template <typename T> Var<T> lstm_pointwise(const Var<T> &gates, const Var<T> &cell);

} // namespace radiomotion::ad
