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

#include <cstdint>
#include <vector>

namespace radiomotion
{

struct AdamWConfig
{
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

// Adam with decoupled weight decay. Reads each tensor's grad buffer.
template <typename T>
class AdamW
{
  public:
    AdamW(std::vector<ad::Tensor<T> *> params, AdamWConfig config);

    void step();
    // Scales every gradient, e.g. by 1 / batch size.
    void scale_grads(T factor);
    void zero_grad();
    std::int64_t steps() const { return t_; }
    const AdamWConfig &config() const { return config_; }

  private:
    std::vector<ad::Tensor<T> *> params_;
    std::vector<std::vector<double>> m_, v_;
    AdamWConfig config_;
    std::int64_t t_ = 0;
};

} // namespace radiomotion
