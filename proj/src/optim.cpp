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

#include "radiomotion/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace radiomotion
{

template <typename T>
AdamW<T>::AdamW(std::vector<ad::Tensor<T> *> params, AdamWConfig config)
    : params_(std::move(params)), config_(config)
{
    if (!(config_.learning_rate > 0) || config_.weight_decay < 0)
        throw std::invalid_argument("AdamW: learning rate must be positive and weight decay non-negative");
    for (ad::Tensor<T> *p : params_)
    {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

template <typename T>
void AdamW<T>::step()
{
    ++t_;
    const double lr = config_.learning_rate, b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k)
    {
        ad::Tensor<T> &p = *params_[k];
        std::span<const T> g = std::as_const(p).grad();
        if (g.size() != p.size())
            continue; // never received a gradient
        std::vector<double> &m = m_[k], &v = v_[k];
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            double w = static_cast<double>(p[i]);
            const double gi = static_cast<double>(g[i]);
            w -= lr * config_.weight_decay * w;
            m[i] = b1 * m[i] + (1.0 - b1) * gi;
            v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
            w -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
            p[i] = static_cast<T>(w);
        }
    }
}

template <typename T>
void AdamW<T>::scale_grads(T factor)
{
    for (ad::Tensor<T> *p : params_)
        if (p->has_grad())
            for (T &g : p->grad())
                g *= factor;
}

template <typename T>
void AdamW<T>::zero_grad()
{
    for (ad::Tensor<T> *p : params_)
        p->zero_grad();
}

template class AdamW<float>;
template class AdamW<double>;

} // namespace radiomotion
