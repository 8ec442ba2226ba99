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

#include "radiomotion/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace radiomotion
{

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

std::vector<Frame> last_frame_repeat(std::span<const Frame> context, int horizon)
{
    if (context.empty())
        throw std::invalid_argument("last_frame_repeat: empty context");
    if (horizon < 0)
        throw std::invalid_argument("last_frame_repeat: negative horizon");
    return std::vector<Frame>(static_cast<std::size_t>(horizon), context.back());
}

NextFramePredictor::NextFramePredictor(int channels) : channels_(channels)
{
    if (channels <= 0)
        throw std::invalid_argument("NextFramePredictor: channels must be positive");
    w1_ = Tensor<float>(Shape{channels, 1, 3, 3});
    b1_ = Tensor<float>(Shape{channels});
    w2_ = Tensor<float>(Shape{channels, channels, 3, 3});
    b2_ = Tensor<float>(Shape{channels});
    w3_ = Tensor<float>(Shape{1, channels, 3, 3});
    b3_ = Tensor<float>(Shape{1});
}

NextFramePredictor NextFramePredictor::initialized(int channels, std::uint64_t seed)
{
    NextFramePredictor m(channels);
    std::mt19937_64 rng(seed);
    auto fill = [&](Tensor<float> &t, int fan_in) {
        std::uniform_real_distribution<double> d(-std::sqrt(1.0 / fan_in), std::sqrt(1.0 / fan_in));
        for (float &v : t.data())
            v = static_cast<float>(d(rng));
    };
    fill(m.w1_, 9);
    fill(m.b1_, 9);
    fill(m.w2_, 9 * channels);
    fill(m.b2_, 9 * channels);
    fill(m.w3_, 9 * channels);
    fill(m.b3_, 9 * channels);
    return m;
}

NextFramePredictor NextFramePredictor::identity(int channels)
{
    NextFramePredictor m = initialized(channels, 0);
    std::fill(m.w3_.data().begin(), m.w3_.data().end(), 0.0f);
    m.b3_[0] = 0.0f;
    m.ready_ = true;
    return m;
}

std::vector<NamedTensor<float>> NextFramePredictor::tensors()
{
    return {{"conv1.w", &w1_}, {"conv1.b", &b1_}, {"conv2.w", &w2_},
            {"conv2.b", &b2_}, {"conv3.w", &w3_}, {"conv3.b", &b3_}};
}

namespace
{
Var<float> forward(Tape<float> &tape, std::span<const NamedTensor<float>> p, const Var<float> &x)
{
    Var<float> w1 = tape.parameter(*p[0].tensor), b1 = tape.parameter(*p[1].tensor);
    Var<float> w2 = tape.parameter(*p[2].tensor), b2 = tape.parameter(*p[3].tensor);
    Var<float> w3 = tape.parameter(*p[4].tensor), b3 = tape.parameter(*p[5].tensor);
    Var<float> h = ad::relu(ad::conv2d<float>(x, w1, b1, 1));
    h = ad::relu(ad::conv2d<float>(h, w2, b2, 1));
    Var<float> residual = ad::conv2d<float>(h, w3, b3, 1);
    Tensor<float> logit(x.shape());
    for (std::size_t i = 0; i < logit.size(); ++i)
    {
        const float v = std::clamp(x.value()[i], NextFramePredictor::kClamp, 1.0f - NextFramePredictor::kClamp);
        logit[i] = std::log(v / (1.0f - v));
    }
    return ad::sigmoid(ad::add(tape.constant(std::move(logit)), residual));
}
} // namespace

double NextFramePredictor::pair_loss(const Frame &input, const Frame &target, bool with_gradients)
{
    Tape<float> tape(with_gradients);
    auto p = tensors();
    Var<float> y = forward(tape, p, frame_var(tape, input));
    Var<float> loss = ad::mse(y, frame_var(tape, target));
    if (with_gradients)
        tape.backward(loss);
    return loss.value()[0];
}

Frame NextFramePredictor::step(const Frame &frame)
{
    if (!ready_)
        throw std::logic_error("NextFramePredictor: model has not been trained or loaded");
    Tape<float> tape(false);
    auto p = tensors();
    return to_frame(forward(tape, p, frame_var(tape, frame)).value());
}

std::vector<Frame> NextFramePredictor::rollout(const Frame &start, int steps)
{
    if (steps < 0)
        throw std::invalid_argument("NextFramePredictor: negative horizon");
    std::vector<Frame> out;
    Frame cur = start;
    for (int t = 0; t < steps; ++t)
    {
        cur = step(cur);
        out.push_back(cur);
    }
    return out;
}

std::vector<Frame> NextFramePredictor::apply(std::span<const Frame> context, int horizon)
{
    if (context.empty())
        throw std::invalid_argument("NextFramePredictor: empty context");
    if (!ready_)
        throw std::logic_error("NextFramePredictor: model has not been trained or loaded");
    return rollout(context.back(), horizon);
}

TrainHistory NextFramePredictor::train(const std::vector<std::vector<Frame>> &train_sequences,
                                       const std::vector<std::vector<Frame>> &val_sequences,
                                       const TrainConfig &config,
                                       const std::function<void(const EpochRecord &)> &on_epoch)
{
    using Link = std::pair<const Frame *, const Frame *>;
    auto links = [](const std::vector<std::vector<Frame>> &seqs) {
        std::vector<Link> out;
        for (const auto &s : seqs)
            for (std::size_t t = 0; t + 1 < s.size(); ++t)
                out.emplace_back(&s[t], &s[t + 1]);
        return out;
    };
    const std::vector<Link> tr = links(train_sequences), va = links(val_sequences);
    std::vector<Tensor<float> *> params;
    for (auto &nt : tensors())
        params.push_back(nt.tensor);
    TrainHistory h = fit(
        params, tr.size(), va.size(),
        [&](std::size_t i, bool grad) { return pair_loss(*tr[i].first, *tr[i].second, grad); },
        [&](std::size_t i, bool grad) { return pair_loss(*va[i].first, *va[i].second, grad); }, config, on_epoch);
    ready_ = true;
    return h;
}

void NextFramePredictor::save(const std::filesystem::path &dir, nlohmann::json metadata)
{
    metadata["model"] = "nextframe";
    metadata["channels"] = channels_;
    auto t = tensors();
    save_checkpoint(dir, t, metadata);
}

NextFramePredictor NextFramePredictor::load(const std::filesystem::path &dir)
{
    nlohmann::json meta = read_checkpoint_metadata(dir);
    if (meta.value("model", "") != "nextframe")
        throw std::runtime_error("checkpoint " + dir.string() + " is not a next-frame model");
    NextFramePredictor m(meta.at("channels").get<int>());
    auto t = m.tensors();
    load_checkpoint(dir, t);
    m.ready_ = true;
    return m;
}

} // namespace radiomotion
