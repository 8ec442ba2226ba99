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

#include "radiomotion/forecaster.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace radiomotion
{

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

template <typename T>
ConvLSTMCellParams<T> ConvLSTMCellParams<T>::zeros(int in_channels, int hidden_channels, int kernel_size)
{
    if (in_channels <= 0 || hidden_channels <= 0)
        throw std::invalid_argument("ConvLSTMCellParams: channel counts must be positive");
    if (kernel_size <= 0 || kernel_size % 2 == 0)
        throw std::invalid_argument("ConvLSTMCellParams: kernel size must be odd");
    ConvLSTMCellParams p;
    p.in_channels = in_channels;
    p.hidden_channels = hidden_channels;
    p.kernel_size = kernel_size;
    const Shape wx{hidden_channels, in_channels, kernel_size, kernel_size};
    const Shape wh{hidden_channels, hidden_channels, kernel_size, kernel_size};
    for (Tensor<T> *t : {&p.W_xi, &p.W_xf, &p.W_xo, &p.W_xg})
        *t = Tensor<T>(wx);
    for (Tensor<T> *t : {&p.W_hi, &p.W_hf, &p.W_ho, &p.W_hg})
        *t = Tensor<T>(wh);
    for (Tensor<T> *t : {&p.b_i, &p.b_f, &p.b_o, &p.b_g})
        *t = Tensor<T>(Shape{hidden_channels});
    return p;
}

template <typename T>
void ConvLSTMCellParams<T>::append_tensors(const std::string &prefix, std::vector<NamedTensor<T>> &out)
{
    out.push_back({prefix + ".W_xi", &W_xi});
    out.push_back({prefix + ".W_hi", &W_hi});
    out.push_back({prefix + ".W_xf", &W_xf});
    out.push_back({prefix + ".W_hf", &W_hf});
    out.push_back({prefix + ".W_xo", &W_xo});
    out.push_back({prefix + ".W_ho", &W_ho});
    out.push_back({prefix + ".W_xg", &W_xg});
    out.push_back({prefix + ".W_hg", &W_hg});
    out.push_back({prefix + ".b_i", &b_i});
    out.push_back({prefix + ".b_f", &b_f});
    out.push_back({prefix + ".b_o", &b_o});
    out.push_back({prefix + ".b_g", &b_g});
}

template <typename T>
RecurrentState<T> zero_state(Tape<T> &tape, int hidden_channels, int height, int width)
{
    Shape s{hidden_channels, height, width};
    return {tape.constant(Tensor<T>(s)), tape.constant(Tensor<T>(s))};
}

template <typename T>
BoundCell<T> bind_cell(Tape<T> &tape, ConvLSTMCellParams<T> &p)
{
    BoundCell<T> c;
    c.params = &p;
    c.W_xi = tape.parameter(p.W_xi);
    c.W_hi = tape.parameter(p.W_hi);
    c.W_xf = tape.parameter(p.W_xf);
    c.W_hf = tape.parameter(p.W_hf);
    c.W_xo = tape.parameter(p.W_xo);
    c.W_ho = tape.parameter(p.W_ho);
    c.W_xg = tape.parameter(p.W_xg);
    c.W_hg = tape.parameter(p.W_hg);
    c.b_i = tape.parameter(p.b_i);
    c.b_f = tape.parameter(p.b_f);
    c.b_o = tape.parameter(p.b_o);
    c.b_g = tape.parameter(p.b_g);
    c.stacked_weight = ad::concat<T>({ad::concat<T>({c.W_xi, c.W_hi}, 1), ad::concat<T>({c.W_xf, c.W_hf}, 1),
                                      ad::concat<T>({c.W_xo, c.W_ho}, 1), ad::concat<T>({c.W_xg, c.W_hg}, 1)},
                                     0);
    c.stacked_bias = ad::concat<T>({c.b_i, c.b_f, c.b_o, c.b_g}, 0);
    return c;
}

namespace
{
template <typename T>
void check_step_shapes(const BoundCell<T> &cell, const Var<T> &input, const RecurrentState<T> &state)
{
    const auto &p = *cell.params;
    const Shape &xs = input.shape();
    if (xs.size() != 3 || xs[0] != p.in_channels)
        throw std::invalid_argument("convlstm_step: input " + ad::shape_string(xs) + " does not have " +
                                    std::to_string(p.in_channels) + " channels");
    const Shape expect{p.hidden_channels, xs[1], xs[2]};
    if (state.H.shape() != expect || state.C.shape() != expect)
        throw std::invalid_argument("convlstm_step: state " + ad::shape_string(state.H.shape()) + " / " +
                                    ad::shape_string(state.C.shape()) + " does not match " +
                                    ad::shape_string(expect));
}
} // namespace

template <typename T>
RecurrentState<T> convlstm_step(const BoundCell<T> &cell, const Var<T> &input, const RecurrentState<T> &state)
{
    check_step_shapes(cell, input, state);
    const int h = cell.params->hidden_channels;
    Var<T> z = ad::conv2d<T>(ad::concat<T>({input, state.H}, 0), cell.stacked_weight, cell.stacked_bias,
                             cell.params->kernel_size / 2);
    Var<T> ch = ad::lstm_pointwise(z, state.C);
    return {ad::slice(ch, 0, h, h), ad::slice(ch, 0, 0, h)};
}

template <typename T>
RecurrentState<T> convlstm_step_reference(const BoundCell<T> &cell, const Var<T> &input,
                                          const RecurrentState<T> &state)
{
    check_step_shapes(cell, input, state);
    const int pad = cell.params->kernel_size / 2;
    auto pre = [&](const Var<T> &wx, const Var<T> &wh, const Var<T> &b) {
        return ad::add(ad::conv2d<T>(input, wx, b, pad), ad::conv2d<T>(state.H, wh, std::nullopt, pad));
    };
    Var<T> i = ad::sigmoid(pre(cell.W_xi, cell.W_hi, cell.b_i));
    Var<T> f = ad::sigmoid(pre(cell.W_xf, cell.W_hf, cell.b_f));
    Var<T> o = ad::sigmoid(pre(cell.W_xo, cell.W_ho, cell.b_o));
    Var<T> g = ad::tanh(pre(cell.W_xg, cell.W_hg, cell.b_g));
    Var<T> c = ad::add(ad::mul(f, state.C), ad::mul(i, g));
    return {ad::mul(o, ad::tanh(c)), c};
}

template <typename T>
ForecasterParams<T> ForecasterParams<T>::zeros(const ChannelPlan &plan)
{
    if (plan.level1 <= 0 || plan.level2 <= 0)
        throw std::invalid_argument("ChannelPlan: channel counts must be positive");
    ForecasterParams p;
    p.plan = plan;
    const int k = plan.kernel_size;
    p.enc1 = ConvLSTMCellParams<T>::zeros(1, plan.level1, k);
    p.enc2 = ConvLSTMCellParams<T>::zeros(plan.level1, plan.level2, k);
    p.dec2 = ConvLSTMCellParams<T>::zeros(plan.level2, plan.level2, k);
    p.dec1 = ConvLSTMCellParams<T>::zeros(2 * plan.level1, plan.level1, k);
    p.up_w = Tensor<T>(Shape{plan.level2, plan.level1, 2, 2});
    p.up_b = Tensor<T>(Shape{plan.level1});
    p.head_w = Tensor<T>(Shape{1, plan.level1, 1, 1});
    p.head_b = Tensor<T>(Shape{1});
    return p;
}

namespace
{
template <typename T>
void fill_uniform(Tensor<T> &t, double bound, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (T &v : t.data())
        v = static_cast<T>(dist(rng));
}

template <typename T>
void init_cell(ConvLSTMCellParams<T> &c, std::mt19937_64 &rng)
{
    const int k2 = c.kernel_size * c.kernel_size;
    // The gate convolution sees input and hidden channels together.
    const double bound = std::sqrt(1.0 / ((c.in_channels + c.hidden_channels) * k2));
    for (Tensor<T> *t : {&c.W_xi, &c.W_hi, &c.W_xf, &c.W_hf, &c.W_xo, &c.W_ho, &c.W_xg, &c.W_hg, &c.b_i, &c.b_o,
                         &c.b_g})
        fill_uniform(*t, bound, rng);
    for (T &v : c.b_f.data())
        v = T(1);
}
} // namespace

template <typename T>
ForecasterParams<T> ForecasterParams<T>::initialized(const ChannelPlan &plan, std::uint64_t seed)
{
    ForecasterParams p = zeros(plan);
    std::mt19937_64 rng(seed);
    init_cell(p.enc1, rng);
    init_cell(p.enc2, rng);
    init_cell(p.dec2, rng);
    init_cell(p.dec1, rng);
    const double up_bound = std::sqrt(1.0 / (plan.level2 * 4));
    fill_uniform(p.up_w, up_bound, rng);
    fill_uniform(p.up_b, up_bound, rng);
    const double head_bound = std::sqrt(1.0 / plan.level1);
    fill_uniform(p.head_w, head_bound, rng);
    fill_uniform(p.head_b, head_bound, rng);
    return p;
}

template <typename T>
std::vector<NamedTensor<T>> ForecasterParams<T>::tensors()
{
    std::vector<NamedTensor<T>> out;
    enc1.append_tensors("enc1", out);
    enc2.append_tensors("enc2", out);
    dec2.append_tensors("dec2", out);
    dec1.append_tensors("dec1", out);
    out.push_back({"up.w", &up_w});
    out.push_back({"up.b", &up_b});
    out.push_back({"head.w", &head_w});
    out.push_back({"head.b", &head_b});
    return out;
}

template <typename T>
void ForecasterParams<T>::set_requires_grad(bool on)
{
    for (auto &nt : tensors())
        nt.tensor->set_requires_grad(on);
}

template <typename T>
void ForecasterParams<T>::zero_grad()
{
    for (auto &nt : tensors())
        nt.tensor->zero_grad();
}

template <typename T>
template <typename U>
ForecasterParams<U> ForecasterParams<T>::cast() const
{
    ForecasterParams<U> out = ForecasterParams<U>::zeros(plan);
    auto src = const_cast<ForecasterParams *>(this)->tensors();
    auto dst = out.tensors();
    for (std::size_t i = 0; i < src.size(); ++i)
        *dst[i].tensor = src[i].tensor->template cast<U>();
    return out;
}

template <typename T>
BoundForecaster<T> bind(Tape<T> &tape, ForecasterParams<T> &p)
{
    BoundForecaster<T> m;
    m.tape = &tape;
    m.level1 = p.plan.level1;
    m.level2 = p.plan.level2;
    m.enc1 = bind_cell(tape, p.enc1);
    m.enc2 = bind_cell(tape, p.enc2);
    m.dec2 = bind_cell(tape, p.dec2);
    m.dec1 = bind_cell(tape, p.dec1);
    m.up_w = tape.parameter(p.up_w);
    m.up_b = tape.parameter(p.up_b);
    m.head_w = tape.parameter(p.head_w);
    m.head_b = tape.parameter(p.head_b);
    return m;
}

template <typename T>
EncodedStates<T> encode(const BoundForecaster<T> &m, std::span<const Var<T>> context)
{
    if (context.empty())
        throw std::invalid_argument("encode: empty context");
    const Shape &fs = context.front().shape();
    if (fs.size() != 3 || fs[0] != 1 || fs[1] % 2 != 0 || fs[2] % 2 != 0)
        throw std::invalid_argument("encode: frames must be (1, N, N) with even N, got " + ad::shape_string(fs));
    EncodedStates<T> s;
    s.level1 = zero_state(*m.tape, m.level1, fs[1], fs[2]);
    s.level2 = zero_state(*m.tape, m.level2, fs[1] / 2, fs[2] / 2);
    for (const Var<T> &frame : context)
    {
        if (frame.shape() != fs)
            throw std::invalid_argument("encode: context frames differ in shape");
        s.level1 = convlstm_step(m.enc1, frame, s.level1);
        s.level2 = convlstm_step(m.enc2, ad::max_pool2(s.level1.H), s.level2);
    }
    return s;
}

template <typename T>
DecoderState<T> start_decoder(const EncodedStates<T> &encoded)
{
    return {encoded.level1, encoded.level2, encoded.level1.H};
}

template <typename T>
Var<T> forecast_step(const BoundForecaster<T> &m, DecoderState<T> &state)
{
    state.level2 = convlstm_step(m.dec2, state.level2.H, state.level2);
    Var<T> up = ad::conv_transpose2<T>(state.level2.H, m.up_w, m.up_b);
    state.level1 = convlstm_step(m.dec1, ad::concat<T>({up, state.skip}, 0), state.level1);
    return ad::sigmoid(ad::conv2d<T>(state.level1.H, m.head_w, m.head_b, 0));
}

template <typename T>
std::vector<Var<T>> forecast(const BoundForecaster<T> &m, const EncodedStates<T> &encoded, int horizon)
{
    if (horizon < 0)
        throw std::invalid_argument("forecast: negative horizon");
    if (encoded.level1.H.shape().at(0) != m.level1 || encoded.level2.H.shape().at(0) != m.level2)
        throw std::invalid_argument("forecast: states do not match the model's channel plan");
    DecoderState<T> state = start_decoder(encoded);
    std::vector<Var<T>> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t)
        out.push_back(forecast_step(m, state));
    return out;
}

template <typename T>
Var<T> mse_loss(std::span<const Var<T>> pred, std::span<const Var<T>> target)
{
    if (pred.size() != target.size() || pred.empty())
        throw std::invalid_argument("mse_loss: need equally many (and at least one) predicted and target frames");
    std::vector<Var<T>> p(pred.begin(), pred.end()), t(target.begin(), target.end());
    return ad::mse(ad::concat(p, 0), ad::concat(t, 0));
}

template <typename T>
Var<T> frame_var(Tape<T> &tape, const Frame &frame)
{
    Tensor<T> t(Shape{1, frame.size, frame.size});
    for (std::size_t i = 0; i < frame.values.size(); ++i)
        t[i] = static_cast<T>(frame.values[i]);
    return tape.constant(std::move(t));
}

Frame to_frame(const Tensor<float> &tensor)
{
    const Shape &s = tensor.shape();
    if (s.size() != 3 || s[0] != 1 || s[1] != s[2])
        throw std::invalid_argument("to_frame: expected (1, N, N), got " + ad::shape_string(s));
    Frame f(s[1]);
    std::copy(tensor.data().begin(), tensor.data().end(), f.values.begin());
    return f;
}

std::vector<Frame> predict(ForecasterParams<float> &params, std::span<const Frame> context, int horizon)
{
    Tape<float> tape(false);
    BoundForecaster<float> m = bind(tape, params);
    std::vector<Var<float>> ctx;
    for (const Frame &f : context)
        ctx.push_back(frame_var(tape, f));
    std::vector<Frame> out;
    for (const Var<float> &v : forecast(m, encode<float>(m, ctx), horizon))
        out.push_back(to_frame(v.value()));
    return out;
}

double pair_loss(ForecasterParams<float> &params, const SequencePair &pair, bool with_gradients)
{
    Tape<float> tape(with_gradients);
    BoundForecaster<float> m = bind(tape, params);
    std::vector<Var<float>> ctx, tgt;
    for (const Frame &f : pair.context)
        ctx.push_back(frame_var(tape, f));
    for (const Frame &f : pair.target)
        tgt.push_back(frame_var(tape, f));
    std::vector<Var<float>> pred = forecast(m, encode<float>(m, ctx), static_cast<int>(tgt.size()));
    Var<float> loss = mse_loss<float>(pred, tgt);
    if (with_gradients)
        tape.backward(loss);
    return loss.value()[0];
}

#define RADIOMOTION_INSTANTIATE(T)                                                                                    \
    template struct ConvLSTMCellParams<T>;                                                                            \
    template struct ForecasterParams<T>;                                                                              \
    template RecurrentState<T> zero_state(Tape<T> &, int, int, int);                                                  \
    template BoundCell<T> bind_cell(Tape<T> &, ConvLSTMCellParams<T> &);                                              \
    template RecurrentState<T> convlstm_step(const BoundCell<T> &, const Var<T> &, const RecurrentState<T> &);         \
    template RecurrentState<T> convlstm_step_reference(const BoundCell<T> &, const Var<T> &,                          \
                                                       const RecurrentState<T> &);                                    \
    template BoundForecaster<T> bind(Tape<T> &, ForecasterParams<T> &);                                               \
    template EncodedStates<T> encode(const BoundForecaster<T> &, std::span<const Var<T>>);                            \
    template DecoderState<T> start_decoder(const EncodedStates<T> &);                                                 \
    template Var<T> forecast_step(const BoundForecaster<T> &, DecoderState<T> &);                                     \
    template std::vector<Var<T>> forecast(const BoundForecaster<T> &, const EncodedStates<T> &, int);                 \
    template Var<T> mse_loss(std::span<const Var<T>>, std::span<const Var<T>>);                                       \
    template Var<T> frame_var(Tape<T> &, const Frame &);

RADIOMOTION_INSTANTIATE(float)
RADIOMOTION_INSTANTIATE(double)
#undef RADIOMOTION_INSTANTIATE

template ForecasterParams<double> ForecasterParams<float>::cast<double>() const;
template ForecasterParams<float> ForecasterParams<double>::cast<float>() const;

} // namespace radiomotion
