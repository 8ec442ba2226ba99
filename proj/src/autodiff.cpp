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

#include "radiomotion/autodiff.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace radiomotion::ad
{

std::string shape_string(const Shape &shape)
{
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i)
    {
        if (i)
            s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

namespace
{

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<MatR<T>>;
template <typename T>
using CMap = Eigen::Map<const MatR<T>>;
template <typename T>
using Arr = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using CArr = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;

void require(bool ok, const std::string &what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

template <typename T>
void require_same_shape(const Var<T> &a, const Var<T> &b, const char *op)
{
    require(a.tape() == b.tape(), std::string(op) + ": operands live on different tapes");
    require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                                        shape_string(b.shape()));
}

template <typename T>
void require_chw(const Var<T> &a, const char *op)
{
    require(a.shape().size() == 3, std::string(op) + ": expected (C, H, W), got " + shape_string(a.shape()));
}

template <typename T, typename F, typename G>
Var<T> unary(const Var<T> &a, F forward, G derivative)
{
    const Tensor<T> &x = a.value();
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = forward(x[i]);
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id();
    return tape->record(std::move(y), {ia}, [tape, ia, derivative](std::span<const T> g, const Tensor<T> &) {
        const Tensor<T> &x = tape->value(ia);
        std::span<T> gx = tape->grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i)
            gx[i] += g[i] * derivative(x[i]);
    });
}

// im2col for a (C, H, W) input, same-size output, k x k kernel.
template <typename T>
void im2col(const T *x, int c, int h, int w, int k, int pad, T *col)
{
    const int hw = h * w;
    for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx)
            {
                T *row = col + static_cast<std::size_t>((ci * k + ky) * k + kx) * hw;
                const int dy = ky - pad, dx = kx - pad;
                for (int oy = 0; oy < h; ++oy)
                {
                    T *dst = row + oy * w;
                    const int iy = oy + dy;
                    if (iy < 0 || iy >= h)
                    {
                        std::fill(dst, dst + w, T(0));
                        continue;
                    }
                    const T *src = x + (static_cast<std::size_t>(ci) * h + iy) * w;
                    const int lo = std::max(0, -dx), hi = std::min(w, w - dx);
                    std::fill(dst, dst + lo, T(0));
                    if (hi > lo)
                        std::memcpy(dst + lo, src + lo + dx, sizeof(T) * static_cast<std::size_t>(hi - lo));
                    std::fill(dst + std::max(hi, lo), dst + w, T(0));
                }
            }
}

template <typename T>
void col2im_add(const T *col, int c, int h, int w, int k, int pad, T *x)
{
    const int hw = h * w;
    for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx)
            {
                const T *row = col + static_cast<std::size_t>((ci * k + ky) * k + kx) * hw;
                const int dy = ky - pad, dx = kx - pad;
                for (int oy = 0; oy < h; ++oy)
                {
                    const int iy = oy + dy;
                    if (iy < 0 || iy >= h)
                        continue;
                    const T *src = row + oy * w;
                    T *dst = x + (static_cast<std::size_t>(ci) * h + iy) * w;
                    const int lo = std::max(0, -dx), hi = std::min(w, w - dx);
                    for (int ox = lo; ox < hi; ++ox)
                        dst[ox + dx] += src[ox];
                }
            }
}

} // namespace

// ---------------------------------------------------------------- Tape

template <typename T>
Var<T> Tape<T>::constant(Tensor<T> value)
{
    Node n;
    n.owned = std::move(value);
    nodes_.push_back(std::move(n));
    return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::parameter(Tensor<T> &tensor)
{
    Node n;
    n.external = &tensor;
    n.needs_grad = record_gradients_ && tensor.requires_grad();
    nodes_.push_back(std::move(n));
    return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
const Tensor<T> &Tape<T>::value(std::size_t id) const
{
    const Node &n = nodes_.at(id);
    return n.external ? *n.external : n.owned;
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<std::size_t> parents, Backward fn)
{
    return record(std::move(value), std::vector<std::size_t>(parents), std::move(fn));
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, const std::vector<std::size_t> &parents, Backward fn)
{
    Node n;
    n.owned = std::move(value);
    for (std::size_t p : parents)
        n.needs_grad = n.needs_grad || nodes_.at(p).needs_grad;
    if (n.needs_grad)
        n.backward = std::move(fn);
    nodes_.push_back(std::move(n));
    return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
std::span<T> Tape<T>::grad_buffer(std::size_t id)
{
    Node &n = nodes_[id];
    const std::size_t len = value(id).size();
    if (n.grad.size() != len)
        n.grad.assign(len, T(0));
    return n.grad;
}

template <typename T>
void Tape<T>::backward(const Var<T> &loss)
{
    if (loss.tape() != this)
        throw std::invalid_argument("backward: loss belongs to another tape");
    if (value(loss.id()).size() != 1)
        throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                    shape_string(value(loss.id()).shape()));
    for (Node &n : nodes_)
        n.grad.clear();
    if (!nodes_[loss.id()].needs_grad)
        return;
    grad_buffer(loss.id())[0] = T(1);
    for (std::size_t id = loss.id() + 1; id-- > 0;)
    {
        Node &n = nodes_[id];
        if (n.grad.empty() || !n.needs_grad)
            continue;
        if (n.external)
        {
            std::span<T> acc = n.external->grad();
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += n.grad[i];
        }
        else if (n.backward)
        {
            n.backward(n.grad, n.owned);
        }
        // Release as soon as consumed; nothing upstream reads it again.
        Buffer<T>().swap(n.grad);
    }
}

// ---------------------------------------------------------------- elementwise

template <typename T>
Var<T> add(const Var<T> &a, const Var<T> &b)
{
    require_same_shape(a, b, "add");
    Tensor<T> y(a.shape());
    const Tensor<T> &x1 = a.value(), &x2 = b.value();
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = x1[i] + x2[i];
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id(), ib = b.id();
    return tape->record(std::move(y), {ia, ib}, [tape, ia, ib](std::span<const T> g, const Tensor<T> &) {
        for (std::size_t id : {ia, ib})
            if (tape->needs_grad(id))
            {
                std::span<T> gx = tape->grad_buffer(id);
                for (std::size_t i = 0; i < g.size(); ++i)
                    gx[i] += g[i];
            }
    });
}

template <typename T>
Var<T> sub(const Var<T> &a, const Var<T> &b)
{
    require_same_shape(a, b, "sub");
    Tensor<T> y(a.shape());
    const Tensor<T> &x1 = a.value(), &x2 = b.value();
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = x1[i] - x2[i];
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id(), ib = b.id();
    return tape->record(std::move(y), {ia, ib}, [tape, ia, ib](std::span<const T> g, const Tensor<T> &) {
        if (tape->needs_grad(ia))
        {
            std::span<T> gx = tape->grad_buffer(ia);
            for (std::size_t i = 0; i < g.size(); ++i)
                gx[i] += g[i];
        }
        if (tape->needs_grad(ib))
        {
            std::span<T> gx = tape->grad_buffer(ib);
            for (std::size_t i = 0; i < g.size(); ++i)
                gx[i] -= g[i];
        }
    });
}

template <typename T>
Var<T> mul(const Var<T> &a, const Var<T> &b)
{
    require_same_shape(a, b, "mul");
    Tensor<T> y(a.shape());
    const Tensor<T> &x1 = a.value(), &x2 = b.value();
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = x1[i] * x2[i];
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id(), ib = b.id();
    return tape->record(std::move(y), {ia, ib}, [tape, ia, ib](std::span<const T> g, const Tensor<T> &) {
        const Tensor<T> &x1 = tape->value(ia), &x2 = tape->value(ib);
        if (tape->needs_grad(ia))
        {
            std::span<T> gx = tape->grad_buffer(ia);
            for (std::size_t i = 0; i < g.size(); ++i)
                gx[i] += g[i] * x2[i];
        }
        if (tape->needs_grad(ib))
        {
            std::span<T> gx = tape->grad_buffer(ib);
            for (std::size_t i = 0; i < g.size(); ++i)
                gx[i] += g[i] * x1[i];
        }
    });
}

template <typename T>
Var<T> scale(const Var<T> &a, T s)
{
    return unary(a, [s](T v) { return s * v; }, [s](T) { return s; });
}

template <typename T>
Var<T> sigmoid(const Var<T> &a)
{
    const Tensor<T> &x = a.value();
    Tensor<T> y(x.shape());
    Arr<T>(y.ptr(), static_cast<Eigen::Index>(y.size())) = CArr<T>(x.ptr(), static_cast<Eigen::Index>(x.size())).logistic();
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id();
    return tape->record(std::move(y), {ia}, [tape, ia](std::span<const T> g, const Tensor<T> &y) {
        const auto n = static_cast<Eigen::Index>(g.size());
        CArr<T> yv(y.ptr(), n);
        Arr<T>(tape->grad_buffer(ia).data(), n) += CArr<T>(g.data(), n) * yv * (T(1) - yv);
    });
}

template <typename T>
Var<T> tanh(const Var<T> &a)
{
    const Tensor<T> &x = a.value();
    Tensor<T> y(x.shape());
    Arr<T>(y.ptr(), static_cast<Eigen::Index>(y.size())) = CArr<T>(x.ptr(), static_cast<Eigen::Index>(x.size())).tanh();
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id();
    return tape->record(std::move(y), {ia}, [tape, ia](std::span<const T> g, const Tensor<T> &y) {
        const auto n = static_cast<Eigen::Index>(g.size());
        CArr<T> yv(y.ptr(), n);
        Arr<T>(tape->grad_buffer(ia).data(), n) += CArr<T>(g.data(), n) * (T(1) - yv.square());
    });
}

template <typename T>
Var<T> relu(const Var<T> &a)
{
    return unary(a, [](T v) { return v > T(0) ? v : T(0); }, [](T v) { return v > T(0) ? T(1) : T(0); });
}

// ---------------------------------------------------------------- reductions

template <typename T>
Var<T> sum(const Var<T> &a)
{
    const Tensor<T> &x = a.value();
    T s = 0;
    for (T v : x.data())
        s += v;
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id();
    return tape->record(Tensor<T>({1}, s), {ia}, [tape, ia](std::span<const T> g, const Tensor<T> &) {
        for (T &v : tape->grad_buffer(ia))
            v += g[0];
    });
}

template <typename T>
Var<T> mse(const Var<T> &pred, const Var<T> &target)
{
    require_same_shape(pred, target, "mse");
    const Tensor<T> &p = pred.value(), &t = target.value();
    require(p.size() > 0, "mse: empty input");
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
        acc += d * d;
    }
    const T n = static_cast<T>(p.size());
    Tape<T> *tape = pred.tape();
    std::size_t ip = pred.id(), it = target.id();
    return tape->record(Tensor<T>({1}, static_cast<T>(acc / static_cast<double>(p.size()))), {ip, it},
                        [tape, ip, it, n](std::span<const T> g, const Tensor<T> &) {
                            const Tensor<T> &p = tape->value(ip), &t = tape->value(it);
                            const T c = T(2) * g[0] / n;
                            if (tape->needs_grad(ip))
                            {
                                std::span<T> gx = tape->grad_buffer(ip);
                                for (std::size_t i = 0; i < gx.size(); ++i)
                                    gx[i] += c * (p[i] - t[i]);
                            }
                            if (tape->needs_grad(it))
                            {
                                std::span<T> gx = tape->grad_buffer(it);
                                for (std::size_t i = 0; i < gx.size(); ++i)
                                    gx[i] -= c * (p[i] - t[i]);
                            }
                        });
}

// ---------------------------------------------------------------- shape

namespace
{
// Splits a shape around `axis` into (outer, extent, inner) block sizes.
struct AxisView
{
    std::size_t outer = 1, extent = 1, inner = 1;
};
AxisView axis_view(const Shape &s, int axis)
{
    AxisView v;
    for (int i = 0; i < axis; ++i)
        v.outer *= static_cast<std::size_t>(s[static_cast<std::size_t>(i)]);
    v.extent = static_cast<std::size_t>(s[static_cast<std::size_t>(axis)]);
    for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < s.size(); ++i)
        v.inner *= static_cast<std::size_t>(s[i]);
    return v;
}
} // namespace

template <typename T>
Var<T> concat(const std::vector<Var<T>> &parts, int axis)
{
    require(!parts.empty(), "concat: no inputs");
    const Shape &s0 = parts.front().shape();
    require(axis >= 0 && axis < static_cast<int>(s0.size()), "concat: axis out of range");
    Shape out_shape = s0;
    out_shape[static_cast<std::size_t>(axis)] = 0;
    for (const Var<T> &p : parts)
    {
        require(p.tape() == parts.front().tape(), "concat: operands live on different tapes");
        Shape s = p.shape();
        require(s.size() == s0.size(), "concat: rank mismatch");
        for (std::size_t d = 0; d < s.size(); ++d)
            require(static_cast<int>(d) == axis || s[d] == s0[d], "concat: shape mismatch " + shape_string(s) +
                                                                      " vs " + shape_string(s0));
        out_shape[static_cast<std::size_t>(axis)] += s[static_cast<std::size_t>(axis)];
    }
    Tensor<T> y(out_shape);
    const AxisView ov = axis_view(out_shape, axis);
    std::vector<std::size_t> ids, offsets;
    std::size_t offset = 0;
    for (const Var<T> &p : parts)
    {
        const AxisView pv = axis_view(p.shape(), axis);
        const T *src = p.value().ptr();
        for (std::size_t o = 0; o < pv.outer; ++o)
            std::copy_n(src + o * pv.extent * pv.inner, pv.extent * pv.inner,
                        y.ptr() + (o * ov.extent + offset) * ov.inner);
        ids.push_back(p.id());
        offsets.push_back(offset);
        offset += pv.extent;
    }
    Tape<T> *tape = parts.front().tape();
    return tape->record(std::move(y), ids, [tape, ids, offsets, ov, axis](std::span<const T> g, const Tensor<T> &) {
        for (std::size_t k = 0; k < ids.size(); ++k)
        {
            if (!tape->needs_grad(ids[k]))
                continue;
            const AxisView pv = axis_view(tape->value(ids[k]).shape(), axis);
            std::span<T> gx = tape->grad_buffer(ids[k]);
            for (std::size_t o = 0; o < pv.outer; ++o)
            {
                const T *src = g.data() + (o * ov.extent + offsets[k]) * ov.inner;
                T *dst = gx.data() + o * pv.extent * pv.inner;
                for (std::size_t i = 0; i < pv.extent * pv.inner; ++i)
                    dst[i] += src[i];
            }
        }
    });
}

template <typename T>
Var<T> slice(const Var<T> &a, int axis, int begin, int count)
{
    const Shape &s = a.shape();
    require(axis >= 0 && axis < static_cast<int>(s.size()), "slice: axis out of range");
    require(begin >= 0 && count >= 0 && begin + count <= s[static_cast<std::size_t>(axis)],
            "slice: range out of bounds");
    Shape out_shape = s;
    out_shape[static_cast<std::size_t>(axis)] = count;
    Tensor<T> y(out_shape);
    const AxisView iv = axis_view(s, axis);
    const std::size_t block = static_cast<std::size_t>(count) * iv.inner;
    for (std::size_t o = 0; o < iv.outer; ++o)
        std::copy_n(a.value().ptr() + (o * iv.extent + static_cast<std::size_t>(begin)) * iv.inner, block,
                    y.ptr() + o * block);
    Tape<T> *tape = a.tape();
    std::size_t ia = a.id();
    return tape->record(std::move(y), {ia}, [tape, ia, iv, begin, block](std::span<const T> g, const Tensor<T> &) {
        std::span<T> gx = tape->grad_buffer(ia);
        for (std::size_t o = 0; o < iv.outer; ++o)
        {
            T *dst = gx.data() + (o * iv.extent + static_cast<std::size_t>(begin)) * iv.inner;
            const T *src = g.data() + o * block;
            for (std::size_t i = 0; i < block; ++i)
                dst[i] += src[i];
        }
    });
}

// ---------------------------------------------------------------- convolution

template <typename T>
Var<T> conv2d(const Var<T> &x, const Var<T> &w, const std::optional<Var<T>> &bias, int padding)
{
    require_chw(x, "conv2d");
    const Shape &ws = w.shape();
    require(ws.size() == 4 && ws[2] == ws[3], "conv2d: weight must be (O, C, k, k), got " + shape_string(ws));
    const int c = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    const int o = ws[0], k = ws[2];
    require(ws[1] == c, "conv2d: weight expects " + std::to_string(ws[1]) + " input channels, got " +
                            std::to_string(c));
    require(k % 2 == 1, "conv2d: kernel size must be odd");
    require(padding == k / 2, "conv2d: padding must be k/2 for same-size output");
    if (bias)
        require(bias->shape() == Shape{o}, "conv2d: bias must have one entry per output channel");

    const int hw = h * wd, ck = c * k * k;
    Buffer<T> col(static_cast<std::size_t>(ck) * hw);
    im2col(x.value().ptr(), c, h, wd, k, padding, col.data());

    Tensor<T> y({o, h, wd});
    Map<T> ym(y.ptr(), o, hw);
    ym.noalias() = CMap<T>(w.value().ptr(), o, ck) * CMap<T>(col.data(), ck, hw);
    if (bias)
        for (int oc = 0; oc < o; ++oc)
            ym.row(oc).array() += bias->value()[static_cast<std::size_t>(oc)];

    Tape<T> *tape = x.tape();
    const std::size_t ix = x.id(), iw = w.id();
    const std::size_t ib = bias ? bias->id() : ix;
    const bool has_bias = bias.has_value();
    std::vector<std::size_t> parents{ix, iw};
    if (has_bias)
        parents.push_back(ib);
    // Only keep im2col when the weight gradient will need it.
    bool keep_col = tape->needs_grad(iw);
    auto saved = std::make_shared<Buffer<T>>(keep_col ? std::move(col) : Buffer<T>{});
    return tape->record(std::move(y), parents,
                        [tape, ix, iw, ib, has_bias, saved, c, h, wd, o, k, padding, hw, ck](std::span<const T> g, const Tensor<T> &) {
                            CMap<T> gm(g.data(), o, hw);
                            if (tape->needs_grad(iw))
                            {
                                std::span<T> gw = tape->grad_buffer(iw);
                                Map<T>(gw.data(), o, ck).noalias() += gm * CMap<T>(saved->data(), ck, hw).transpose();
                            }
                            if (has_bias && tape->needs_grad(ib))
                            {
                                std::span<T> gb = tape->grad_buffer(ib);
                                for (int oc = 0; oc < o; ++oc)
                                {
                                    T acc = 0;
                                    for (int q = 0; q < hw; ++q)
                                        acc += g[static_cast<std::size_t>(oc) * hw + q];
                                    gb[static_cast<std::size_t>(oc)] += acc;
                                }
                            }
                            if (tape->needs_grad(ix))
                            {
                                MatR<T> gcol = CMap<T>(tape->value(iw).ptr(), o, ck).transpose() * gm;
                                col2im_add(gcol.data(), c, h, wd, k, padding, tape->grad_buffer(ix).data());
                            }
                        });
}

template <typename T>
Var<T> conv_transpose2(const Var<T> &x, const Var<T> &w, const std::optional<Var<T>> &bias)
{
    require_chw(x, "conv_transpose2");
    const Shape &ws = w.shape();
    const int c = x.shape()[0], h = x.shape()[1], wd = x.shape()[2];
    require(ws.size() == 4 && ws[0] == c && ws[2] == 2 && ws[3] == 2,
            "conv_transpose2: weight must be (C, O, 2, 2), got " + shape_string(ws));
    const int o = ws[1], hw = h * wd, o4 = o * 4;
    if (bias)
        require(bias->shape() == Shape{o}, "conv_transpose2: bias must have one entry per output channel");

    // Y(o4, hw) = W^T(o4, c) X(c, hw), then scatter each row into its sub-pixel.
    MatR<T> ym = CMap<T>(w.value().ptr(), c, o4).transpose() * CMap<T>(x.value().ptr(), c, hw);
    Tensor<T> y({o, 2 * h, 2 * wd});
    const int ow = 2 * wd;
    for (int oc = 0; oc < o; ++oc)
    {
        const T b = bias ? bias->value()[static_cast<std::size_t>(oc)] : T(0);
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
            {
                const T *row = ym.data() + static_cast<std::size_t>(oc * 4 + a * 2 + bb) * hw;
                for (int i = 0; i < h; ++i)
                    for (int j = 0; j < wd; ++j)
                        y[(static_cast<std::size_t>(oc) * 2 * h + 2 * i + a) * ow + 2 * j + bb] = row[i * wd + j] + b;
            }
    }
    Tape<T> *tape = x.tape();
    const std::size_t ix = x.id(), iw = w.id();
    const std::size_t ib = bias ? bias->id() : ix;
    const bool has_bias = bias.has_value();
    std::vector<std::size_t> parents{ix, iw};
    if (has_bias)
        parents.push_back(ib);
    return tape->record(std::move(y), parents, [=](std::span<const T> g, const Tensor<T> &) {
        MatR<T> gy(o4, hw);
        for (int oc = 0; oc < o; ++oc)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb)
                {
                    T *row = gy.data() + static_cast<std::size_t>(oc * 4 + a * 2 + bb) * hw;
                    for (int i = 0; i < h; ++i)
                        for (int j = 0; j < wd; ++j)
                            row[i * wd + j] = g[(static_cast<std::size_t>(oc) * 2 * h + 2 * i + a) * ow + 2 * j + bb];
                }
        if (tape->needs_grad(iw))
            Map<T>(tape->grad_buffer(iw).data(), c, o4).noalias() +=
                CMap<T>(tape->value(ix).ptr(), c, hw) * gy.transpose();
        if (has_bias && tape->needs_grad(ib))
        {
            std::span<T> gb = tape->grad_buffer(ib);
            for (int oc = 0; oc < o; ++oc)
            {
                T acc = 0;
                const T *rows = gy.data() + static_cast<std::ptrdiff_t>(oc) * 4 * hw;
                for (int q = 0; q < 4 * hw; ++q)
                    acc += rows[q];
                gb[static_cast<std::size_t>(oc)] += acc;
            }
        }
        if (tape->needs_grad(ix))
            Map<T>(tape->grad_buffer(ix).data(), c, hw).noalias() += CMap<T>(tape->value(iw).ptr(), c, o4) * gy;
    });
}

template <typename T>
Var<T> max_pool2(const Var<T> &x)
{
    require_chw(x, "max_pool2");
    const int c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
    require(h % 2 == 0 && w % 2 == 0, "max_pool2: spatial dims must be even, got " + shape_string(x.shape()));
    const int oh = h / 2, ow = w / 2;
    Tensor<T> y({c, oh, ow});
    auto argmax = std::make_shared<std::vector<std::uint32_t>>(y.size());
    const Tensor<T> &in = x.value();
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j)
            {
                std::size_t best = (static_cast<std::size_t>(ch) * h + 2 * i) * w + 2 * j;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                    {
                        std::size_t idx = (static_cast<std::size_t>(ch) * h + 2 * i + a) * w + 2 * j + b;
                        if (in[idx] > in[best])
                            best = idx;
                    }
                std::size_t out = (static_cast<std::size_t>(ch) * oh + i) * ow + j;
                y[out] = in[best];
                (*argmax)[out] = static_cast<std::uint32_t>(best);
            }
    Tape<T> *tape = x.tape();
    std::size_t ix = x.id();
    return tape->record(std::move(y), {ix}, [tape, ix, argmax](std::span<const T> g, const Tensor<T> &) {
        std::span<T> gx = tape->grad_buffer(ix);
        for (std::size_t i = 0; i < g.size(); ++i)
            gx[(*argmax)[i]] += g[i];
    });
}

template <typename T>
Var<T> lstm_pointwise(const Var<T> &gates, const Var<T> &cell)
{
    require_chw(gates, "lstm_pointwise");
    require_chw(cell, "lstm_pointwise");
    const Shape &gs = gates.shape(), &cs = cell.shape();
    require(gs[0] == 4 * cs[0] && gs[1] == cs[1] && gs[2] == cs[2],
            "lstm_pointwise: gates " + shape_string(gs) + " do not match cell " + shape_string(cs));
    const auto n = static_cast<Eigen::Index>(cell.value().size());
    const T *z = gates.value().ptr();
    Tape<T> *tape = gates.tape();
    const std::size_t iz = gates.id(), ic = cell.id();
    const bool keep = tape->needs_grad(iz) || tape->needs_grad(ic);

    // act = [i, f, o, g, tanh(C')]
    auto act = std::make_shared<Buffer<T>>(static_cast<std::size_t>(5 * n));
    T *a = act->data();
    Arr<T>(a, 3 * n) = CArr<T>(z, 3 * n).logistic();
    Arr<T>(a + 3 * n, n) = CArr<T>(z + 3 * n, n).tanh();
    Tensor<T> y({2 * cs[0], cs[1], cs[2]});
    Arr<T> c(y.ptr(), n), h(y.ptr() + n, n);
    c = Arr<T>(a + n, n) * CArr<T>(cell.value().ptr(), n) + Arr<T>(a, n) * Arr<T>(a + 3 * n, n);
    Arr<T>(a + 4 * n, n) = c.tanh();
    h = Arr<T>(a + 2 * n, n) * Arr<T>(a + 4 * n, n);
    if (!keep)
        act.reset();

    return tape->record(std::move(y), {iz, ic}, [tape, iz, ic, n, act](std::span<const T> g, const Tensor<T> &) {
        const T *a = act->data();
        CArr<T> ig(a, n), fg(a + n, n), og(a + 2 * n, n), gg(a + 3 * n, n), tc(a + 4 * n, n);
        CArr<T> dh(g.data() + n, n);
        const Eigen::Array<T, Eigen::Dynamic, 1> dc = CArr<T>(g.data(), n) + dh * og * (T(1) - tc.square());
        if (tape->needs_grad(iz))
        {
            T *gz = tape->grad_buffer(iz).data();
            CArr<T> cp(tape->value(ic).ptr(), n);
            Arr<T>(gz, n) += dc * gg * ig * (T(1) - ig);
            Arr<T>(gz + n, n) += dc * cp * fg * (T(1) - fg);
            Arr<T>(gz + 2 * n, n) += dh * tc * og * (T(1) - og);
            Arr<T>(gz + 3 * n, n) += dc * ig * (T(1) - gg.square());
        }
        if (tape->needs_grad(ic))
            Arr<T>(tape->grad_buffer(ic).data(), n) += dc * fg;
    });
}

#define RADIOMOTION_INSTANTIATE(T)                                                                                    \
    template class Tape<T>;                                                                                           \
    template Var<T> add(const Var<T> &, const Var<T> &);                                                              \
    template Var<T> sub(const Var<T> &, const Var<T> &);                                                              \
    template Var<T> mul(const Var<T> &, const Var<T> &);                                                              \
    template Var<T> scale(const Var<T> &, T);                                                                         \
    template Var<T> sigmoid(const Var<T> &);                                                                          \
    template Var<T> tanh(const Var<T> &);                                                                             \
    template Var<T> relu(const Var<T> &);                                                                             \
    template Var<T> sum(const Var<T> &);                                                                              \
    template Var<T> mse(const Var<T> &, const Var<T> &);                                                              \
    template Var<T> concat(const std::vector<Var<T>> &, int);                                                         \
    template Var<T> slice(const Var<T> &, int, int, int);                                                             \
    template Var<T> conv2d(const Var<T> &, const Var<T> &, const std::optional<Var<T>> &, int);                       \
    template Var<T> conv_transpose2(const Var<T> &, const Var<T> &, const std::optional<Var<T>> &);                   \
    template Var<T> max_pool2(const Var<T> &);                                                                        \
    template Var<T> lstm_pointwise(const Var<T> &, const Var<T> &);

RADIOMOTION_INSTANTIATE(float)
RADIOMOTION_INSTANTIATE(double)

#undef RADIOMOTION_INSTANTIATE

} // namespace radiomotion::ad
