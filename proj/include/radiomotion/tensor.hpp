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

#include <cstddef>
#include <functional>
#include <new>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiomotion::ad
{

using Shape = std::vector<int>;

// Cache-line aligned storage. Vectorised reductions peel elements up to the
// first aligned address, so a fixed base alignment keeps their summation
// order, and therefore every result bit, independent of where the heap
// placed a buffer.
template <typename T>
struct AlignedAllocator
{
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U> &) noexcept
    {
    }
    T *allocate(std::size_t n) { return static_cast<T *>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T *p, std::size_t) noexcept { ::operator delete(p, alignment); }
    template <typename U>
    bool operator==(const AlignedAllocator<U> &) const noexcept
    {
        return true;
    }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

inline std::size_t numel(const Shape &shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
}

std::string shape_string(const Shape &shape);

// Dense row-major tensor. Activations are (channels, height, width), conv
// weights (out, in, k, k), biases (channels).
template <typename T>
class Tensor
{
  public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(numel(shape_), fill) {}
    Tensor(Shape shape, const std::vector<T> &data) : shape_(std::move(shape)), data_(data.begin(), data.end())
    {
        if (data_.size() != numel(shape_))
            throw std::invalid_argument("Tensor: data length " + std::to_string(data_.size()) +
                                        " does not match shape " + shape_string(shape_));
    }

    const Shape &shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
    std::size_t size() const { return data_.size(); }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }
    T *ptr() { return data_.data(); }
    const T *ptr() const { return data_.data(); }
    T &operator[](std::size_t i) { return data_[i]; }
    T operator[](std::size_t i) const { return data_[i]; }

    bool requires_grad() const { return requires_grad_; }
    void set_requires_grad(bool on) { requires_grad_ = on; }

    // Gradient buffer, allocated (zeroed) on first access.
    std::span<T> grad()
    {
        if (grad_.size() != data_.size())
            grad_.assign(data_.size(), T(0));
        return grad_;
    }
    std::span<const T> grad() const { return grad_; }
    bool has_grad() const { return grad_.size() == data_.size() && !data_.empty(); }
    void zero_grad() { grad_.assign(data_.size(), T(0)); }

    template <typename U>
    Tensor<U> cast() const
    {
        Tensor<U> out(shape_);
        for (std::size_t i = 0; i < data_.size(); ++i)
            out[i] = static_cast<U>(data_[i]);
        out.set_requires_grad(requires_grad_);
        return out;
    }

  private:
    Shape shape_;
    Buffer<T> data_;
    Buffer<T> grad_;
    bool requires_grad_ = false;
};

} // namespace radiomotion::ad
