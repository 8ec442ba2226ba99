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

#include "radiomotion/forecaster.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>

namespace radiomotion
{

// A checkpoint is a directory holding manifest.json (tensor names, shapes,
// caller metadata) and one RMM1 file per tensor, rows = shape[0].
void save_checkpoint(const std::filesystem::path &dir, std::span<const NamedTensor<float>> tensors,
                     const nlohmann::json &metadata);

// Fills the given tensors by name; every tensor must be present with the
// same shape. Returns the stored metadata.
nlohmann::json load_checkpoint(const std::filesystem::path &dir, std::span<const NamedTensor<float>> tensors);

nlohmann::json read_checkpoint_metadata(const std::filesystem::path &dir);

} // namespace radiomotion
