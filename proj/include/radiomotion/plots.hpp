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

#include <filesystem>
#include <string>
#include <vector>

namespace radiomotion
{

struct Series
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Plain SVG line chart with markers and a legend.
void write_line_plot(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                     const std::string &y_label, const std::vector<Series> &series);

// Vertical bars at x = 1..n, with a dashed horizontal band at +-band if > 0.
void write_bar_plot(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                    const std::string &y_label, const std::vector<double> &values, double band = 0.0);

} // namespace radiomotion
