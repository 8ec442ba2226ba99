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

#include "radiomotion/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace radiomotion
{

namespace
{
constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const char *const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string &s)
{
    std::string out;
    for (char c : s)
    {
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axes
{
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void pad_range(double &lo, double &hi)
{
    if (!(hi > lo))
    {
        lo -= 0.5;
        hi += 0.5;
        return;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
}

void frame(std::ostringstream &svg, const Axes &ax, const std::string &title, const std::string &xl,
           const std::string &yl)
{
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n"
        << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
        << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double yv = ax.y0 + (ax.y1 - ax.y0) * i / 4.0;
        const double xv = ax.x0 + (ax.x1 - ax.x0) * i / 4.0;
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << ax.py(yv) + 4 << "\" text-anchor=\"end\">" << yv
            << "</text>\n";
        svg << "<text x=\"" << ax.px(xv) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << xv
            << "</text>\n";
    }
    svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n"
        << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(yl) << "</text>\n";
}

void save(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path);
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}
} // namespace

void write_line_plot(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                     const std::string &y_label, const std::vector<Series> &series)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series &s : series)
    {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("write_line_plot: series " + s.name + " has mismatched x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i)
        {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0))
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    pad_range(x0, x1);
    pad_range(y0, y1);
    Axes ax{x0, x1, y0, y1};
    std::ostringstream svg;
    svg.precision(6);
    frame(svg, ax, title, x_label, y_label);
    for (std::size_t k = 0; k < series.size(); ++k)
    {
        const Series &s = series[k];
        const char *colour = kColours[k % std::size(kColours)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            svg << ax.px(s.x[i]) << ',' << ax.py(s.y[i]) << ' ';
        svg << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            svg << "<circle cx=\"" << ax.px(s.x[i]) << "\" cy=\"" << ax.py(s.y[i]) << "\" r=\"3\" fill=\"" << colour
                << "\"/>\n";
        const double ly = kTop + 14 + 18 * static_cast<double>(k);
        svg << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 30
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kWidth - kRight + 35 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
    }
    svg << "</svg>\n";
    save(path, svg.str());
}

void write_bar_plot(const std::filesystem::path &path, const std::string &title, const std::string &x_label,
                    const std::string &y_label, const std::vector<double> &values, double band)
{
    double y0 = std::min(0.0, -band), y1 = std::max(0.0, band);
    for (double v : values)
    {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
    }
    pad_range(y0, y1);
    Axes ax{0.0, static_cast<double>(values.size()) + 1.0, y0, y1};
    std::ostringstream svg;
    svg.precision(6);
    frame(svg, ax, title, x_label, y_label);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << ax.py(0) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << ax.py(0) << "\" stroke=\"black\"/>\n";
    const double bw = 0.6 * (ax.px(1) - ax.px(0));
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double x = ax.px(static_cast<double>(i + 1)) - bw / 2;
        const double top = ax.py(std::max(values[i], 0.0)), bot = ax.py(std::min(values[i], 0.0));
        svg << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << bw << "\" height=\"" << bot - top
            << "\" fill=\"" << kColours[0] << "\"/>\n";
    }
    if (band > 0)
        for (double b : {band, -band})
            svg << "<line x1=\"" << kLeft << "\" y1=\"" << ax.py(b) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
                << ax.py(b) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    svg << "</svg>\n";
    save(path, svg.str());
}

} // namespace radiomotion
