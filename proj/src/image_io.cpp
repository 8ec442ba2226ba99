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

#include "radiomotion/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

namespace radiomotion
{

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
{
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("GrayImage: dimensions must be positive");
}

namespace
{
struct FileCloser
{
    void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    return f;
}

// libpng is C; errors longjmp back to the setjmp in the caller, which rethrows.
[[noreturn]] void png_fail(png_structp png, png_const_charp msg)
{
    auto *text = static_cast<std::string *>(png_get_error_ptr(png));
    if (text)
        *text = msg;
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}
} // namespace

void write_png(const std::filesystem::path &path, const GrayImage &image)
{
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height))
        throw std::invalid_argument("write_png: pixel buffer does not match dimensions");

    FilePtr file = open_file(path, "wb");
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
    if (!png)
        throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard
    {
        png_structp *p;
        png_infop *i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    if (!info)
        throw std::runtime_error("png_create_info_struct failed");

    if (setjmp(png_jmpbuf(png)))
        throw std::runtime_error("libpng write '" + path.string() + "': " + error);
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
    png_write_info(png, info);
    for (int r = 0; r < image.height; ++r)
        png_write_row(png, image.pixels.data() + static_cast<std::size_t>(r) * image.width);
    png_write_end(png, nullptr);
}

GrayImage read_png(const std::filesystem::path &path)
{
    FilePtr file = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw std::runtime_error("'" + path.string() + "' is not a PNG file");

    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
    if (!png)
        throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard
    {
        png_structp *p;
        png_infop *i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    if (!info)
        throw std::runtime_error("png_create_info_struct failed");

    GrayImage image;
    if (setjmp(png_jmpbuf(png)))
        throw std::runtime_error("libpng read '" + path.string() + "': " + error);
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const auto width = static_cast<int>(png_get_image_width(png, info));
    const auto height = static_cast<int>(png_get_image_height(png, info));
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    // Normalise everything to 8-bit gray.
    if (depth == 16)
        png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    image = GrayImage(width, height);
    for (int r = 0; r < height; ++r)
        png_read_row(png, image.pixels.data() + static_cast<std::size_t>(r) * width, nullptr);
    png_read_end(png, nullptr);
    return image;
}

} // namespace radiomotion
