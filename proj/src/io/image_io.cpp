/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/io/image_io.cpp
 *
 * Copyright 2026 The facekit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "facekit/io/asset_io.hpp"

#include "facekit/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <png.h>

namespace facekit {
namespace io {

namespace {

std::uint8_t quantize(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

struct FileCloser
{
    void operator()(std::FILE* f) const
    {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ImageBuffer load_png(const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open " + path.string());

    std::uint8_t sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw BadMagicError(path.string() + ": not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }

    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;
    int width = 0, height = 0, channels = 0;

    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": PNG decode error");
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 8 || (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) ||
        png_get_interlace_type(png, info) != PNG_INTERLACE_NONE)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedFormatError(path.string() +
                                     ": only non-interlaced 8-bit gray/RGB PNG is supported");
    }

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
    if (width <= 0 || height <= 0 || static_cast<std::int64_t>(width) * height > (1 << 28))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedFormatError(path.string() + ": image dimensions out of supported range");
    }

    raw.resize(static_cast<std::size_t>(width) * height * channels);
    rows.resize(height);
    for (int y = 0; y < height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * width * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageBuffer img(width, height, channels);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.data[i] = raw[i] / 255.0;
    return img;
}

void save_png(const ImageBuffer& image, const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw IoError("cannot open " + path.string() + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }

    std::vector<std::uint8_t> raw(image.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = quantize(image.data[i]);
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * image.width * image.channels;

    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw IoError(path.string() + ": PNG encode error");
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Binary PPM (P6) / PGM (P5), maxval 255.
ImageBuffer load_pnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P6")
        throw BadMagicError(path.string() + ": not a binary PGM/PPM file");
    const int channels = magic == "P5" ? 1 : 3;

    auto next_int = [&](const char* what) {
        // skip whitespace and '#' comment lines
        while (true)
        {
            const int c = in.peek();
            if (c == '#')
            {
                std::string line;
                std::getline(in, line);
            }
            else if (std::isspace(c))
                in.get();
            else
                break;
        }
        long v = -1;
        in >> v;
        if (!in || v < 0)
            throw SchemaError(path.string() + ": malformed " + std::string(what));
        return static_cast<int>(v);
    };

    const int width = next_int("width");
    const int height = next_int("height");
    const int maxval = next_int("maxval");
    if (width <= 0 || height <= 0 || static_cast<std::int64_t>(width) * height > (1 << 28))
        throw UnsupportedFormatError(path.string() + ": image dimensions out of supported range");
    if (maxval != 255)
        throw UnsupportedFormatError(path.string() + ": only maxval 255 is supported");
    in.get(); // single whitespace after maxval

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw TruncationError(path.string() + ": pixel data truncated (expected " +
                              std::to_string(raw.size()) + " bytes, got " +
                              std::to_string(in.gcount()) + ")");

    ImageBuffer img(width, height, channels);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.data[i] = raw[i] / 255.0;
    return img;
}

void save_pnm(const ImageBuffer& image, const std::filesystem::path& path, int want_channels)
{
    if (image.channels != want_channels)
        throw InvalidArgumentError(path.string() + ": image has " + std::to_string(image.channels) +
                                   " channels, extension expects " + std::to_string(want_channels));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << (want_channels == 1 ? "P5" : "P6") << "\n"
        << image.width << " " << image.height << "\n255\n";
    std::vector<std::uint8_t> raw(image.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = quantize(image.data[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace

ImageBuffer load_image(const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".png")
        return load_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        return load_pnm(path);
    throw UnsupportedFormatError(path.string() + ": unknown image extension '" + ext + "'");
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path)
{
    if (image.empty())
        throw InvalidArgumentError("cannot save an empty image");
    if (image.channels != 1 && image.channels != 3)
        throw InvalidArgumentError("images must have 1 or 3 channels");

    const auto ext = path.extension().string();
    if (ext == ".png")
        save_png(image, path);
    else if (ext == ".ppm")
        save_pnm(image, path, 3);
    else if (ext == ".pgm")
        save_pnm(image, path, 1);
    else
        throw UnsupportedFormatError(path.string() + ": unknown image extension '" + ext + "'");
}

} // namespace io
} // namespace facekit
