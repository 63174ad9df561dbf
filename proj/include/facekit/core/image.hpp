/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/core/image.hpp
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
#pragma once

#ifndef FACEKIT_CORE_IMAGE_HPP
#define FACEKIT_CORE_IMAGE_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace facekit {

/**
 * A row-major raster with 1 (grayscale) or 3 (RGB) interleaved channels and
 * values in [0, 1]. Origin is the top-left pixel, y grows downward. Pixel
 * centres sit at integer coordinates.
 */
struct ImageBuffer
{
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data; // width * height * channels

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill)
    {
    }

    bool empty() const { return width <= 0 || height <= 0; }

    double& at(int x, int y, int c = 0)
    {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const
    {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    /// Bilinear sample of one channel with edge clamping. (x, y) in pixel
    /// coordinates; callers are expected to have bounds-checked the position
    /// if out-of-range reads should mean something other than clamping.
    double sample_bilinear(double x, double y, int c = 0) const;

    /// RGB bilinear sample (grayscale images replicate their channel).
    std::array<double, 3> sample_bilinear_rgb(double x, double y) const;

    /// BT.601 luma (0.299 R + 0.587 G + 0.114 B); grayscale images are
    /// returned as a copy.
    ImageBuffer to_luma() const;
};

} // namespace facekit

#endif // FACEKIT_CORE_IMAGE_HPP
