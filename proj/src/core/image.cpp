/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/core/image.cpp
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
#include "facekit/core/image.hpp"

#include <algorithm>
#include <cmath>

namespace facekit {

namespace {

inline int clampi(int v, int lo, int hi)
{
    return std::max(lo, std::min(hi, v));
}

} // namespace

double ImageBuffer::sample_bilinear(double x, double y, int c) const
{
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, height - 1);
    const int x1 = clampi(x0 + 1, 0, width - 1);
    const int y1 = clampi(y0 + 1, 0, height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);

    const double top = at(x0, y0, c) * (1.0 - fx) + at(x1, y0, c) * fx;
    const double bot = at(x0, y1, c) * (1.0 - fx) + at(x1, y1, c) * fx;
    return top * (1.0 - fy) + bot * fy;
}

std::array<double, 3> ImageBuffer::sample_bilinear_rgb(double x, double y) const
{
    if (channels == 1)
    {
        const double v = sample_bilinear(x, y, 0);
        return {v, v, v};
    }
    return {sample_bilinear(x, y, 0), sample_bilinear(x, y, 1), sample_bilinear(x, y, 2)};
}

ImageBuffer ImageBuffer::to_luma() const
{
    if (channels == 1)
        return *this;
    ImageBuffer out(width, height, 1);
    const std::size_t n = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < n; ++i)
    {
        out.data[i] = 0.299 * data[3 * i] + 0.587 * data[3 * i + 1] + 0.114 * data[3 * i + 2];
    }
    return out;
}

} // namespace facekit
