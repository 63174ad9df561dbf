/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/kernels/kernels_scalar.cpp
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
#include "facekit/kernels/kernels.hpp"

namespace facekit {
namespace kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

double dot_scalar(std::size_t n, const double* x, const double* y)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum_scalar(std::size_t n, const double* x)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i];
    return acc;
}

void mul_scalar(std::size_t n, const double* x, const double* y, double* out)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] * y[i];
}

void sub_scalar(std::size_t n, const double* x, const double* y, double* out)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] - y[i];
}

void conv_row_valid_scalar(const double* src, std::size_t w, const double* k,
                           std::size_t radius, double* dst)
{
    const std::size_t taps = 2 * radius + 1;
    const std::size_t out_w = w - 2 * radius;
    for (std::size_t i = 0; i < out_w; ++i)
    {
        double acc = 0.0;
        for (std::size_t t = 0; t < taps; ++t)
            acc += k[t] * src[i + t];
        dst[i] = acc;
    }
}

void conv_col_valid_scalar(const double* src, std::size_t w, std::size_t h,
                           const double* k, std::size_t radius, double* dst)
{
    const std::size_t taps = 2 * radius + 1;
    const std::size_t out_h = h - 2 * radius;
    for (std::size_t y = 0; y < out_h; ++y)
    {
        double* row = dst + y * w;
        for (std::size_t x = 0; x < w; ++x)
        {
            double acc = 0.0;
            for (std::size_t t = 0; t < taps; ++t)
                acc += k[t] * src[(y + t) * w + x];
            row[x] = acc;
        }
    }
}

void project_points_scalar(std::size_t n, const double* xyz, const double* R,
                           double f, double tx, double ty, double* out_xy,
                           double* out_depth)
{
    for (std::size_t i = 0; i < n; ++i)
    {
        const double x = xyz[3 * i + 0];
        const double y = xyz[3 * i + 1];
        const double z = xyz[3 * i + 2];
        const double qx = R[0] * x + R[1] * y + R[2] * z;
        const double qy = R[3] * x + R[4] * y + R[5] * z;
        out_xy[2 * i + 0] = f * qx + tx;
        out_xy[2 * i + 1] = f * qy + ty;
        if (out_depth)
            out_depth[i] = R[6] * x + R[7] * y + R[8] * z;
    }
}

} // namespace

const Backend& scalar_backend()
{
    static const Backend table = {
        "scalar",          axpy_scalar,          dot_scalar,
        sum_scalar,        mul_scalar,           sub_scalar,
        conv_row_valid_scalar, conv_col_valid_scalar, project_points_scalar,
    };
    return table;
}

} // namespace kernels
} // namespace facekit
