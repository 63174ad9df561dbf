/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/kernels/kernels.hpp
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

#ifndef FACEKIT_KERNELS_KERNELS_HPP
#define FACEKIT_KERNELS_KERNELS_HPP

#include <cstddef>

namespace facekit {
namespace kernels {

/**
 * Table of the data-parallel inner loops used by the toolkit. Two
 * implementations exist: a scalar reference and an AVX2/FMA variant. The
 * active table is chosen once at runtime from CPUID (overridable with the
 * FACEKIT_KERNELS environment variable, values "scalar" / "avx2").
 *
 * The SIMD variants are equivalence-tested against the scalar reference;
 * they may differ from it only by floating-point reassociation/FMA rounding.
 */
struct Backend
{
    const char* name;

    /// y[i] += a * x[i]
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    /// sum_i x[i] * y[i]
    double (*dot)(std::size_t n, const double* x, const double* y);
    /// sum_i x[i]
    double (*sum)(std::size_t n, const double* x);
    /// out[i] = x[i] * y[i]
    void (*mul)(std::size_t n, const double* x, const double* y, double* out);
    /// out[i] = x[i] - y[i]
    void (*sub)(std::size_t n, const double* x, const double* y, double* out);

    /// Horizontal "valid" correlation of one row: for i in [0, w - 2r):
    /// dst[i] = sum_{t=0..2r} k[t] * src[i + t]. dst must not alias src.
    void (*conv_row_valid)(const double* src, std::size_t w, const double* k,
                           std::size_t radius, double* dst);

    /// Vertical "valid" correlation of a w x h image: for y in [0, h - 2r),
    /// all x: dst[y*w + x] = sum_{t=0..2r} k[t] * src[(y + t)*w + x].
    void (*conv_col_valid)(const double* src, std::size_t w, std::size_t h,
                           const double* k, std::size_t radius, double* dst);

    /// Scaled orthographic projection of n interleaved xyz points:
    /// q = R * p, out_xy[2i..2i+1] = f * (q.x, q.y) + (tx, ty),
    /// out_depth[i] = q.z (skipped when out_depth is null).
    /// R is row-major 3x3.
    void (*project_points)(std::size_t n, const double* xyz, const double* R,
                           double f, double tx, double ty, double* out_xy,
                           double* out_depth);
};

const Backend& scalar_backend();

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend(); // callable only when avx2_supported()
#endif

bool avx2_supported();

/// The backend picked for this process (CPUID + FACEKIT_KERNELS override).
const Backend& active();

} // namespace kernels
} // namespace facekit

#endif // FACEKIT_KERNELS_KERNELS_HPP
