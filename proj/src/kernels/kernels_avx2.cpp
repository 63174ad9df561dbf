/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/kernels/kernels_avx2.cpp
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

// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "facekit/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace facekit {
namespace kernels {
namespace {

inline double hsum4(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

double dot_avx2(std::size_t n, const double* x, const double* y)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
    {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum4(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum_avx2(std::size_t n, const double* x)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
    {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum4(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i];
    return acc;
}

void mul_avx2(std::size_t n, const double* x, const double* y, double* out)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        out[i] = x[i] * y[i];
}

void sub_avx2(std::size_t n, const double* x, const double* y, double* out)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        out[i] = x[i] - y[i];
}

void conv_row_valid_avx2(const double* src, std::size_t w, const double* k,
                         std::size_t radius, double* dst)
{
    const std::size_t taps = 2 * radius + 1;
    const std::size_t out_w = w - 2 * radius;
    std::size_t i = 0;
    for (; i + 4 <= out_w; i += 4)
    {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t t = 0; t < taps; ++t)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(k[t]), _mm256_loadu_pd(src + i + t), acc);
        _mm256_storeu_pd(dst + i, acc);
    }
    for (; i < out_w; ++i)
    {
        double acc = 0.0;
        for (std::size_t t = 0; t < taps; ++t)
            acc += k[t] * src[i + t];
        dst[i] = acc;
    }
}

void conv_col_valid_avx2(const double* src, std::size_t w, std::size_t h,
                         const double* k, std::size_t radius, double* dst)
{
    const std::size_t taps = 2 * radius + 1;
    const std::size_t out_h = h - 2 * radius;
    for (std::size_t y = 0; y < out_h; ++y)
    {
        double* row = dst + y * w;
        std::size_t x = 0;
        for (; x + 4 <= w; x += 4)
        {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t t = 0; t < taps; ++t)
                acc = _mm256_fmadd_pd(_mm256_set1_pd(k[t]),
                                      _mm256_loadu_pd(src + (y + t) * w + x), acc);
            _mm256_storeu_pd(row + x, acc);
        }
        for (; x < w; ++x)
        {
            double acc = 0.0;
            for (std::size_t t = 0; t < taps; ++t)
                acc += k[t] * src[(y + t) * w + x];
            row[x] = acc;
        }
    }
}

// Deinterleaves 4 xyz points (12 consecutive doubles) into xs/ys/zs lanes.
inline void load_xyz4(const double* p, __m256d& xs, __m256d& ys, __m256d& zs)
{
    const __m256d v0 = _mm256_loadu_pd(p);     // x0 y0 z0 x1
    const __m256d v1 = _mm256_loadu_pd(p + 4); // y1 z1 x2 y2
    const __m256d v2 = _mm256_loadu_pd(p + 8); // z2 x3 y3 z3

    xs = _mm256_blend_pd(
        _mm256_blend_pd(_mm256_permute4x64_pd(v0, 0x0C),  // x0 x1 . .
                        _mm256_permute4x64_pd(v1, 0x20),  // .  .  x2 .
                        0b0100),
        _mm256_permute4x64_pd(v2, 0x40),                  // .  .  .  x3
        0b1000);
    ys = _mm256_blend_pd(
        _mm256_blend_pd(_mm256_permute4x64_pd(v0, 0x01),  // y0 .  .  .
                        _mm256_permute4x64_pd(v1, 0x30),  // .  y1 y2 .
                        0b0110),
        _mm256_permute4x64_pd(v2, 0x80),                  // .  .  .  y3
        0b1000);
    zs = _mm256_blend_pd(
        _mm256_blend_pd(_mm256_permute4x64_pd(v0, 0x02),  // z0 .  .  .
                        _mm256_permute4x64_pd(v1, 0x04),  // .  z1 .  .
                        0b0010),
        _mm256_permute4x64_pd(v2, 0xC0),                  // .  .  z2 z3
        0b1100);
}

void project_points_avx2(std::size_t n, const double* xyz, const double* R,
                         double f, double tx, double ty, double* out_xy,
                         double* out_depth)
{
    const __m256d r00 = _mm256_set1_pd(R[0]), r01 = _mm256_set1_pd(R[1]), r02 = _mm256_set1_pd(R[2]);
    const __m256d r10 = _mm256_set1_pd(R[3]), r11 = _mm256_set1_pd(R[4]), r12 = _mm256_set1_pd(R[5]);
    const __m256d r20 = _mm256_set1_pd(R[6]), r21 = _mm256_set1_pd(R[7]), r22 = _mm256_set1_pd(R[8]);
    const __m256d vf = _mm256_set1_pd(f);
    const __m256d vtx = _mm256_set1_pd(tx), vty = _mm256_set1_pd(ty);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        __m256d xs, ys, zs;
        load_xyz4(xyz + 3 * i, xs, ys, zs);

        const __m256d qx = _mm256_fmadd_pd(r02, zs, _mm256_fmadd_pd(r01, ys, _mm256_mul_pd(r00, xs)));
        const __m256d qy = _mm256_fmadd_pd(r12, zs, _mm256_fmadd_pd(r11, ys, _mm256_mul_pd(r10, xs)));
        const __m256d us = _mm256_fmadd_pd(vf, qx, vtx);
        const __m256d vs = _mm256_fmadd_pd(vf, qy, vty);

        // interleave (u,v) pairs for the two 4-double stores
        const __m256d lo = _mm256_unpacklo_pd(us, vs); // u0 v0 u2 v2
        const __m256d hi = _mm256_unpackhi_pd(us, vs); // u1 v1 u3 v3
        _mm256_storeu_pd(out_xy + 2 * i, _mm256_permute2f128_pd(lo, hi, 0x20));
        _mm256_storeu_pd(out_xy + 2 * i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));

        if (out_depth)
        {
            const __m256d qz = _mm256_fmadd_pd(r22, zs, _mm256_fmadd_pd(r21, ys, _mm256_mul_pd(r20, xs)));
            _mm256_storeu_pd(out_depth + i, qz);
        }
    }
    for (; i < n; ++i)
    {
        const double x = xyz[3 * i + 0];
        const double y = xyz[3 * i + 1];
        const double z = xyz[3 * i + 2];
        out_xy[2 * i + 0] = f * (R[0] * x + R[1] * y + R[2] * z) + tx;
        out_xy[2 * i + 1] = f * (R[3] * x + R[4] * y + R[5] * z) + ty;
        if (out_depth)
            out_depth[i] = R[6] * x + R[7] * y + R[8] * z;
    }
}

} // namespace

const Backend& avx2_backend()
{
    static const Backend table = {
        "avx2",            axpy_avx2,          dot_avx2,
        sum_avx2,          mul_avx2,           sub_avx2,
        conv_row_valid_avx2, conv_col_valid_avx2, project_points_avx2,
    };
    return table;
}

} // namespace kernels
} // namespace facekit

#endif // x86_64
