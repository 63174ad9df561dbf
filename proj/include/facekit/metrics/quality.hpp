/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/metrics/quality.hpp
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

#ifndef FACEKIT_METRICS_QUALITY_HPP
#define FACEKIT_METRICS_QUALITY_HPP

#include "facekit/core/image.hpp"
#include "facekit/core/model.hpp"
#include "facekit/metrics/phase_congruency.hpp"

#include <cstdint>
#include <vector>

namespace facekit {
namespace metrics {

/**
 * SSIM parameters: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
 * dynamic range 1.0. The map covers valid window positions only, so it is
 * (W-10) x (H-10) for the default window.
 */
struct SsimParams
{
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

struct SsimResult
{
    double mean = 0.0;
    ImageBuffer map; // per valid window position
};

/// RGB inputs are converted to BT.601 luma first. Throws
/// InvalidArgumentError on dimension mismatch or images smaller than the
/// window.
SsimResult ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

struct MsSsimResult
{
    double value = 0.0;
    /// 5 when the smallest dyadic scale still fits the window, fewer for
    /// small inputs (weights renormalized accordingly).
    int scales_used = 0;
    std::vector<double> weights;
};

MsSsimResult ms_ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

/**
 * FSIM constants. T1 applies to the phase-congruency similarity (already
 * unit-scaled); T2 is the gradient constant of the original 0-255 method
 * rescaled to our [0, 1] dynamic range (160 / 255^2).
 */
struct FsimParams
{
    PhaseCongruencyParams pc;
    double t1 = 0.85;
    double t2 = 160.0 / (255.0 * 255.0);
};

double fsim(const ImageBuffer& a, const ImageBuffer& b, const FsimParams& params = {});

/// One row of the evaluation table: the three metric values plus the
/// parameter records they were computed with.
struct MetricReport
{
    double ssim = 0.0;
    double ms_ssim = 0.0;
    double fsim = 0.0;
    SsimParams ssim_params;
    int ms_ssim_scales = 0;
    std::vector<double> ms_ssim_weights;
    FsimParams fsim_params;
};

MetricReport evaluate_pair(const ImageBuffer& a, const ImageBuffer& b);

struct MeshStats
{
    std::size_t triangle_count = 0;
    double avg_triangle_area = 0.0;
    std::uint64_t sample_seed = 0;
    int sampled_vertex_count = 0;
};

/**
 * Triangle count of the full topology, plus the mean area of the union of
 * triangles incident to sample_count seeded-random distinct vertices.
 * Throws InvalidArgumentError when the mesh has no triangles or
 * sample_count exceeds the vertex count.
 */
MeshStats mesh_stats(const model::FaceMesh& mesh, int sample_count = 50, std::uint64_t seed = 0);

} // namespace metrics
} // namespace facekit

#endif // FACEKIT_METRICS_QUALITY_HPP
