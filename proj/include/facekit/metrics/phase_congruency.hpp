/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/metrics/phase_congruency.hpp
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

#ifndef FACEKIT_METRICS_PHASE_CONGRUENCY_HPP
#define FACEKIT_METRICS_PHASE_CONGRUENCY_HPP

#include "facekit/core/image.hpp"

#include <memory>
#include <vector>

namespace facekit {
namespace metrics {

/**
 * Complex 2D DFT of a fixed size, backed by FFTW. Each instance owns its
 * buffers, so distinct instances may be used concurrently; plan creation is
 * serialized internally.
 */
class Dft2d
{
public:
    Dft2d(int width, int height);
    ~Dft2d();
    Dft2d(const Dft2d&) = delete;
    Dft2d& operator=(const Dft2d&) = delete;

    int width() const { return width_; }
    int height() const { return height_; }

    /// DFT of a real image (row-major), written as separate re/im planes.
    void forward(const std::vector<double>& input, std::vector<double>& re,
                 std::vector<double>& im) const;

    /// Inverse DFT (normalized by 1/(w*h)), complex in, complex out.
    void inverse(const std::vector<double>& re, const std::vector<double>& im,
                 std::vector<double>& out_re, std::vector<double>& out_im) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int width_, height_;
};

/// Parameters of the log-Gabor filter bank and of the phase congruency
/// energy model built on it.
struct PhaseCongruencyParams
{
    int scales = 4;
    int orientations = 4;
    double min_wavelength = 6.0;
    double mult = 2.0;          // wavelength multiplier between scales
    double sigma_onf = 0.55;    // radial bandwidth (ratio of sigma to centre freq)
    double dtheta_on_sigma = 1.2;
    double noise_k = 2.0;       // noise threshold: mean + k sigma
    double cutoff = 0.5;        // frequency-spread sigmoid midpoint
    double gain = 10.0;         // frequency-spread sigmoid gain
    double epsilon = 1e-8;
};

/**
 * The log-Gabor filter bank in the (unshifted) frequency domain:
 * filter(s, o) is a real w*h map, DC at index 0, zero at DC. A Butterworth
 * low-pass (cutoff 0.45, order 15) tapers the corners.
 */
struct LogGaborBank
{
    int width = 0, height = 0;
    PhaseCongruencyParams params;
    std::vector<std::vector<double>> filters; // [s * orientations + o]

    const std::vector<double>& filter(int scale, int orient) const
    {
        return filters[scale * params.orientations + orient];
    }
};

LogGaborBank make_log_gabor_bank(int width, int height,
                                 const PhaseCongruencyParams& params = {});

/// Quadrature-pair responses of one image under every bank filter:
/// re = even-symmetric response, im = odd-symmetric response, spatial domain.
struct BankResponses
{
    std::vector<std::vector<double>> re, im; // indexed like LogGaborBank::filters
};

BankResponses filter_responses(const ImageBuffer& luma, const LogGaborBank& bank);

/**
 * Phase congruency map in [0, 1]: orientation-summed, noise-thresholded,
 * frequency-spread weighted local energy over the summed filter amplitudes.
 */
std::vector<double> phase_congruency(const ImageBuffer& luma, const LogGaborBank& bank);

/// Same computation starting from precomputed responses (lets callers reuse
/// one response set for several purposes).
std::vector<double> phase_congruency(const BankResponses& responses, const LogGaborBank& bank);

} // namespace metrics
} // namespace facekit

#endif // FACEKIT_METRICS_PHASE_CONGRUENCY_HPP
