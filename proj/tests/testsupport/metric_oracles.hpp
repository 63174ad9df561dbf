/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tests/testsupport/metric_oracles.hpp
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

#ifndef FACEKIT_TESTS_METRIC_ORACLES_HPP
#define FACEKIT_TESTS_METRIC_ORACLES_HPP

#include "facekit/core/image.hpp"
#include "facekit/metrics/phase_congruency.hpp"

namespace facekit {
namespace testsupport {

/*
 * Reference implementations for the image metrics, written as direct
 * per-window / per-pixel formulas with no shared code on the production
 * side except the log-Gabor filter bank (which the FSIM reference shares
 * on purpose).
 */

/// Direct sliding-window SSIM mean: weighted means and central moments
/// computed per window position.
double ssim_oracle(const ImageBuffer& a, const ImageBuffer& b);

/// Scale-by-scale MS-SSIM using the naive window statistics.
double ms_ssim_oracle(const ImageBuffer& a, const ImageBuffer& b);

/// FSIM recomputed from the shared filter bank responses with its own
/// phase-congruency and gradient loops.
double fsim_oracle(const ImageBuffer& a, const ImageBuffer& b);

} // namespace testsupport
} // namespace facekit

#endif // FACEKIT_TESTS_METRIC_ORACLES_HPP
