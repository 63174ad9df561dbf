/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/align/alignment.hpp
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

#ifndef FACEKIT_ALIGN_ALIGNMENT_HPP
#define FACEKIT_ALIGN_ALIGNMENT_HPP

#include "facekit/core/image.hpp"

#include <array>
#include <vector>

namespace facekit {
namespace align {

using Point2 = std::array<double, 2>;

enum class LandmarkScheme
{
    Full68,   // the standard 68-point scheme; 36-41 right eye, 42-47 left eye
    EyesOnly, // two points: left eye centre, right eye centre
};

/**
 * A set of 2D facial landmarks in pixel coordinates. "Left"/"right" are the
 * subject's left/right, so in an upright photo the left eye appears on the
 * viewer's right.
 */
struct LandmarkSet
{
    LandmarkScheme scheme = LandmarkScheme::Full68;
    std::vector<Point2> points;

    /// Throws InvalidArgumentError when the point count does not match the
    /// scheme (68 for Full68, 2 for EyesOnly).
    void validate() const;
};

/**
 * An in-plane rigid motion: rotation r in degrees (normalized to
 * (-180, 180]) followed by a pixel translation. The point map is
 * p -> rotate(p, r, centre) + t for a caller-chosen rotation centre,
 * conventionally the image centre.
 */
struct RigidTransform2D
{
    double r_degrees = 0.0;
    double t_x = 0.0;
    double t_y = 0.0;
};

/// Wraps an angle in degrees into (-180, 180].
double normalize_degrees(double deg);

/// Eye centres (left, right): Full68 uses the centroid of each eye contour,
/// EyesOnly passes its two points through.
std::pair<Point2, Point2> eye_centers(const LandmarkSet& landmarks);

/**
 * Recovers the rigid motion that carries the aligned landmark geometry onto
 * the unaligned one. r is the signed angle from the aligned eye line to the
 * unaligned eye line; the translation anchors the subject's left eye after
 * rotating the aligned eye centres by r about rotation_center.
 *
 * Throws DegenerateGeometryError when either set has coincident eye centres.
 */
RigidTransform2D compute_pseudo_transform(const LandmarkSet& unaligned, const LandmarkSet& aligned,
                                          const Point2& rotation_center = {0.0, 0.0});

/// Applies the transform's point map to a single point.
Point2 apply_to_point(const RigidTransform2D& transform, const Point2& p,
                      const Point2& rotation_center);

/**
 * Warps an image by the transform: each output pixel is bilinearly sampled
 * from the input at the inverse-mapped location (the exact inverse of the
 * point map: translate by -t, then rotate by -r about rotation_center).
 * Out-of-bounds samples are black. Output dimensions equal the input's.
 *
 * Throws InvalidArgumentError on an empty image.
 */
ImageBuffer apply_rigid_transform(const ImageBuffer& image, const RigidTransform2D& transform,
                                  const Point2& rotation_center);

} // namespace align
} // namespace facekit

#endif // FACEKIT_ALIGN_ALIGNMENT_HPP
