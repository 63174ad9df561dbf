/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/align/alignment.cpp
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
#include "facekit/align/alignment.hpp"

#include "facekit/core/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace facekit {
namespace align {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

// Rotates p about c by the transform angle. The r == 0 shortcut keeps the
// identity case bit-exact.
Point2 rotate_about(const Point2& p, double r_degrees, const Point2& c)
{
    if (r_degrees == 0.0)
        return p;
    const double a = r_degrees / kDegPerRad;
    const double ca = std::cos(a), sa = std::sin(a);
    const double dx = p[0] - c[0];
    const double dy = p[1] - c[1];
    return {c[0] + ca * dx - sa * dy, c[1] + sa * dx + ca * dy};
}

} // namespace

void LandmarkSet::validate() const
{
    const std::size_t expected = scheme == LandmarkScheme::Full68 ? 68u : 2u;
    if (points.size() != expected)
        throw InvalidArgumentError("landmark set has " + std::to_string(points.size()) +
                                   " points, scheme expects " + std::to_string(expected));
}

double normalize_degrees(double deg)
{
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0)
        r += 360.0;
    else if (r > 180.0)
        r -= 360.0;
    return r == 0.0 ? 0.0 : r; // fold -0 into +0
}

std::pair<Point2, Point2> eye_centers(const LandmarkSet& landmarks)
{
    landmarks.validate();
    if (landmarks.scheme == LandmarkScheme::EyesOnly)
        return {landmarks.points[0], landmarks.points[1]};

    auto centroid = [&](int begin, int end) {
        Point2 c{0.0, 0.0};
        for (int i = begin; i < end; ++i)
        {
            c[0] += landmarks.points[i][0];
            c[1] += landmarks.points[i][1];
        }
        const double n = end - begin;
        return Point2{c[0] / n, c[1] / n};
    };
    return {centroid(42, 48), centroid(36, 42)}; // (left, right)
}

RigidTransform2D compute_pseudo_transform(const LandmarkSet& unaligned, const LandmarkSet& aligned,
                                          const Point2& rotation_center)
{
    const auto [u_left, u_right] = eye_centers(unaligned);
    const auto [a_left, a_right] = eye_centers(aligned);

    const double u_dx = u_right[0] - u_left[0], u_dy = u_right[1] - u_left[1];
    const double a_dx = a_right[0] - a_left[0], a_dy = a_right[1] - a_left[1];
    if (u_dx == 0.0 && u_dy == 0.0)
        throw DegenerateGeometryError("unaligned eye centres coincide");
    if (a_dx == 0.0 && a_dy == 0.0)
        throw DegenerateGeometryError("aligned eye centres coincide");

    RigidTransform2D t;
    const double angle = std::atan2(u_dy, u_dx) - std::atan2(a_dy, a_dx);
    t.r_degrees = normalize_degrees(angle * kDegPerRad);

    const Point2 rotated_left = rotate_about(a_left, t.r_degrees, rotation_center);
    t.t_x = u_left[0] - rotated_left[0];
    t.t_y = u_left[1] - rotated_left[1];
    return t;
}

Point2 apply_to_point(const RigidTransform2D& transform, const Point2& p,
                      const Point2& rotation_center)
{
    const Point2 q = rotate_about(p, transform.r_degrees, rotation_center);
    return {q[0] + transform.t_x, q[1] + transform.t_y};
}

ImageBuffer apply_rigid_transform(const ImageBuffer& image, const RigidTransform2D& transform,
                                  const Point2& rotation_center)
{
    if (image.empty())
        throw InvalidArgumentError("cannot warp an empty image");

    ImageBuffer out(image.width, image.height, image.channels);
    const RigidTransform2D inv{-transform.r_degrees, 0.0, 0.0};
    for (int y = 0; y < image.height; ++y)
    {
        for (int x = 0; x < image.width; ++x)
        {
            // exact inverse of the point map: undo translation, then rotation
            const Point2 shifted{x - transform.t_x, y - transform.t_y};
            const Point2 src = rotate_about(shifted, inv.r_degrees, rotation_center);
            if (src[0] < 0.0 || src[0] > image.width - 1 || src[1] < 0.0 || src[1] > image.height - 1)
                continue; // stays black
            for (int c = 0; c < image.channels; ++c)
                out.at(x, y, c) = image.sample_bilinear(src[0], src[1], c);
        }
    }
    return out;
}

} // namespace align
} // namespace facekit
