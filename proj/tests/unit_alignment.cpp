/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tests/unit_alignment.cpp
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
#include "testsupport/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

using namespace facekit;
using align::LandmarkScheme;
using align::LandmarkSet;
using align::Point2;
using align::RigidTransform2D;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

LandmarkSet full68_with_eyes(const Point2& left, const Point2& right, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    LandmarkSet set;
    set.scheme = LandmarkScheme::Full68;
    set.points.resize(68);
    for (auto& p : set.points)
        p = {uniform(rng, 0, 200), uniform(rng, 0, 200)};
    // hexagonal eye contours around the requested centres
    for (int i = 0; i < 6; ++i)
    {
        const double a = 2.0 * std::numbers::pi * i / 6.0;
        set.points[36 + i] = {right[0] + std::cos(a), right[1] + std::sin(a)};
        set.points[42 + i] = {left[0] + std::cos(a), left[1] + std::sin(a)};
    }
    return set;
}

Point2 rotate_point(const Point2& p, double deg, const Point2& c)
{
    const double a = deg * std::numbers::pi / 180.0;
    const double dx = p[0] - c[0], dy = p[1] - c[1];
    return {c[0] + std::cos(a) * dx - std::sin(a) * dy, c[1] + std::sin(a) * dx + std::cos(a) * dy};
}

} // namespace

TEST_CASE("eye_centers: EYES_ONLY passthrough and hexagon centroids")
{
    LandmarkSet eyes;
    eyes.scheme = LandmarkScheme::EyesOnly;
    eyes.points = {{10, 20}, {50, 20}};
    auto [left, right] = align::eye_centers(eyes);
    CHECK(left == Point2{10, 20});
    CHECK(right == Point2{50, 20});

    const auto full = full68_with_eyes({70, 40}, {30, 40}, 1);
    auto [l2, r2] = align::eye_centers(full);
    CHECK(l2[0] == doctest::Approx(70).epsilon(1e-12));
    CHECK(l2[1] == doctest::Approx(40).epsilon(1e-12));
    CHECK(r2[0] == doctest::Approx(30).epsilon(1e-12));
    CHECK(r2[1] == doctest::Approx(40).epsilon(1e-12));

    SUBCASE("wrong point count is rejected")
    {
        eyes.points.push_back({1, 1});
        CHECK_THROWS_AS(align::eye_centers(eyes), InvalidArgumentError);
    }
}

TEST_CASE("eye_centers: random FULL_68 matches the arithmetic mean")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial)
    {
        LandmarkSet set;
        set.scheme = LandmarkScheme::Full68;
        set.points.resize(68);
        for (auto& p : set.points)
            p = {uniform(rng, -100, 100), uniform(rng, -100, 100)};

        double lx = 0, ly = 0, rx = 0, ry = 0;
        for (int i = 42; i < 48; ++i)
        {
            lx += set.points[i][0];
            ly += set.points[i][1];
        }
        for (int i = 36; i < 42; ++i)
        {
            rx += set.points[i][0];
            ry += set.points[i][1];
        }
        const auto [left, right] = align::eye_centers(set);
        CHECK(std::abs(left[0] - lx / 6) < 1e-12);
        CHECK(std::abs(left[1] - ly / 6) < 1e-12);
        CHECK(std::abs(right[0] - rx / 6) < 1e-12);
        CHECK(std::abs(right[1] - ry / 6) < 1e-12);
    }
}

TEST_CASE("compute_pseudo_transform: identity is exactly zero")
{
    const auto set = full68_with_eyes({120, 80}, {60, 80}, 3);
    const auto t = align::compute_pseudo_transform(set, set, {100, 100});
    CHECK(t.r_degrees == 0.0);
    CHECK(t.t_x == 0.0);
    CHECK(t.t_y == 0.0);
}

TEST_CASE("compute_pseudo_transform: identity is exact for arbitrary valid sets")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial)
    {
        LandmarkSet set;
        if (trial % 2 == 0)
        {
            set.scheme = LandmarkScheme::EyesOnly;
            set.points = {{uniform(rng, -500, 500), uniform(rng, -500, 500)},
                          {uniform(rng, -500, 500), uniform(rng, -500, 500)}};
            if (set.points[0] == set.points[1])
                continue;
        }
        else
        {
            set.scheme = LandmarkScheme::Full68;
            set.points.resize(68);
            for (auto& p : set.points)
                p = {uniform(rng, -500, 500), uniform(rng, -500, 500)};
        }
        const Point2 center{uniform(rng, -100, 100), uniform(rng, -100, 100)};
        const auto t = align::compute_pseudo_transform(set, set, center);
        CHECK(t.r_degrees == 0.0);
        CHECK(t.t_x == 0.0);
        CHECK(t.t_y == 0.0);
    }
}

TEST_CASE("compute_pseudo_transform: pure translation")
{
    LandmarkSet aligned;
    aligned.scheme = LandmarkScheme::EyesOnly;
    aligned.points = {{40, 50}, {60, 50}};
    LandmarkSet unaligned = aligned;
    for (auto& p : unaligned.points)
    {
        p[0] += 5;
        p[1] += -3;
    }
    const auto t = align::compute_pseudo_transform(unaligned, aligned, {0, 0});
    CHECK(t.r_degrees == 0.0);
    CHECK(t.t_x == doctest::Approx(5).epsilon(1e-12));
    CHECK(t.t_y == doctest::Approx(-3).epsilon(1e-12));
}

TEST_CASE("compute_pseudo_transform: 30 degree construction about the image centre")
{
    const Point2 center{128, 128};
    LandmarkSet aligned;
    aligned.scheme = LandmarkScheme::EyesOnly;
    aligned.points = {{150, 110}, {100, 110}};
    LandmarkSet unaligned = aligned;
    for (auto& p : unaligned.points)
        p = rotate_point(p, 30.0, center);

    const auto t = align::compute_pseudo_transform(unaligned, aligned, center);
    CHECK(std::abs(t.r_degrees - 30.0) < 1e-9);
    CHECK(std::abs(t.t_x) < 1e-9);
    CHECK(std::abs(t.t_y) < 1e-9);
}

TEST_CASE("compute_pseudo_transform: inversion, antisymmetry, degenerate input")
{
    std::mt19937_64 rng(17);
    const Point2 center{100, 100};
    for (int trial = 0; trial < 50; ++trial)
    {
        LandmarkSet aligned;
        aligned.scheme = LandmarkScheme::EyesOnly;
        aligned.points = {{uniform(rng, 60, 140), uniform(rng, 60, 140)},
                          {uniform(rng, 60, 140), uniform(rng, 60, 140)}};
        if (std::hypot(aligned.points[1][0] - aligned.points[0][0],
                       aligned.points[1][1] - aligned.points[0][1]) < 1.0)
            continue;

        const double r = uniform(rng, -179.0, 179.0);
        const double tx = uniform(rng, -50, 50), ty = uniform(rng, -50, 50);
        LandmarkSet unaligned = aligned;
        for (auto& p : unaligned.points)
        {
            p = rotate_point(p, r, center);
            p[0] += tx;
            p[1] += ty;
        }

        const auto t = align::compute_pseudo_transform(unaligned, aligned, center);
        CHECK(std::abs(t.r_degrees - r) < 1e-9);
        CHECK(std::abs(t.t_x - tx) < 1e-9);
        CHECK(std::abs(t.t_y - ty) < 1e-9);

        // the recovered point map reproduces both eye centres
        for (int e = 0; e < 2; ++e)
        {
            const auto mapped = align::apply_to_point(t, aligned.points[e], center);
            CHECK(std::abs(mapped[0] - unaligned.points[e][0]) < 1e-9);
            CHECK(std::abs(mapped[1] - unaligned.points[e][1]) < 1e-9);
        }

        // antisymmetry of the angle
        const auto back = align::compute_pseudo_transform(aligned, unaligned, center);
        CHECK(std::abs(align::normalize_degrees(back.r_degrees + t.r_degrees)) < 1e-9);
    }

    LandmarkSet degenerate;
    degenerate.scheme = LandmarkScheme::EyesOnly;
    degenerate.points = {{10, 10}, {10, 10}};
    CHECK_THROWS_AS(align::compute_pseudo_transform(degenerate, degenerate, center),
                    DegenerateGeometryError);
}

TEST_CASE("normalize_degrees wraps into (-180, 180]")
{
    CHECK(align::normalize_degrees(0.0) == 0.0);
    CHECK(align::normalize_degrees(180.0) == 180.0);
    CHECK(align::normalize_degrees(-180.0) == 180.0);
    CHECK(align::normalize_degrees(360.0) == 0.0);
    CHECK(align::normalize_degrees(541.0) == doctest::Approx(-179.0));
    CHECK(align::normalize_degrees(-541.0) == doctest::Approx(179.0));
}

TEST_CASE("apply_rigid_transform: identity is bit-exact, integer translation moves pixels")
{
    const auto img = testsupport::make_smooth_random_image(32, 24, 5, 3);
    const auto same = align::apply_rigid_transform(img, {0.0, 0.0, 0.0}, {16, 12});
    CHECK(same.data == img.data);

    ImageBuffer dot(32, 32, 1);
    dot.at(5, 5) = 1.0;
    const auto moved = align::apply_rigid_transform(dot, {0.0, 10.0, 0.0}, {16, 16});
    CHECK(moved.at(15, 5) == 1.0);
    double total = 0;
    for (const auto v : moved.data)
        total += v;
    CHECK(total == doctest::Approx(1.0)); // nothing smeared

    CHECK_THROWS_AS(align::apply_rigid_transform(ImageBuffer{}, {0, 0, 0}, {0, 0}),
                    InvalidArgumentError);
}

TEST_CASE("apply_rigid_transform: +90 then -90 about the centre restores the interior")
{
    const int size = 64;
    const auto img = testsupport::make_smooth_random_image(size, size, 9, 1);
    const Point2 center{(size - 1) / 2.0, (size - 1) / 2.0};
    const auto once = align::apply_rigid_transform(img, {90.0, 0.0, 0.0}, center);
    const auto back = align::apply_rigid_transform(once, {-90.0, 0.0, 0.0}, center);

    // interior pixels (inscribed disc, margin for the two bilinear passes)
    for (int y = 8; y < size - 8; ++y)
        for (int x = 8; x < size - 8; ++x)
        {
            const double dx = x - center[0], dy = y - center[1];
            if (std::hypot(dx, dy) > size / 2.0 - 8)
                continue;
            CHECK(std::abs(back.at(x, y) - img.at(x, y)) <= 2.0 / 255.0);
        }
}
