/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tests/unit_model.cpp
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
#include "facekit/core/model.hpp"

#include "facekit/core/error.hpp"
#include "testsupport/synthetic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

using namespace facekit;
using model::ModelParams;
using model::MorphableBasis;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

// Independent brute-force synthesis: explicit triple loop, no kernel path.
std::vector<double> synthesis_oracle(const MorphableBasis& basis, const Eigen::VectorXd& id,
                                     const Eigen::VectorXd& exp)
{
    std::vector<double> out(basis.mean_shape);
    for (std::size_t row = 0; row < out.size(); ++row)
    {
        for (Eigen::Index k = 0; k < id.size(); ++k)
            out[row] += basis.id_basis(static_cast<Eigen::Index>(row), k) * id[k];
        for (Eigen::Index k = 0; k < exp.size(); ++k)
            out[row] += basis.exp_basis(static_cast<Eigen::Index>(row), k) * exp[k];
    }
    return out;
}

// Elementary rotation product, written out without reusing the library path.
Eigen::Matrix3d rotation_oracle(double pitch, double yaw, double roll)
{
    Eigen::Matrix3d rx = Eigen::Matrix3d::Identity();
    rx(1, 1) = std::cos(pitch);
    rx(1, 2) = -std::sin(pitch);
    rx(2, 1) = std::sin(pitch);
    rx(2, 2) = std::cos(pitch);
    Eigen::Matrix3d ry = Eigen::Matrix3d::Identity();
    ry(0, 0) = std::cos(yaw);
    ry(0, 2) = std::sin(yaw);
    ry(2, 0) = -std::sin(yaw);
    ry(2, 2) = std::cos(yaw);
    Eigen::Matrix3d rz = Eigen::Matrix3d::Identity();
    rz(0, 0) = std::cos(roll);
    rz(0, 1) = -std::sin(roll);
    rz(1, 0) = std::sin(roll);
    rz(1, 1) = std::cos(roll);
    return rz * ry * rx;
}

} // namespace

TEST_CASE("synthesize_shape: zero coefficients reproduce the mean exactly")
{
    const auto basis = testsupport::make_random_basis(50, 4, 3, 6, 11);
    const auto mesh = model::synthesize_shape(basis, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3));
    CHECK(mesh.vertices == basis.mean_shape); // bit-for-bit
    CHECK(mesh.triangles == basis.triangles);
}

TEST_CASE("synthesize_shape: unit basis column moves exactly one coordinate")
{
    MorphableBasis basis;
    basis.vertex_count = 3;
    basis.mean_shape.assign(9, 1.0);
    basis.id_basis = Eigen::MatrixXd::Zero(9, 1);
    basis.id_basis(0, 0) = 1.0; // e0: vertex 0's x
    basis.exp_basis = Eigen::MatrixXd::Zero(9, 0);

    Eigen::VectorXd alpha(1);
    alpha << 2.5;
    const auto mesh = model::synthesize_shape(basis, alpha, Eigen::VectorXd::Zero(0));
    CHECK(mesh.vertices[0] == 3.5);
    for (std::size_t i = 1; i < 9; ++i)
        CHECK(mesh.vertices[i] == 1.0);
}

TEST_CASE("synthesize_shape: random basis matches the matrix-vector oracle")
{
    std::mt19937_64 rng(5);
    const auto basis = testsupport::make_random_basis(5, 3, 2, 3, 17);
    Eigen::VectorXd id(3), exp(2);
    for (int i = 0; i < 3; ++i)
        id[i] = uniform(rng, -2, 2);
    for (int i = 0; i < 2; ++i)
        exp[i] = uniform(rng, -2, 2);

    const auto mesh = model::synthesize_shape(basis, id, exp);
    const auto expected = synthesis_oracle(basis, id, exp);
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(mesh.vertices[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("synthesize_shape: dimension mismatch names the offending vector")
{
    const auto basis = testsupport::make_random_basis(10, 2, 2, 4, 3);
    CHECK_THROWS_WITH_AS(
        model::synthesize_shape(basis, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(2)),
        doctest::Contains("id_coeffs"), InvalidArgumentError);
    CHECK_THROWS_WITH_AS(
        model::synthesize_shape(basis, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(9)),
        doctest::Contains("exp_coeffs"), InvalidArgumentError);
}

TEST_CASE("synthesis linearity property")
{
    const auto basis = testsupport::make_random_basis(40, 3, 2, 5, 23);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::VectorXd a(3), b(3), g(2);
        for (int i = 0; i < 3; ++i)
        {
            a[i] = uniform(rng, -1, 1);
            b[i] = uniform(rng, -1, 1);
        }
        for (int i = 0; i < 2; ++i)
            g[i] = uniform(rng, -1, 1);

        const auto lhs_a = model::synthesize_shape(basis, a + b, g);
        const auto lhs_b = model::synthesize_shape(basis, a, g);
        const auto rhs = model::synthesize_shape(basis, b, Eigen::VectorXd::Zero(2));
        for (std::size_t i = 0; i < lhs_a.vertices.size(); ++i)
        {
            const double lhs = lhs_a.vertices[i] - lhs_b.vertices[i];
            const double exp = rhs.vertices[i] - basis.mean_shape[i];
            CHECK(lhs == doctest::Approx(exp).epsilon(1e-10));
        }
    }
}

TEST_CASE("rotation_from_euler: identity and convention anchor")
{
    CHECK(model::rotation_from_euler(0, 0, 0).isIdentity(0.0));

    // yaw +pi/2 carries +x to -z under R = Rz Ry Rx
    const auto r = model::rotation_from_euler(0, std::numbers::pi / 2, 0);
    const Eigen::Vector3d mapped = r * Eigen::Vector3d(1, 0, 0);
    CHECK(mapped.x() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mapped.y() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mapped.z() == doctest::Approx(-1.0).epsilon(1e-15));

    CHECK_THROWS_AS(model::rotation_from_euler(std::numeric_limits<double>::quiet_NaN(), 0, 0),
                    InvalidArgumentError);
    CHECK_THROWS_AS(model::rotation_from_euler(0, std::numeric_limits<double>::infinity(), 0),
                    InvalidArgumentError);
}

TEST_CASE("rotation_from_euler: 100 random triples are orthonormal and match the oracle")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial)
    {
        const double pitch = uniform(rng, -3.2, 3.2);
        const double yaw = uniform(rng, -3.2, 3.2);
        const double roll = uniform(rng, -3.2, 3.2);
        const auto r = model::rotation_from_euler(pitch, yaw, roll);

        CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(r.determinant() - 1.0) < 1e-9);

        const auto expected = rotation_oracle(pitch, yaw, roll);
        CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("rotation_derivatives agree with central differences")
{
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial)
    {
        const double pitch = uniform(rng, -1.5, 1.5);
        const double yaw = uniform(rng, -1.5, 1.5);
        const double roll = uniform(rng, -1.5, 1.5);
        model::RotationMatrix dp, dy, dr;
        model::rotation_derivatives(pitch, yaw, roll, dp, dy, dr);

        const double h = 1e-6;
        const auto num_dp =
            ((rotation_oracle(pitch + h, yaw, roll) - rotation_oracle(pitch - h, yaw, roll)) /
             (2 * h))
                .eval();
        const auto num_dy =
            ((rotation_oracle(pitch, yaw + h, roll) - rotation_oracle(pitch, yaw - h, roll)) /
             (2 * h))
                .eval();
        const auto num_dr =
            ((rotation_oracle(pitch, yaw, roll + h) - rotation_oracle(pitch, yaw, roll - h)) /
             (2 * h))
                .eval();
        CHECK((dp - num_dp).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((dy - num_dy).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((dr - num_dr).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("project_vertices: spec examples")
{
    model::FaceMesh mesh;
    mesh.vertices = {3, 4, 7};
    auto out = model::project_vertices(mesh, 1.0, Eigen::Matrix3d::Identity(), {0, 0});
    CHECK(out[0].x() == 3.0);
    CHECK(out[0].y() == 4.0);

    mesh.vertices = {1, 1, 5};
    out = model::project_vertices(mesh, 2.0, Eigen::Matrix3d::Identity(), {3, 4});
    CHECK(out[0].x() == 5.0);
    CHECK(out[0].y() == 6.0);

    CHECK_THROWS_AS(model::project_vertices(mesh, 0.0, Eigen::Matrix3d::Identity(), {0, 0}),
                    InvalidArgumentError);
}

TEST_CASE("project_vertices: random pose matches per-vertex arithmetic and properties hold")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto basis = testsupport::make_random_basis(30, 2, 2, 5, 100 + trial);
        const auto mesh = model::synthesize_shape(basis, Eigen::VectorXd::Random(2),
                                                  Eigen::VectorXd::Random(2));
        const double f = uniform(rng, 0.5, 3.0);
        const auto rot = model::rotation_from_euler(uniform(rng, -1, 1), uniform(rng, -1, 1),
                                                    uniform(rng, -1, 1));
        const model::Vec2 t{uniform(rng, -50, 50), uniform(rng, -50, 50)};

        const auto out = model::project_vertices(mesh, f, rot, t);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            const Eigen::Vector3d v = mesh.vertex(i);
            const Eigen::Vector3d rv = rot * v;
            CHECK(std::abs(out[i].x() - (f * rv.x() + t.x())) < 1e-12 * (1 + std::abs(out[i].x())));
            CHECK(std::abs(out[i].y() - (f * rv.y() + t.y())) < 1e-12 * (1 + std::abs(out[i].y())));
        }

        // translation equivariance: delta per point, to rounding
        const model::Vec2 delta{5.25, -3.5};
        const auto shifted = model::project_vertices(mesh, f, rot, t + delta);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            CHECK(std::abs(shifted[i].x() - out[i].x() - delta.x()) <
                  1e-12 * (1 + std::abs(out[i].x())));
            CHECK(std::abs(shifted[i].y() - out[i].y() - delta.y()) <
                  1e-12 * (1 + std::abs(out[i].y())));
        }

        // scale homogeneity: doubling f doubles (out - t)
        const auto doubled = model::project_vertices(mesh, 2 * f, rot, t);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            CHECK(std::abs((doubled[i].x() - t.x()) - 2.0 * (out[i].x() - t.x())) <
                  1e-12 * (1 + std::abs(out[i].x())));
            CHECK(std::abs((doubled[i].y() - t.y()) - 2.0 * (out[i].y() - t.y())) <
                  1e-12 * (1 + std::abs(out[i].y())));
        }
    }
}

TEST_CASE("project_model equals the manual composition bit-for-bit")
{
    const auto basis = testsupport::make_random_basis(60, 3, 2, 8, 53);
    const auto params = testsupport::random_params(basis, 54);

    const auto direct = model::project_model(basis, params);
    const auto mesh = model::synthesize_shape(basis, params.id_coeffs, params.exp_coeffs);
    const auto rot = model::rotation_from_euler(params.pitch, params.yaw, params.roll);
    const auto composed = model::project_vertices(mesh, params.scale, rot, params.translation);

    REQUIRE(direct.size() == composed.size());
    for (std::size_t i = 0; i < direct.size(); ++i)
    {
        CHECK(direct[i].x() == composed[i].x());
        CHECK(direct[i].y() == composed[i].y());
    }

    SUBCASE("identity pose on zero coefficients exposes the mean's xy")
    {
        auto p = ModelParams::neutral(basis);
        const auto out = model::project_model(basis, p);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            CHECK(out[i].x() == basis.mean_shape[3 * i]);
            CHECK(out[i].y() == basis.mean_shape[3 * i + 1]);
        }
    }
}

TEST_CASE("landmark_positions subselects the projection")
{
    auto basis = testsupport::make_random_basis(25, 2, 1, 4, 61);

    SUBCASE("singleton and permutation")
    {
        basis.landmark_indices = {0};
        const auto params = testsupport::random_params(basis, 62);
        auto lm = model::landmark_positions(basis, params);
        auto all = model::project_model(basis, params);
        REQUIRE(lm.size() == 1);
        CHECK(lm[0] == all[0]);

        basis.landmark_indices = {2, 0};
        lm = model::landmark_positions(basis, params);
        CHECK(lm[0] == all[2]);
        CHECK(lm[1] == all[0]);
    }

    SUBCASE("L = 10 random indices match index-by-index")
    {
        basis = testsupport::make_random_basis(40, 2, 1, 10, 63);
        const auto params = testsupport::random_params(basis, 64);
        const auto lm = model::landmark_positions(basis, params);
        const auto all = model::project_model(basis, params);
        REQUIRE(lm.size() == 10);
        for (std::size_t j = 0; j < lm.size(); ++j)
            CHECK(lm[j] == all[basis.landmark_indices[j]]);
    }

    SUBCASE("empty landmark set is an error")
    {
        basis.landmark_indices.clear();
        CHECK_THROWS_AS(model::landmark_positions(basis, testsupport::random_params(basis, 65)),
                        InvalidArgumentError);
    }
}
