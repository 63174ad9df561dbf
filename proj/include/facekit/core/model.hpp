/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/core/model.hpp
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

#ifndef FACEKIT_CORE_MODEL_HPP
#define FACEKIT_CORE_MODEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace facekit {
namespace model {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/**
 * A rotation matrix. Produced by rotation_from_euler(); kept orthonormal
 * with determinant +1 (checked to 1e-9 on construction paths).
 */
using RotationMatrix = Eigen::Matrix3d;

/**
 * A linear statistical face shape model: mean shape plus identity and
 * expression principal components, with shared triangle topology.
 *
 * Vertex storage is interleaved (x0, y0, z0, x1, ...) in all flat arrays,
 * so mean_shape has 3*vertex_count entries and the bases have that many
 * rows. Basis matrices are column-major: one column per component.
 */
struct MorphableBasis
{
    std::uint32_t vertex_count = 0;
    std::vector<double> mean_shape;              // 3N
    Eigen::MatrixXd id_basis;                    // 3N x K_id
    Eigen::MatrixXd exp_basis;                   // 3N x K_exp
    std::vector<std::array<std::uint32_t, 3>> triangles; // CCW winding
    std::vector<std::uint32_t> landmark_indices;
    std::optional<std::vector<std::array<double, 2>>> uv_coords;   // per vertex, in [0,1]^2
    std::optional<std::vector<std::uint32_t>> mirror_map;          // left-right involution

    int num_id_coeffs() const { return static_cast<int>(id_basis.cols()); }
    int num_exp_coeffs() const { return static_cast<int>(exp_basis.cols()); }

    /// Throws InvalidArgumentError if any structural invariant is violated
    /// (index bounds, basis row counts, mirror involution).
    void validate() const;
};

/**
 * The pose and shape parameters of the model: uniform scale, rotation as
 * Euler angles, in-plane pixel translation, and the two coefficient vectors.
 *
 * The flattened parameter order used everywhere (weight vectors, fitted
 * parameter files) is [scale, pitch, yaw, roll, t_x, t_y, id..., exp...].
 */
struct ModelParams
{
    double scale = 1.0;          // > 0
    double pitch = 0.0;          // radians, rotation about x
    double yaw = 0.0;            // radians, rotation about y
    double roll = 0.0;           // radians, rotation about z
    Vec2 translation{0.0, 0.0};  // pixels
    Eigen::VectorXd id_coeffs;
    Eigen::VectorXd exp_coeffs;

    /// Flattened length for a given basis: 6 + K_id + K_exp.
    static int flat_size(const MorphableBasis& basis)
    {
        return 6 + basis.num_id_coeffs() + basis.num_exp_coeffs();
    }

    Eigen::VectorXd flatten() const;
    static ModelParams unflatten(const Eigen::VectorXd& v, int num_id, int num_exp);

    /// Zero pose (identity rotation, unit scale) with zero coefficients
    /// sized for the basis.
    static ModelParams neutral(const MorphableBasis& basis);
};

/**
 * A concrete synthesized mesh: interleaved vertex positions, the topology
 * they were synthesized with, and optional per-vertex RGB colors in [0,1].
 */
struct FaceMesh
{
    std::vector<double> vertices;                // 3N interleaved
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::optional<std::vector<std::array<double, 3>>> colors;

    std::size_t vertex_count() const { return vertices.size() / 3; }
    Vec3 vertex(std::size_t i) const
    {
        return {vertices[3 * i], vertices[3 * i + 1], vertices[3 * i + 2]};
    }
};

/**
 * Synthesizes a mesh from the basis: mean + id_basis * id_coeffs +
 * exp_basis * exp_coeffs, reshaped to vertices. Topology is copied.
 *
 * Throws InvalidArgumentError (naming the offending vector) on a
 * coefficient length mismatch.
 */
FaceMesh synthesize_shape(const MorphableBasis& basis, const Eigen::VectorXd& id_coeffs,
                          const Eigen::VectorXd& exp_coeffs);

/**
 * Builds the rotation matrix for the intrinsic Euler convention fixed by
 * this toolkit: R = R_z(roll) * R_y(yaw) * R_x(pitch), right-handed.
 * Angles are radians. Throws InvalidArgumentError on non-finite input.
 */
RotationMatrix rotation_from_euler(double pitch, double yaw, double roll);

/// Derivatives of rotation_from_euler with respect to each angle, used by
/// the analytic fitting Jacobian.
void rotation_derivatives(double pitch, double yaw, double roll, RotationMatrix& dR_dpitch,
                          RotationMatrix& dR_dyaw, RotationMatrix& dR_droll);

/**
 * Scaled orthographic projection of every mesh vertex:
 * out_i = scale * Pr * R * v_i + translation, with Pr = [1 0 0; 0 1 0]
 * (z dropped after rotation). Throws InvalidArgumentError if scale <= 0.
 */
std::vector<Vec2> project_vertices(const FaceMesh& mesh, double scale, const RotationMatrix& rotation,
                                   const Vec2& translation);

/// project_vertices variant writing into flat arrays; depth (rotated z per
/// vertex) is also produced when depth_out is non-null. Used on hot paths.
void project_vertices_flat(const std::vector<double>& vertices, double scale,
                           const RotationMatrix& rotation, const Vec2& translation,
                           std::vector<double>& xy_out, std::vector<double>* depth_out);

/**
 * Full model-to-image projection: synthesize with the params' coefficients,
 * rotate with rotation_from_euler(pitch, yaw, roll), project. Equal to the
 * manual composition of the three constituent operations.
 */
std::vector<Vec2> project_model(const MorphableBasis& basis, const ModelParams& params);

/**
 * The projected positions of the basis' landmark vertices, in the order of
 * landmark_indices. Throws InvalidArgumentError if the basis has no
 * landmarks.
 */
std::vector<Vec2> landmark_positions(const MorphableBasis& basis, const ModelParams& params);

} // namespace model
} // namespace facekit

#endif // FACEKIT_CORE_MODEL_HPP
