/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/core/model.cpp
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
#include "facekit/kernels/kernels.hpp"

#include <cmath>
#include <string>

namespace facekit {
namespace model {

void MorphableBasis::validate() const
{
    const std::size_t n3 = static_cast<std::size_t>(vertex_count) * 3;
    if (mean_shape.size() != n3)
        throw InvalidArgumentError("basis mean_shape has " + std::to_string(mean_shape.size()) +
                                   " entries, expected 3*N = " + std::to_string(n3));
    if (static_cast<std::size_t>(id_basis.rows()) != n3)
        throw InvalidArgumentError("id_basis must have 3*N rows");
    if (static_cast<std::size_t>(exp_basis.rows()) != n3)
        throw InvalidArgumentError("exp_basis must have 3*N rows");
    for (const auto& tri : triangles)
        for (const auto idx : tri)
            if (idx >= vertex_count)
                throw InvalidArgumentError("triangle index " + std::to_string(idx) +
                                           " out of range (N = " + std::to_string(vertex_count) + ")");
    for (const auto idx : landmark_indices)
        if (idx >= vertex_count)
            throw InvalidArgumentError("landmark index " + std::to_string(idx) + " out of range");
    if (uv_coords && uv_coords->size() != vertex_count)
        throw InvalidArgumentError("uv_coords length must equal vertex_count");
    if (mirror_map)
    {
        if (mirror_map->size() != vertex_count)
            throw InvalidArgumentError("mirror_map length must equal vertex_count");
        const auto& m = *mirror_map;
        for (std::size_t i = 0; i < m.size(); ++i)
        {
            if (m[i] >= vertex_count)
                throw InvalidArgumentError("mirror_map index out of range");
            if (m[m[i]] != i)
                throw InvalidArgumentError("mirror_map is not an involution at vertex " +
                                           std::to_string(i));
        }
    }
}

Eigen::VectorXd ModelParams::flatten() const
{
    Eigen::VectorXd v(6 + id_coeffs.size() + exp_coeffs.size());
    v[0] = scale;
    v[1] = pitch;
    v[2] = yaw;
    v[3] = roll;
    v[4] = translation.x();
    v[5] = translation.y();
    v.segment(6, id_coeffs.size()) = id_coeffs;
    v.segment(6 + id_coeffs.size(), exp_coeffs.size()) = exp_coeffs;
    return v;
}

ModelParams ModelParams::unflatten(const Eigen::VectorXd& v, int num_id, int num_exp)
{
    if (v.size() != 6 + num_id + num_exp)
        throw InvalidArgumentError("flattened parameter vector has wrong length");
    ModelParams p;
    p.scale = v[0];
    p.pitch = v[1];
    p.yaw = v[2];
    p.roll = v[3];
    p.translation = {v[4], v[5]};
    p.id_coeffs = v.segment(6, num_id);
    p.exp_coeffs = v.segment(6 + num_id, num_exp);
    return p;
}

ModelParams ModelParams::neutral(const MorphableBasis& basis)
{
    ModelParams p;
    p.id_coeffs = Eigen::VectorXd::Zero(basis.num_id_coeffs());
    p.exp_coeffs = Eigen::VectorXd::Zero(basis.num_exp_coeffs());
    return p;
}

FaceMesh synthesize_shape(const MorphableBasis& basis, const Eigen::VectorXd& id_coeffs,
                          const Eigen::VectorXd& exp_coeffs)
{
    if (id_coeffs.size() != basis.id_basis.cols())
        throw InvalidArgumentError("id_coeffs has length " + std::to_string(id_coeffs.size()) +
                                   ", basis expects " + std::to_string(basis.id_basis.cols()));
    if (exp_coeffs.size() != basis.exp_basis.cols())
        throw InvalidArgumentError("exp_coeffs has length " + std::to_string(exp_coeffs.size()) +
                                   ", basis expects " + std::to_string(basis.exp_basis.cols()));

    FaceMesh mesh;
    mesh.vertices = basis.mean_shape;
    mesh.triangles = basis.triangles;

    const auto& k = kernels::active();
    const std::size_t n3 = mesh.vertices.size();
    for (Eigen::Index c = 0; c < id_coeffs.size(); ++c)
        if (id_coeffs[c] != 0.0)
            k.axpy(n3, id_coeffs[c], basis.id_basis.col(c).data(), mesh.vertices.data());
    for (Eigen::Index c = 0; c < exp_coeffs.size(); ++c)
        if (exp_coeffs[c] != 0.0)
            k.axpy(n3, exp_coeffs[c], basis.exp_basis.col(c).data(), mesh.vertices.data());
    return mesh;
}

RotationMatrix rotation_from_euler(double pitch, double yaw, double roll)
{
    if (!std::isfinite(pitch) || !std::isfinite(yaw) || !std::isfinite(roll))
        throw InvalidArgumentError("Euler angles must be finite");

    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cr = std::cos(roll), sr = std::sin(roll);

    RotationMatrix rx, ry, rz;
    rx << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
    ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    rz << cr, -sr, 0, sr, cr, 0, 0, 0, 1;
    return rz * ry * rx;
}

void rotation_derivatives(double pitch, double yaw, double roll, RotationMatrix& dR_dpitch,
                          RotationMatrix& dR_dyaw, RotationMatrix& dR_droll)
{
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cr = std::cos(roll), sr = std::sin(roll);

    RotationMatrix rx, ry, rz, drx, dry, drz;
    rx << 1, 0, 0, 0, cp, -sp, 0, sp, cp;
    ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    rz << cr, -sr, 0, sr, cr, 0, 0, 0, 1;
    drx << 0, 0, 0, 0, -sp, -cp, 0, cp, -sp;
    dry << -sy, 0, cy, 0, 0, 0, -cy, 0, -sy;
    drz << -sr, -cr, 0, cr, -sr, 0, 0, 0, 0;

    dR_dpitch = rz * ry * drx;
    dR_dyaw = rz * dry * rx;
    dR_droll = drz * ry * rx;
}

void project_vertices_flat(const std::vector<double>& vertices, double scale,
                           const RotationMatrix& rotation, const Vec2& translation,
                           std::vector<double>& xy_out, std::vector<double>* depth_out)
{
    if (!(scale > 0.0))
        throw InvalidArgumentError("projection scale must be > 0");
    const std::size_t n = vertices.size() / 3;
    xy_out.resize(2 * n);
    if (depth_out)
        depth_out->resize(n);

    // row-major copy of the rotation for the kernel
    double r[9];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[3 * i + j] = rotation(i, j);

    kernels::active().project_points(n, vertices.data(), r, scale, translation.x(), translation.y(),
                                     xy_out.data(), depth_out ? depth_out->data() : nullptr);
}

std::vector<Vec2> project_vertices(const FaceMesh& mesh, double scale, const RotationMatrix& rotation,
                                   const Vec2& translation)
{
    std::vector<double> flat;
    project_vertices_flat(mesh.vertices, scale, rotation, translation, flat, nullptr);
    std::vector<Vec2> out(mesh.vertex_count());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {flat[2 * i], flat[2 * i + 1]};
    return out;
}

std::vector<Vec2> project_model(const MorphableBasis& basis, const ModelParams& params)
{
    const FaceMesh mesh = synthesize_shape(basis, params.id_coeffs, params.exp_coeffs);
    const RotationMatrix r = rotation_from_euler(params.pitch, params.yaw, params.roll);
    return project_vertices(mesh, params.scale, r, params.translation);
}

std::vector<Vec2> landmark_positions(const MorphableBasis& basis, const ModelParams& params)
{
    if (basis.landmark_indices.empty())
        throw InvalidArgumentError("basis has no landmark indices");
    const auto all = project_model(basis, params);
    std::vector<Vec2> out;
    out.reserve(basis.landmark_indices.size());
    for (const auto idx : basis.landmark_indices)
        out.push_back(all[idx]);
    return out;
}

} // namespace model
} // namespace facekit
