/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/tex/texture.cpp
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
#include "facekit/tex/texture.hpp"

#include "facekit/core/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace facekit {
namespace tex {

namespace {

struct RasterPoint
{
    double x, y, depth;
};

// Inclusive point-in-triangle test with barycentric output; returns false
// for degenerate triangles.
bool barycentric(const double px, const double py, const RasterPoint& a, const RasterPoint& b,
                 const RasterPoint& c, double& w0, double& w1, double& w2)
{
    const double denom = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    if (denom == 0.0)
        return false;
    w0 = ((b.y - c.y) * (px - c.x) + (c.x - b.x) * (py - c.y)) / denom;
    w1 = ((c.y - a.y) * (px - c.x) + (a.x - c.x) * (py - c.y)) / denom;
    w2 = 1.0 - w0 - w1;
    return w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0;
}

} // namespace

VisibilityMask visibility_mask(const model::FaceMesh& mesh, const model::ModelParams& params,
                               int raster_size)
{
    if (mesh.triangles.empty())
        throw InvalidArgumentError("visibility_mask: mesh has no triangles");
    if (raster_size < 64)
        throw InvalidArgumentError("visibility_mask: raster_size must be >= 64");

    const std::size_t n = mesh.vertex_count();
    const model::RotationMatrix rot = model::rotation_from_euler(params.pitch, params.yaw, params.roll);

    std::vector<double> xy;
    std::vector<double> depth;
    model::project_vertices_flat(mesh.vertices, params.scale, rot, params.translation, xy, &depth);

    // area-weighted vertex normals in the rotated frame
    std::vector<model::Vec3> rotated(n);
    for (std::size_t i = 0; i < n; ++i)
        rotated[i] = rot * mesh.vertex(i);
    std::vector<model::Vec3> normals(n, model::Vec3::Zero());
    for (const auto& tri : mesh.triangles)
    {
        const model::Vec3 cross = (rotated[tri[1]] - rotated[tri[0]])
                                      .cross(rotated[tri[2]] - rotated[tri[0]]);
        for (const auto idx : tri)
            normals[idx] += cross;
    }

    // uniform map from the projected bounding box onto the raster
    double min_x = std::numeric_limits<double>::max(), min_y = min_x;
    double max_x = std::numeric_limits<double>::lowest(), max_y = max_x;
    double min_z = std::numeric_limits<double>::max(), max_z = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i)
    {
        min_x = std::min(min_x, xy[2 * i]);
        max_x = std::max(max_x, xy[2 * i]);
        min_y = std::min(min_y, xy[2 * i + 1]);
        max_y = std::max(max_y, xy[2 * i + 1]);
        min_z = std::min(min_z, depth[i]);
        max_z = std::max(max_z, depth[i]);
    }
    constexpr double kMargin = 1.0;
    const double extent = std::max(max_x - min_x, max_y - min_y);
    const double scale = extent > 0.0 ? (raster_size - 2.0 * kMargin) / extent : 1.0;
    auto to_raster_x = [&](double x) { return (x - min_x) * scale + kMargin; };
    auto to_raster_y = [&](double y) { return (y - min_y) * scale + kMargin; };

    // epsilon scaled by the depth extent, floored for flat meshes
    const double bbox_diag = std::hypot(max_x - min_x, max_y - min_y);
    const double depth_eps = 1e-4 * (max_z - min_z) + 1e-9 * (bbox_diag + 1.0);

    std::vector<double> zbuf(static_cast<std::size_t>(raster_size) * raster_size,
                             std::numeric_limits<double>::lowest());
    for (const auto& tri : mesh.triangles)
    {
        RasterPoint p[3];
        for (int k = 0; k < 3; ++k)
            p[k] = {to_raster_x(xy[2 * tri[k]]), to_raster_y(xy[2 * tri[k] + 1]), depth[tri[k]]};

        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].x, p[1].x, p[2].x}))));
        const int x1 = std::min(raster_size - 1,
                                static_cast<int>(std::ceil(std::max({p[0].x, p[1].x, p[2].x}))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].y, p[1].y, p[2].y}))));
        const int y1 = std::min(raster_size - 1,
                                static_cast<int>(std::ceil(std::max({p[0].y, p[1].y, p[2].y}))));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
            {
                double w0, w1, w2;
                if (!barycentric(x, y, p[0], p[1], p[2], w0, w1, w2))
                    continue;
                // delta form is exact when all three attributes coincide
                const double z = p[0].depth + w1 * (p[1].depth - p[0].depth) +
                                 w2 * (p[2].depth - p[0].depth);
                double& cell = zbuf[static_cast<std::size_t>(y) * raster_size + x];
                if (z > cell) // strict: ties keep the earlier triangle
                    cell = z;
            }
    }

    VisibilityMask mask(n, false);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (normals[i].z() <= 0.0)
            continue; // back-facing

        // The buffer is point-sampled at pixel centres while the vertex
        // projects between them; of the four covering pixels, the one most
        // favourable to the vertex stands in for "the depth at its
        // position", which keeps surface slope from reading as occlusion.
        const double rx = to_raster_x(xy[2 * i]);
        const double ry = to_raster_y(xy[2 * i + 1]);
        const int x0 = std::clamp(static_cast<int>(std::floor(rx)), 0, raster_size - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(ry)), 0, raster_size - 1);
        const int x1 = std::min(x0 + 1, raster_size - 1);
        const int y1 = std::min(y0 + 1, raster_size - 1);
        double nearest = zbuf[static_cast<std::size_t>(y0) * raster_size + x0];
        nearest = std::min(nearest, zbuf[static_cast<std::size_t>(y0) * raster_size + x1]);
        nearest = std::min(nearest, zbuf[static_cast<std::size_t>(y1) * raster_size + x0]);
        nearest = std::min(nearest, zbuf[static_cast<std::size_t>(y1) * raster_size + x1]);
        mask[i] = nearest <= depth[i] + depth_eps;
    }
    return mask;
}

VertexColors extract_vertex_colors(const ImageBuffer& image, const std::vector<model::Vec2>& projected,
                                   const VisibilityMask& visibility)
{
    if (projected.size() != visibility.size())
        throw InvalidArgumentError("extract_vertex_colors: projected/visibility length mismatch");

    VertexColors out;
    out.colors.assign(projected.size(), {0.0, 0.0, 0.0});
    out.valid.assign(projected.size(), false);
    for (std::size_t i = 0; i < projected.size(); ++i)
    {
        if (!visibility[i])
            continue;
        const double x = projected[i].x();
        const double y = projected[i].y();
        if (x < 0.0 || x > image.width - 1 || y < 0.0 || y > image.height - 1)
            continue;
        out.colors[i] = image.sample_bilinear_rgb(x, y);
        out.valid[i] = true;
    }
    return out;
}

VertexColors symmetry_fill(const VertexColors& input, const std::vector<std::uint32_t>& mirror_map)
{
    const std::size_t n = input.colors.size();
    if (input.valid.size() != n)
        throw InvalidArgumentError("symmetry_fill: colors/valid length mismatch");
    if (mirror_map.size() != n)
        throw InvalidArgumentError("symmetry_fill: mirror_map length mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (mirror_map[i] >= n || mirror_map[mirror_map[i]] != i)
            throw InvalidArgumentError("symmetry_fill: mirror_map is not an involution");

    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::size_t valid_count = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!input.valid[i])
            continue;
        ++valid_count;
        for (int c = 0; c < 3; ++c)
            mean[c] += input.colors[i][c];
    }
    if (valid_count == 0)
        throw EmptyTextureError("symmetry_fill: no valid vertex colors to fill from");
    for (int c = 0; c < 3; ++c)
        mean[c] /= static_cast<double>(valid_count);

    // both passes read the input snapshot, so fill order cannot matter
    VertexColors out = input;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (input.valid[i])
            continue;
        const std::uint32_t partner = mirror_map[i];
        if (input.valid[partner])
            out.colors[i] = input.colors[partner];
        else
            out.colors[i] = mean;
        out.valid[i] = true;
    }
    return out;
}

TextureAtlas bake_uv_atlas(const model::MorphableBasis& basis,
                           const std::vector<std::array<double, 3>>& colors, int resolution)
{
    if (!basis.uv_coords)
        throw InvalidArgumentError("bake_uv_atlas: basis has no uv coordinates");
    if (resolution < 64 || (resolution & (resolution - 1)) != 0)
        throw InvalidArgumentError("bake_uv_atlas: resolution must be a power of two >= 64, got " +
                                   std::to_string(resolution));
    if (colors.size() != basis.vertex_count)
        throw InvalidArgumentError("bake_uv_atlas: color count does not match the basis");

    const auto& uv = *basis.uv_coords;
    TextureAtlas atlas;
    atlas.image = ImageBuffer(resolution, resolution, 3);
    atlas.coverage.assign(static_cast<std::size_t>(resolution) * resolution, false);

    // uv (0,0) is the bottom-left of the atlas; texel centres at integers
    auto to_texel_x = [&](double u) { return u * resolution - 0.5; };
    auto to_texel_y = [&](double v) { return (1.0 - v) * resolution - 0.5; };

    for (const auto& tri : basis.triangles)
    {
        RasterPoint p[3];
        for (int k = 0; k < 3; ++k)
            p[k] = {to_texel_x(uv[tri[k]][0]), to_texel_y(uv[tri[k]][1]), 0.0};

        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].x, p[1].x, p[2].x}))));
        const int x1 = std::min(resolution - 1,
                                static_cast<int>(std::ceil(std::max({p[0].x, p[1].x, p[2].x}))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].y, p[1].y, p[2].y}))));
        const int y1 = std::min(resolution - 1,
                                static_cast<int>(std::ceil(std::max({p[0].y, p[1].y, p[2].y}))));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
            {
                double w0, w1, w2;
                if (!barycentric(x, y, p[0], p[1], p[2], w0, w1, w2))
                    continue;
                for (int c = 0; c < 3; ++c)
                {
                    const double base = colors[tri[0]][c];
                    atlas.image.at(x, y, c) = base + w1 * (colors[tri[1]][c] - base) +
                                              w2 * (colors[tri[2]][c] - base);
                }
                atlas.coverage[static_cast<std::size_t>(y) * resolution + x] = true;
            }
    }

    // seam-hiding dilation: 4 passes of 8-neighbour averaging into
    // unwritten texels; atlas.coverage keeps the pre-dilation state
    std::vector<bool> written = atlas.coverage;
    for (int pass = 0; pass < 4; ++pass)
    {
        std::vector<bool> next = written;
        for (int y = 0; y < resolution; ++y)
            for (int x = 0; x < resolution; ++x)
            {
                if (written[static_cast<std::size_t>(y) * resolution + x])
                    continue;
                double acc[3] = {0.0, 0.0, 0.0};
                int count = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                    {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= resolution || ny < 0 || ny >= resolution)
                            continue;
                        if (!written[static_cast<std::size_t>(ny) * resolution + nx])
                            continue;
                        for (int c = 0; c < 3; ++c)
                            acc[c] += atlas.image.at(nx, ny, c);
                        ++count;
                    }
                if (count == 0)
                    continue;
                for (int c = 0; c < 3; ++c)
                    atlas.image.at(x, y, c) = acc[c] / count;
                next[static_cast<std::size_t>(y) * resolution + x] = true;
            }
        written.swap(next);
    }
    return atlas;
}

} // namespace tex
} // namespace facekit
