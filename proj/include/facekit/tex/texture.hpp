/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/tex/texture.hpp
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

#ifndef FACEKIT_TEX_TEXTURE_HPP
#define FACEKIT_TEX_TEXTURE_HPP

#include "facekit/core/image.hpp"
#include "facekit/core/model.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace facekit {

/*
 * Camera conventions used throughout this module: depth is the rotated z
 * coordinate, larger z is closer to the camera (the camera looks down -z),
 * and front-facing means the area-weighted vertex normal has positive z
 * after rotation. Triangles are CCW-wound in that frame.
 */
namespace tex {

/// Per-vertex camera visibility; true = visible.
using VisibilityMask = std::vector<bool>;

/// Per-vertex colors plus validity flags produced by extraction and
/// refined by symmetry_fill.
struct VertexColors
{
    std::vector<std::array<double, 3>> colors;
    std::vector<bool> valid;
};

struct TextureAtlas
{
    ImageBuffer image;               // RGB, square, power-of-two side
    std::vector<bool> coverage;      // texels written by rasterization (pre-dilation)
};

/**
 * Rasterizes the posed mesh into a raster_size^2 depth buffer and marks a
 * vertex visible when its own depth survives the z test at its projected
 * pixel (within a small epsilon of the buffer) and its normal faces the
 * camera.
 *
 * Throws InvalidArgumentError for meshes without triangles or
 * raster_size < 64.
 */
VisibilityMask visibility_mask(const model::FaceMesh& mesh, const model::ModelParams& params,
                               int raster_size);

/**
 * Bilinearly samples the image at each projected vertex position. Vertices
 * that are invisible or outside the image bounds come back invalid with
 * color (0,0,0).
 */
VertexColors extract_vertex_colors(const ImageBuffer& image, const std::vector<model::Vec2>& projected,
                                   const VisibilityMask& visibility);

/**
 * Mirror-symmetry fill: every invalid vertex takes its mirror partner's
 * color when that partner is valid; vertices invalid on both sides receive
 * the mean of the originally valid colors. Valid vertices are untouched,
 * and the operation is idempotent.
 *
 * Throws EmptyTextureError when no vertex is valid.
 */
VertexColors symmetry_fill(const VertexColors& input, const std::vector<std::uint32_t>& mirror_map);

/**
 * Bakes per-vertex colors into a UV-space atlas by barycentric
 * interpolation, then dilates unwritten texels from written neighbours
 * (4 passes) to hide seams. coverage reflects the pre-dilation texels.
 *
 * Throws InvalidArgumentError when the basis has no uv_coords or the
 * resolution is not a power of two >= 64.
 */
TextureAtlas bake_uv_atlas(const model::MorphableBasis& basis,
                           const std::vector<std::array<double, 3>>& colors, int resolution);

} // namespace tex
} // namespace facekit

#endif // FACEKIT_TEX_TEXTURE_HPP
