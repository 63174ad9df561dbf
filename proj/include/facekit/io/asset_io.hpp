/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/io/asset_io.hpp
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

#ifndef FACEKIT_IO_ASSET_IO_HPP
#define FACEKIT_IO_ASSET_IO_HPP

#include "facekit/align/alignment.hpp"
#include "facekit/core/image.hpp"
#include "facekit/core/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace facekit {
namespace io {

/*
 * Morphable basis container ("MMB1", version 1), all integers and floats
 * little-endian:
 *
 *   magic            4 bytes "MMB1"
 *   format_version   u32 (= 1)
 *   N, K_id, K_exp   u32
 *   T (triangles)    u32
 *   L (landmarks)    u32
 *   flags            u32  bit0 = has UV, bit1 = has mirror map
 *   mean             f32[3N]
 *   A_id             f32[3N * K_id]   column-major
 *   A_exp            f32[3N * K_exp]  column-major
 *   triangles        u32[3T]
 *   landmarks        u32[L]
 *   uv               f32[2N]          if bit0
 *   mirror           u32[N]           if bit1
 *   crc32            u32  IEEE CRC-32 of every preceding byte
 *
 * In-memory values are double; the f32 file precision is the round-trip
 * boundary.
 */

model::MorphableBasis load_basis(const std::filesystem::path& path);
void save_basis(const model::MorphableBasis& basis, const std::filesystem::path& path);

enum class MeshFormat
{
    Obj,
    Ply,
};

/**
 * Writes a mesh to OBJ (with a companion .mtl referencing atlas_png when
 * given, plus vt records from uv) or to binary little-endian PLY (with
 * uchar vertex colors when the mesh has them).
 *
 * uv is required for OBJ with an atlas; atlas_png is the path the MTL
 * should reference (the PNG itself is written by the caller).
 */
void export_mesh(const model::FaceMesh& mesh, MeshFormat format, const std::filesystem::path& path,
                 const std::optional<std::vector<std::array<double, 2>>>& uv = std::nullopt,
                 const std::optional<std::string>& atlas_png = std::nullopt);

/// Reads back an OBJ or PLY written by export_mesh (format chosen by
/// extension). Used by the stats command.
model::FaceMesh load_mesh(const std::filesystem::path& path);

/// Landmark JSON: {"scheme": "FULL_68" | "EYES_ONLY", "points": [[x, y], ...]}.
align::LandmarkSet load_landmarks(const std::filesystem::path& path);
void save_landmarks(const align::LandmarkSet& set, const std::filesystem::path& path);

/// 8-bit PNG (gray or RGB) or binary PPM/PGM with maxval 255. Values are
/// mapped to [0, 1] on load; saving quantizes round-half-up to 8 bits.
ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

/// IEEE CRC-32 (the PNG/zip polynomial), used by the basis container.
std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t size, std::uint32_t seed = 0);

} // namespace io
} // namespace facekit

#endif // FACEKIT_IO_ASSET_IO_HPP
