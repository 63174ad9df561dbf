/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/io/mesh_io.cpp
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
#include "facekit/io/asset_io.hpp"

#include "facekit/core/error.hpp"
#include "facekit/core/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace facekit {
namespace io {

namespace {

std::uint8_t quantize_channel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

void export_obj(const model::FaceMesh& mesh, const std::filesystem::path& path,
                const std::optional<std::vector<std::array<double, 2>>>& uv,
                const std::optional<std::string>& atlas_png)
{
    if (atlas_png && !uv)
        throw InvalidArgumentError("OBJ export with a texture atlas requires uv coordinates");
    if (uv && uv->size() != mesh.vertex_count())
        throw InvalidArgumentError("uv coordinate count does not match the mesh");

    std::ostringstream body;
    body << "# exported by facekit\n";
    if (atlas_png)
    {
        const auto mtl_path = std::filesystem::path(path).replace_extension(".mtl");
        body << "mtllib " << mtl_path.filename().string() << "\n";

        std::ofstream mtl(mtl_path, std::ios::trunc);
        if (!mtl)
            throw IoError("cannot open " + mtl_path.string() + " for writing");
        mtl << "newmtl facekit_material\nKa 1 1 1\nKd 1 1 1\nKs 0 0 0\nmap_Kd " << *atlas_png << "\n";
        if (!mtl)
            throw IoError("write failed for " + mtl_path.string());
    }

    const std::size_t n = mesh.vertex_count();
    for (std::size_t i = 0; i < n; ++i)
        body << "v " << format_double(mesh.vertices[3 * i]) << ' '
             << format_double(mesh.vertices[3 * i + 1]) << ' '
             << format_double(mesh.vertices[3 * i + 2]) << "\n";
    if (uv)
        for (const auto& t : *uv)
            body << "vt " << format_double(t[0]) << ' ' << format_double(t[1]) << "\n";
    if (atlas_png)
        body << "usemtl facekit_material\n";
    for (const auto& tri : mesh.triangles)
    {
        body << 'f';
        for (const auto idx : tri)
        {
            const auto one_based = idx + 1;
            body << ' ' << one_based;
            if (uv)
                body << '/' << one_based; // shared vertex/uv indexing
        }
        body << "\n";
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << body.str();
    if (!out)
        throw IoError("write failed for " + path.string());
}

void export_ply(const model::FaceMesh& mesh, const std::filesystem::path& path)
{
    const bool colored = mesh.colors.has_value();
    if (colored && mesh.colors->size() != mesh.vertex_count())
        throw InvalidArgumentError("color count does not match the mesh");

    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n"
           << "element vertex " << mesh.vertex_count() << "\n"
           << "property float x\nproperty float y\nproperty float z\n";
    if (colored)
        header << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    header << "element face " << mesh.triangles.size() << "\n"
           << "property list uchar uint vertex_indices\nend_header\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << header.str();

    const std::size_t n = mesh.vertex_count();
    for (std::size_t i = 0; i < n; ++i)
    {
        const float xyz[3] = {static_cast<float>(mesh.vertices[3 * i]),
                              static_cast<float>(mesh.vertices[3 * i + 1]),
                              static_cast<float>(mesh.vertices[3 * i + 2])};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        if (colored)
        {
            const auto& c = (*mesh.colors)[i];
            const std::uint8_t rgb[3] = {quantize_channel(c[0]), quantize_channel(c[1]),
                                         quantize_channel(c[2])};
            out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
        }
    }
    for (const auto& tri : mesh.triangles)
    {
        const std::uint8_t count = 3;
        out.write(reinterpret_cast<const char*>(&count), 1);
        const std::uint32_t idx[3] = {tri[0], tri[1], tri[2]};
        out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

model::FaceMesh load_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());

    model::FaceMesh mesh;
    std::string line;
    while (std::getline(in, line))
    {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v")
        {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw SchemaError(path.string() + ": malformed vertex line: " + line);
            mesh.vertices.insert(mesh.vertices.end(), {x, y, z});
        }
        else if (tag == "f")
        {
            std::array<std::uint32_t, 3> tri{};
            for (int i = 0; i < 3; ++i)
            {
                std::string vert;
                if (!(ls >> vert))
                    throw SchemaError(path.string() + ": face with fewer than 3 vertices: " + line);
                tri[i] = static_cast<std::uint32_t>(std::stoul(vert.substr(0, vert.find('/')))) - 1;
            }
            std::string extra;
            if (ls >> extra)
                throw UnsupportedFormatError(path.string() + ": only triangle faces are supported");
            mesh.triangles.push_back(tri);
        }
        // vt/vn/usemtl and comments are ignored for stats purposes
    }
    for (const auto& tri : mesh.triangles)
        for (const auto idx : tri)
            if (idx >= mesh.vertex_count())
                throw SchemaError(path.string() + ": face index out of range");
    return mesh;
}

model::FaceMesh load_ply(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw BadMagicError(path.string() + ": not a PLY file");

    std::size_t vertex_count = 0, face_count = 0;
    bool colored = false;
    bool little_endian_binary = false;
    std::string element;
    std::vector<std::string> vertex_props;
    while (std::getline(in, line))
    {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "format")
        {
            std::string fmt;
            ls >> fmt;
            little_endian_binary = fmt == "binary_little_endian";
            if (!little_endian_binary)
                throw UnsupportedFormatError(path.string() + ": only binary_little_endian PLY is supported");
        }
        else if (tag == "element")
        {
            std::size_t count;
            ls >> element >> count;
            if (element == "vertex")
                vertex_count = count;
            else if (element == "face")
                face_count = count;
            else
                throw UnsupportedFormatError(path.string() + ": unexpected element " + element);
        }
        else if (tag == "property" && element == "vertex")
        {
            std::string type, name;
            ls >> type >> name;
            vertex_props.push_back(type + " " + name);
        }
        else if (tag == "end_header")
            break;
    }
    if (vertex_props.size() == 6)
        colored = true;
    else if (vertex_props.size() != 3)
        throw UnsupportedFormatError(path.string() + ": unsupported vertex layout");

    model::FaceMesh mesh;
    mesh.vertices.resize(3 * vertex_count);
    if (colored)
        mesh.colors.emplace(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i)
    {
        float xyz[3];
        in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
        for (int j = 0; j < 3; ++j)
            mesh.vertices[3 * i + j] = xyz[j];
        if (colored)
        {
            std::uint8_t rgb[3];
            in.read(reinterpret_cast<char*>(rgb), sizeof(rgb));
            (*mesh.colors)[i] = {rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0};
        }
        if (!in)
            throw TruncationError(path.string() + ": truncated vertex data");
    }
    mesh.triangles.resize(face_count);
    for (auto& tri : mesh.triangles)
    {
        std::uint8_t count;
        in.read(reinterpret_cast<char*>(&count), 1);
        if (!in || count != 3)
            throw UnsupportedFormatError(path.string() + ": only triangle faces are supported");
        std::uint32_t idx[3];
        in.read(reinterpret_cast<char*>(idx), sizeof(idx));
        if (!in)
            throw TruncationError(path.string() + ": truncated face data");
        tri = {idx[0], idx[1], idx[2]};
        for (const auto v : tri)
            if (v >= vertex_count)
                throw SchemaError(path.string() + ": face index out of range");
    }
    return mesh;
}

} // namespace

void export_mesh(const model::FaceMesh& mesh, MeshFormat format, const std::filesystem::path& path,
                 const std::optional<std::vector<std::array<double, 2>>>& uv,
                 const std::optional<std::string>& atlas_png)
{
    switch (format)
    {
    case MeshFormat::Obj:
        export_obj(mesh, path, uv, atlas_png);
        break;
    case MeshFormat::Ply:
        export_ply(mesh, path);
        break;
    }
}

model::FaceMesh load_mesh(const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".obj")
        return load_obj(path);
    if (ext == ".ply")
        return load_ply(path);
    throw UnsupportedFormatError(path.string() + ": unknown mesh extension '" + ext + "'");
}

} // namespace io
} // namespace facekit
