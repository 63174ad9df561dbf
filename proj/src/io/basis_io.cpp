/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/io/basis_io.cpp
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

#include <array>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace facekit {
namespace io {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagUv = 1u << 0;
constexpr std::uint32_t kFlagMirror = 1u << 1;
constexpr std::uint32_t kKnownFlags = kFlagUv | kFlagMirror;

// Little-endian scribes. The host is assumed little-endian for the fast
// path; byte-wise assembly keeps this correct elsewhere too.
void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v)
{
    buf.push_back(static_cast<std::uint8_t>(v));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
    buf.push_back(static_cast<std::uint8_t>(v >> 16));
    buf.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_f32(std::vector<std::uint8_t>& buf, float f)
{
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(buf, v);
}

class Reader
{
public:
    Reader(const std::uint8_t* data, std::size_t size, std::string path)
        : data_(data), size_(size), path_(std::move(path))
    {
    }

    std::size_t pos() const { return pos_; }

    void require(std::size_t bytes, const char* what)
    {
        if (pos_ + bytes > size_)
            throw TruncationError(path_ + ": truncated while reading " + std::string(what) +
                                  " (need " + std::to_string(pos_ + bytes) + " bytes, file has " +
                                  std::to_string(size_) + ")");
    }

    std::uint32_t u32(const char* what)
    {
        require(4, what);
        std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                          static_cast<std::uint32_t>(data_[pos_ + 1]) << 8 |
                          static_cast<std::uint32_t>(data_[pos_ + 2]) << 16 |
                          static_cast<std::uint32_t>(data_[pos_ + 3]) << 24;
        pos_ += 4;
        return v;
    }

    float f32(const char* what)
    {
        const std::uint32_t v = u32(what);
        float f;
        std::memcpy(&f, &v, 4);
        return f;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
    std::string path_;
};

} // namespace

std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t size, std::uint32_t seed)
{
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i)
        {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();

    std::uint32_t crc = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < size; ++i)
        crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

void save_basis(const model::MorphableBasis& basis, const std::filesystem::path& path)
{
    basis.validate();

    const std::size_t n = basis.vertex_count;
    const std::size_t n3 = 3 * n;
    std::vector<std::uint8_t> buf;
    buf.reserve(32 + 4 * (n3 * (1 + basis.id_basis.cols() + basis.exp_basis.cols()) +
                          3 * basis.triangles.size() + basis.landmark_indices.size()));

    buf.insert(buf.end(), kMagic.begin(), kMagic.end());
    put_u32(buf, kVersion);
    put_u32(buf, basis.vertex_count);
    put_u32(buf, static_cast<std::uint32_t>(basis.id_basis.cols()));
    put_u32(buf, static_cast<std::uint32_t>(basis.exp_basis.cols()));
    put_u32(buf, static_cast<std::uint32_t>(basis.triangles.size()));
    put_u32(buf, static_cast<std::uint32_t>(basis.landmark_indices.size()));
    std::uint32_t flags = 0;
    if (basis.uv_coords)
        flags |= kFlagUv;
    if (basis.mirror_map)
        flags |= kFlagMirror;
    put_u32(buf, flags);

    for (std::size_t i = 0; i < n3; ++i)
        put_f32(buf, static_cast<float>(basis.mean_shape[i]));
    for (Eigen::Index c = 0; c < basis.id_basis.cols(); ++c)
        for (std::size_t i = 0; i < n3; ++i)
            put_f32(buf, static_cast<float>(basis.id_basis(static_cast<Eigen::Index>(i), c)));
    for (Eigen::Index c = 0; c < basis.exp_basis.cols(); ++c)
        for (std::size_t i = 0; i < n3; ++i)
            put_f32(buf, static_cast<float>(basis.exp_basis(static_cast<Eigen::Index>(i), c)));
    for (const auto& tri : basis.triangles)
        for (const auto idx : tri)
            put_u32(buf, idx);
    for (const auto idx : basis.landmark_indices)
        put_u32(buf, idx);
    if (basis.uv_coords)
        for (const auto& uv : *basis.uv_coords)
        {
            put_f32(buf, static_cast<float>(uv[0]));
            put_f32(buf, static_cast<float>(uv[1]));
        }
    if (basis.mirror_map)
        for (const auto idx : *basis.mirror_map)
            put_u32(buf, idx);

    put_u32(buf, crc32_ieee(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

model::MorphableBasis load_basis(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    Reader r(buf.data(), buf.size(), path.string());

    r.require(4, "magic");
    if (std::memcmp(buf.data(), kMagic.data(), 4) != 0)
        throw BadMagicError(path.string() + ": not a morphable basis container (bad magic)");
    Reader header(buf.data(), buf.size(), path.string());
    header.u32("magic"); // skip past magic
    const std::uint32_t version = header.u32("format_version");
    if (version != kVersion)
        throw VersionError(path.string() + ": unsupported format version " + std::to_string(version));
    const std::uint64_t n = header.u32("vertex_count");
    const std::uint64_t k_id = header.u32("K_id");
    const std::uint64_t k_exp = header.u32("K_exp");
    const std::uint64_t t = header.u32("triangle_count");
    const std::uint64_t l = header.u32("landmark_count");
    const std::uint32_t flags = header.u32("flags");
    if (flags & ~kKnownFlags)
        throw VersionError(path.string() + ": unknown flag bits set");

    // plausibility caps keep the size arithmetic below from overflowing and
    // bound allocations before anything is trusted
    if (n > 50'000'000 || k_id > 100'000 || k_exp > 100'000 || t > 500'000'000 || l > n)
        throw SchemaError(path.string() + ": implausible header counts (N=" + std::to_string(n) +
                          ", K_id=" + std::to_string(k_id) + ", K_exp=" + std::to_string(k_exp) +
                          ", T=" + std::to_string(t) + ", L=" + std::to_string(l) + ")");

    // Validate the total size before touching the arrays so corrupt headers
    // cannot trigger huge allocations.
    const std::uint64_t n3 = 3 * n;
    std::uint64_t expected = 32; // magic + 7 u32 header fields
    expected += 4 * (n3 * (1 + k_id + k_exp));
    expected += 4 * (3 * t + l);
    if (flags & kFlagUv)
        expected += 4 * (2 * n);
    if (flags & kFlagMirror)
        expected += 4 * n;
    expected += 4; // crc
    if (buf.size() != expected)
        throw TruncationError(path.string() + ": expected " + std::to_string(expected) +
                              " bytes from header, file has " + std::to_string(buf.size()));

    const std::uint32_t stored_crc = static_cast<std::uint32_t>(buf[buf.size() - 4]) |
                                     static_cast<std::uint32_t>(buf[buf.size() - 3]) << 8 |
                                     static_cast<std::uint32_t>(buf[buf.size() - 2]) << 16 |
                                     static_cast<std::uint32_t>(buf[buf.size() - 1]) << 24;
    if (crc32_ieee(buf.data(), buf.size() - 4) != stored_crc)
        throw CrcError(path.string() + ": CRC mismatch, file is corrupted");

    Reader body(buf.data(), buf.size(), path.string());
    for (int i = 0; i < 8; ++i)
        body.u32("header"); // magic word + 7 header fields

    model::MorphableBasis basis;
    basis.vertex_count = static_cast<std::uint32_t>(n);
    basis.mean_shape.resize(n3);
    for (auto& v : basis.mean_shape)
        v = body.f32("mean");
    basis.id_basis.resize(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(k_id));
    for (Eigen::Index c = 0; c < basis.id_basis.cols(); ++c)
        for (Eigen::Index i = 0; i < basis.id_basis.rows(); ++i)
            basis.id_basis(i, c) = body.f32("A_id");
    basis.exp_basis.resize(static_cast<Eigen::Index>(n3), static_cast<Eigen::Index>(k_exp));
    for (Eigen::Index c = 0; c < basis.exp_basis.cols(); ++c)
        for (Eigen::Index i = 0; i < basis.exp_basis.rows(); ++i)
            basis.exp_basis(i, c) = body.f32("A_exp");
    basis.triangles.resize(t);
    for (auto& tri : basis.triangles)
        for (auto& idx : tri)
            idx = body.u32("triangles");
    basis.landmark_indices.resize(l);
    for (auto& idx : basis.landmark_indices)
        idx = body.u32("landmarks");
    if (flags & kFlagUv)
    {
        std::vector<std::array<double, 2>> uv(n);
        for (auto& p : uv)
        {
            p[0] = body.f32("uv");
            p[1] = body.f32("uv");
        }
        basis.uv_coords = std::move(uv);
    }
    if (flags & kFlagMirror)
    {
        std::vector<std::uint32_t> mirror(n);
        for (auto& idx : mirror)
            idx = body.u32("mirror");
        basis.mirror_map = std::move(mirror);
    }

    try
    {
        basis.validate();
    }
    catch (const InvalidArgumentError& e)
    {
        // CRC passed but the content is structurally inconsistent.
        throw SchemaError(path.string() + ": " + e.what());
    }
    return basis;
}

} // namespace io
} // namespace facekit
