/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tests/unit_io.cpp
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
#include "testsupport/synthetic.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

using namespace facekit;

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("crc32 matches the published check vector")
{
    const char* s = "123456789";
    CHECK(io::crc32_ieee(reinterpret_cast<const std::uint8_t*>(s), 9) == 0xCBF43926u);
}

TEST_CASE("basis container: round trip is exact at f32 precision")
{
    testsupport::TempDir dir;
    auto basis = testsupport::make_ellipsoid_basis(8, 12, 2, 1, 6);
    const auto path = dir.path() / "basis.mmb";
    io::save_basis(basis, path);
    const auto loaded = io::load_basis(path);

    CHECK(loaded.vertex_count == basis.vertex_count);
    CHECK(loaded.triangles == basis.triangles);
    CHECK(loaded.landmark_indices == basis.landmark_indices);
    REQUIRE(loaded.mirror_map.has_value());
    CHECK(*loaded.mirror_map == *basis.mirror_map);
    REQUIRE(loaded.uv_coords.has_value());

    for (std::size_t i = 0; i < basis.mean_shape.size(); ++i)
        CHECK(loaded.mean_shape[i] == static_cast<double>(static_cast<float>(basis.mean_shape[i])));
    for (Eigen::Index c = 0; c < basis.id_basis.cols(); ++c)
        for (Eigen::Index r = 0; r < basis.id_basis.rows(); ++r)
            CHECK(loaded.id_basis(r, c) ==
                  static_cast<double>(static_cast<float>(basis.id_basis(r, c))));
    for (std::size_t i = 0; i < basis.uv_coords->size(); ++i)
    {
        CHECK((*loaded.uv_coords)[i][0] ==
              static_cast<double>(static_cast<float>((*basis.uv_coords)[i][0])));
        CHECK((*loaded.uv_coords)[i][1] ==
              static_cast<double>(static_cast<float>((*basis.uv_coords)[i][1])));
    }

    // a second save -> load round trip is bit-stable (values already f32)
    const auto path2 = dir.path() / "basis2.mmb";
    io::save_basis(loaded, path2);
    CHECK(read_bytes(path) == read_bytes(path2));
}

TEST_CASE("basis container: every corruption class yields its typed error")
{
    testsupport::TempDir dir;
    const auto basis = testsupport::make_random_basis(20, 2, 1, 5, 77);
    const auto path = dir.path() / "basis.mmb";
    io::save_basis(basis, path);
    const auto good = read_bytes(path);

    SUBCASE("bad magic")
    {
        auto bad = good;
        bad[0] = 'X';
        write_bytes(path, bad);
        CHECK_THROWS_AS(io::load_basis(path), BadMagicError);
    }
    SUBCASE("version mismatch")
    {
        auto bad = good;
        bad[4] = 99;
        write_bytes(path, bad);
        CHECK_THROWS_AS(io::load_basis(path), VersionError);
    }
    SUBCASE("payload corruption fails the CRC")
    {
        auto bad = good;
        bad[40] ^= 0x5A;
        write_bytes(path, bad);
        CHECK_THROWS_AS(io::load_basis(path), CrcError);
    }
    SUBCASE("truncation names the expected and actual byte counts")
    {
        auto bad = good;
        bad.resize(bad.size() / 2);
        write_bytes(path, bad);
        try
        {
            io::load_basis(path);
            FAIL("expected TruncationError");
        }
        catch (const TruncationError& e)
        {
            const std::string msg = e.what();
            CHECK(msg.find(std::to_string(good.size())) != std::string::npos);
            CHECK(msg.find(std::to_string(bad.size())) != std::string::npos);
        }
    }
    SUBCASE("trailing garbage is rejected")
    {
        auto bad = good;
        bad.push_back(0);
        write_bytes(path, bad);
        CHECK_THROWS_AS(io::load_basis(path), TruncationError);
    }
    SUBCASE("missing file is an IoError")
    {
        CHECK_THROWS_AS(io::load_basis(dir.path() / "nope.mmb"), IoError);
    }
    SUBCASE("implausible header counts are rejected before any allocation")
    {
        auto bad = good;
        // N, K_id, K_exp all 0xFFFFFFFF: the naive size product would wrap
        for (int i = 8; i < 20; ++i)
            bad[i] = 0xFF;
        write_bytes(path, bad);
        CHECK_THROWS_AS(io::load_basis(path), SchemaError);
    }
}

TEST_CASE("basis container: 200-iteration corruption fuzz only ever throws typed errors")
{
    testsupport::TempDir dir;
    const auto basis = testsupport::make_ellipsoid_basis(6, 8, 1, 1, 4);
    const auto path = dir.path() / "basis.mmb";
    io::save_basis(basis, path);
    const auto good = read_bytes(path);

    std::mt19937_64 rng(123);
    for (int iter = 0; iter < 200; ++iter)
    {
        auto bad = good;
        switch (rng() % 3)
        {
        case 0: // truncate
            bad.resize(rng() % (good.size() + 1));
            break;
        case 1: // flip bytes
            for (int k = 0; k < 4; ++k)
                bad[rng() % bad.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
            break;
        default: // clobber a header field
            bad[8 + rng() % 24] = static_cast<std::uint8_t>(rng());
            break;
        }
        write_bytes(path, bad);
        if (bad == good)
            continue;
        CHECK_THROWS_AS(io::load_basis(path), Error);
    }
}

TEST_CASE("mesh export: PLY record counts and reparse")
{
    testsupport::TempDir dir;
    model::FaceMesh square;
    square.vertices = {0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0};
    square.triangles = {{0, 1, 2}, {0, 2, 3}};

    const auto ply = dir.path() / "square.ply";
    io::export_mesh(square, io::MeshFormat::Ply, ply);

    // header declares exactly 4 vertices and 2 faces
    std::ifstream in(ply, std::ios::binary);
    std::string header((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(header.find("element vertex 4") != std::string::npos);
    CHECK(header.find("element face 2") != std::string::npos);

    const auto back = io::load_mesh(ply);
    CHECK(back.vertex_count() == 4);
    CHECK(back.triangles == square.triangles);
}

TEST_CASE("mesh export: OBJ reparse with an independent reader")
{
    testsupport::TempDir dir;
    const auto basis = testsupport::make_ellipsoid_basis(6, 8, 1, 1, 4);
    const auto mesh = model::synthesize_shape(basis, Eigen::VectorXd::Zero(1),
                                              Eigen::VectorXd::Zero(1));
    const auto obj = dir.path() / "head.obj";
    io::export_mesh(mesh, io::MeshFormat::Obj, obj, basis.uv_coords, std::string("head.png"));
    CHECK(std::filesystem::exists(dir.path() / "head.mtl"));

    // independent line-level reparse
    std::ifstream in(obj);
    std::string line;
    std::size_t v_count = 0, vt_count = 0, f_count = 0;
    std::vector<std::array<std::uint32_t, 3>> faces;
    while (std::getline(in, line))
    {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v")
            ++v_count;
        else if (tag == "vt")
            ++vt_count;
        else if (tag == "f")
        {
            ++f_count;
            std::array<std::uint32_t, 3> tri{};
            for (auto& idx : tri)
            {
                std::string tok;
                ls >> tok;
                tri[&idx - tri.data()] = static_cast<std::uint32_t>(std::stoul(tok)) - 1;
            }
            faces.push_back(tri);
        }
    }
    CHECK(v_count == mesh.vertex_count());
    CHECK(vt_count == mesh.vertex_count());
    CHECK(f_count == mesh.triangles.size());
    CHECK(faces == mesh.triangles);
}

TEST_CASE("mesh export: requesting an atlas without uv coordinates is rejected")
{
    testsupport::TempDir dir;
    model::FaceMesh tri;
    tri.vertices = {0, 0, 0, 1, 0, 0, 0, 1, 0};
    tri.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(io::export_mesh(tri, io::MeshFormat::Obj, dir.path() / "t.obj", std::nullopt,
                                    std::string("a.png")),
                    InvalidArgumentError);
}

TEST_CASE("mesh export: PLY colors survive within uchar quantization")
{
    testsupport::TempDir dir;
    std::mt19937_64 rng(31);
    model::FaceMesh mesh;
    mesh.vertices = {0, 0, 0, 1, 0, 0, 0, 1, 0};
    mesh.triangles = {{0, 1, 2}};
    mesh.colors.emplace();
    for (int i = 0; i < 3; ++i)
        mesh.colors->push_back({(rng() % 256) / 255.0 * 0.99 + 0.005, (rng() % 256) / 255.0,
                                (rng() % 256) / 255.0});

    const auto ply = dir.path() / "tri.ply";
    io::export_mesh(mesh, io::MeshFormat::Ply, ply);
    const auto back = io::load_mesh(ply);
    REQUIRE(back.colors.has_value());
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs((*back.colors)[i][c] - (*mesh.colors)[i][c]) <= 1.0 / 255.0 + 1e-12);
}

TEST_CASE("landmark JSON: happy path, schema errors, exact round trip")
{
    testsupport::TempDir dir;
    const auto path = dir.path() / "lm.json";

    SUBCASE("68-point file loads as Full68")
    {
        std::ofstream out(path);
        out << R"({"scheme": "FULL_68", "points": [)";
        for (int i = 0; i < 68; ++i)
            out << (i ? "," : "") << "[" << i << "," << i * 2 << "]";
        out << "]}";
        out.close();
        const auto set = io::load_landmarks(path);
        CHECK(set.scheme == align::LandmarkScheme::Full68);
        CHECK(set.points.size() == 68);
        CHECK(set.points[3][1] == 6.0);
    }
    SUBCASE("67 points labeled FULL_68 is a schema error")
    {
        std::ofstream out(path);
        out << R"({"scheme": "FULL_68", "points": [)";
        for (int i = 0; i < 67; ++i)
            out << (i ? "," : "") << "[0,0]";
        out << "]}";
        out.close();
        CHECK_THROWS_AS(io::load_landmarks(path), SchemaError);
    }
    SUBCASE("non-numeric entry is a schema error")
    {
        std::ofstream out(path);
        out << R"({"scheme": "EYES_ONLY", "points": [[1, 2], ["x", 4]]})";
        out.close();
        CHECK_THROWS_AS(io::load_landmarks(path), SchemaError);
    }
    SUBCASE("EYES_ONLY round trip is exact")
    {
        align::LandmarkSet set;
        set.scheme = align::LandmarkScheme::EyesOnly;
        set.points = {{0.1 + 1.0 / 3.0, -7.25e-13}, {123456.789012345, 2.0 / 7.0}};
        io::save_landmarks(set, path);
        const auto back = io::load_landmarks(path);
        CHECK(back.scheme == set.scheme);
        CHECK(back.points == set.points);
    }
}

TEST_CASE("image IO: PGM scaling, round trips, unsupported formats")
{
    testsupport::TempDir dir;

    SUBCASE("2x2 PGM values hit thirds of unity")
    {
        const auto path = dir.path() / "g.pgm";
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 2\n255\n";
        const std::uint8_t px[4] = {0, 85, 170, 255};
        out.write(reinterpret_cast<const char*>(px), 4);
        out.close();

        const auto img = io::load_image(path);
        CHECK(img.width == 2);
        CHECK(img.channels == 1);
        const double expected[4] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(img.data[i] - expected[i]) <= 1.0 / 510.0);
    }
    SUBCASE("PNG and PPM round trips stay within the quantization bound")
    {
        const auto img = testsupport::make_smooth_random_image(19, 13, 3, 3);
        for (const char* name : {"img.png", "img.ppm"})
        {
            const auto path = dir.path() / name;
            io::save_image(img, path);
            const auto back = io::load_image(path);
            REQUIRE(back.width == img.width);
            REQUIRE(back.channels == 3);
            for (std::size_t i = 0; i < img.data.size(); ++i)
                CHECK(std::abs(back.data[i] - img.data[i]) <= 1.0 / 510.0 + 1e-12);
        }
        const auto gray = testsupport::make_smooth_random_image(9, 9, 4, 1);
        const auto path = dir.path() / "g.png";
        io::save_image(gray, path);
        CHECK(io::load_image(path).channels == 1);
    }
    SUBCASE("16-bit PNG is rejected as unsupported")
    {
        // hand-rolled 1x1 16-bit grayscale PNG
        const auto path = dir.path() / "deep.png";
        std::vector<std::uint8_t> png = {0x89, 'P',  'N',  'G',  0x0D, 0x0A, 0x1A, 0x0A};
        auto chunk = [&](const char* type, const std::vector<std::uint8_t>& payload) {
            const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
            for (int s = 24; s >= 0; s -= 8)
                png.push_back(static_cast<std::uint8_t>(len >> s));
            std::vector<std::uint8_t> body(type, type + 4);
            body.insert(body.end(), payload.begin(), payload.end());
            png.insert(png.end(), body.begin(), body.end());
            const std::uint32_t crc = io::crc32_ieee(body.data(), body.size());
            for (int s = 24; s >= 0; s -= 8)
                png.push_back(static_cast<std::uint8_t>(crc >> s));
        };
        chunk("IHDR", {0, 0, 0, 1, 0, 0, 0, 1, 16, 0, 0, 0, 0}); // 1x1, 16-bit gray
        // zlib stream holding one filtered row (filter 0 + two bytes)
        chunk("IDAT", {0x78, 0x01, 0x01, 0x03, 0x00, 0xFC, 0xFF, 0x00, 0xAB, 0xCD, 0x02, 0x32, 0x01,
                       0x79});
        chunk("IEND", {});
        write_bytes(path, png);
        CHECK_THROWS_AS(io::load_image(path), UnsupportedFormatError);
    }
    SUBCASE("unknown extension")
    {
        CHECK_THROWS_AS(io::load_image(dir.path() / "x.bmp"), UnsupportedFormatError);
    }
    SUBCASE("absurd PNM dimensions are rejected before allocation")
    {
        const auto path = dir.path() / "huge.pgm";
        write_bytes(path, {'P', '5', '\n', '9', '9', '9', '9', '9', ' ', '9', '9', '9', '9', '9',
                           '\n', '2', '5', '5', '\n', 0});
        CHECK_THROWS_AS(io::load_image(path), UnsupportedFormatError);
    }
}
