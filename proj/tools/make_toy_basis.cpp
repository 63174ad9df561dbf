/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tools/make_toy_basis.cpp
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
 *
 * Writes the synthetic ellipsoid-head basis (UVs, mirror map, landmarks)
 * so the CLI can be exercised without licensed face-model data.
 */
#include "facekit/io/asset_io.hpp"
#include "testsupport/synthetic.hpp"

#include <iostream>

#include <CLI11.hpp>

int main(int argc, char** argv)
{
    CLI::App app{"write a synthetic ellipsoid-head morphable basis"};
    std::string out;
    // 68 landmarks by default so the fit subcommand accepts FULL_68 files
    int rings = 24, segments = 32, num_id = 2, num_exp = 1, landmarks = 68;
    app.add_option("--out", out, "output basis container path")->required();
    app.add_option("--rings", rings, "latitude rings");
    app.add_option("--segments", segments, "longitude segments");
    app.add_option("--id", num_id, "identity components");
    app.add_option("--exp", num_exp, "expression components");
    app.add_option("--landmarks", landmarks, "landmark count");
    CLI11_PARSE(app, argc, argv);

    try
    {
        const auto basis =
            facekit::testsupport::make_ellipsoid_basis(rings, segments, num_id, num_exp, landmarks);
        facekit::io::save_basis(basis, out);
        std::cout << "wrote " << out << ": " << basis.vertex_count << " vertices, "
                  << basis.triangles.size() << " triangles, " << basis.landmark_indices.size()
                  << " landmarks\n";
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
