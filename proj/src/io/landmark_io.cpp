/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/io/landmark_io.cpp
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

#include <fstream>

#include <json.hpp>

namespace facekit {
namespace io {

namespace {

const char* scheme_name(align::LandmarkScheme scheme)
{
    return scheme == align::LandmarkScheme::Full68 ? "FULL_68" : "EYES_ONLY";
}

} // namespace

align::LandmarkSet load_landmarks(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());

    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }

    if (!doc.is_object() || !doc.contains("scheme") || !doc.contains("points"))
        throw SchemaError(path.string() + ": expected an object with 'scheme' and 'points'");

    align::LandmarkSet set;
    const auto scheme = doc["scheme"];
    if (scheme == "FULL_68")
        set.scheme = align::LandmarkScheme::Full68;
    else if (scheme == "EYES_ONLY")
        set.scheme = align::LandmarkScheme::EyesOnly;
    else
        throw SchemaError(path.string() + ": unknown scheme " + scheme.dump());

    const auto& points = doc["points"];
    if (!points.is_array())
        throw SchemaError(path.string() + ": 'points' must be an array");
    for (const auto& p : points)
    {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw SchemaError(path.string() + ": each point must be a [x, y] number pair");
        set.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }

    try
    {
        set.validate();
    }
    catch (const InvalidArgumentError& e)
    {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return set;
}

void save_landmarks(const align::LandmarkSet& set, const std::filesystem::path& path)
{
    set.validate();
    nlohmann::json doc;
    doc["scheme"] = scheme_name(set.scheme);
    auto points = nlohmann::json::array();
    for (const auto& p : set.points)
        points.push_back({p[0], p[1]});
    doc["points"] = std::move(points);

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace io
} // namespace facekit
