/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/core/format.hpp
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

#ifndef FACEKIT_CORE_FORMAT_HPP
#define FACEKIT_CORE_FORMAT_HPP

#include <charconv>
#include <string>

namespace facekit {

/// Shortest decimal representation that round-trips the double exactly
/// ("0.5" stays "0.5"). Used for all deterministic text output (CSV, OBJ).
inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace facekit

#endif // FACEKIT_CORE_FORMAT_HPP
