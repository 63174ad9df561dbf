/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/kernels/dispatch.cpp
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
#include "facekit/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace facekit {
namespace kernels {

bool avx2_supported()
{
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const Backend& pick()
{
    if (const char* env = std::getenv("FACEKIT_KERNELS"))
    {
        if (std::strcmp(env, "scalar") == 0)
            return scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(env, "avx2") == 0 && avx2_supported())
            return avx2_backend();
#endif
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported())
        return avx2_backend();
#endif
    return scalar_backend();
}

} // namespace

const Backend& active()
{
    static const Backend& chosen = pick();
    return chosen;
}

} // namespace kernels
} // namespace facekit
