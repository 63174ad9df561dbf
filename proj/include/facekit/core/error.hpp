/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/core/error.hpp
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

#ifndef FACEKIT_CORE_ERROR_HPP
#define FACEKIT_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace facekit {

/**
 * Base class for all errors thrown by the toolkit. Callers that only need
 * "did it work" semantics can catch this one type.
 */
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller passed a value that violates an operation's preconditions.
class InvalidArgumentError : public Error
{
public:
    using Error::Error;
};

/// Geometry is degenerate for the requested operation (e.g. coincident eye
/// centres, all landmarks at one point).
class DegenerateGeometryError : public Error
{
public:
    using Error::Error;
};

/// A FitConfig (or other configuration) value combination is unusable.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Texture post-processing has no valid source colors to work with.
class EmptyTextureError : public Error
{
public:
    using Error::Error;
};

/// The optimizer failed in a way the caller asked to treat as fatal.
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// Filesystem-level failure (open/read/write), with the path in the message.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Base for malformed-content errors raised by the loaders.
class FormatError : public Error
{
public:
    using Error::Error;
};

/// Container does not start with the expected magic bytes.
class BadMagicError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// Container magic matched but the format version is not supported.
class VersionError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// Checksum over the container payload does not match the stored value.
class CrcError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// File ends before (or after) the byte count implied by its header.
class TruncationError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// A structured text document (JSON, CSV) violates its schema.
class SchemaError : public FormatError
{
public:
    using FormatError::FormatError;
};

/// The file is recognized but uses an encoding variant we do not support
/// (e.g. 16-bit PNG).
class UnsupportedFormatError : public FormatError
{
public:
    using FormatError::FormatError;
};

} // namespace facekit

#endif // FACEKIT_CORE_ERROR_HPP
