// Copyright (c) 2026, The strata Authors. All rights reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace strata {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (weights, grids, key sets, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed manifest or shard content.
class ParseError : public Error {
public:
    ParseError(std::filesystem::path path, std::size_t line, const std::string &what);

    const std::filesystem::path &path() const noexcept { return path_; }

    /// 1-based line number; 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::filesystem::path path_;
    std::size_t line_;
};

/// A file could not be opened or read.
class IoError : public Error {
public:
    IoError(std::filesystem::path path, const std::string &what);

    const std::filesystem::path &path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Argument outside an operation's domain (e.g. an empty batch).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Batch-size search cannot succeed: even a batch of one runs out of memory.
class UnsatisfiableError : public Error {
public:
    using Error::Error;
};

/// A StepRunner reported outcomes that are not monotone in batch size.
class ContractViolation : public Error {
public:
    using Error::Error;
};

}  // namespace strata
