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

#include "strata/errors.hpp"

#include <utility>

namespace strata {

namespace {

std::string
describe(const std::filesystem::path &path, std::size_t line, const std::string &what)
{
    std::string out = path.string();
    if (line > 0)
        out += ":" + std::to_string(line);
    if (!out.empty())
        out += ": ";
    return out + what;
}

}  // namespace

ParseError::ParseError(std::filesystem::path path, std::size_t line, const std::string &what)
  : Error{describe(path, line, what)}, path_{std::move(path)}, line_{line}
{}

IoError::IoError(std::filesystem::path path, const std::string &what)
  : Error{describe(path, 0, what)}, path_{std::move(path)}
{}

}  // namespace strata
