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

#include "strata/example.hpp"

#include <string>

#include "strata/errors.hpp"

namespace strata {

std::string_view
to_string(Modality m) noexcept
{
    switch (m) {
    case Modality::audio:
        return "audio";
    case Modality::text:
        return "text";
    }
    return "unknown";
}

Modality
parse_modality(std::string_view name)
{
    if (name == "audio")
        return Modality::audio;
    if (name == "text")
        return Modality::text;
    throw ConfigError{"unknown modality '" + std::string{name} + "' (expected \"audio\" or \"text\")"};
}

}  // namespace strata
