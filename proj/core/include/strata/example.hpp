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

#include <cstdint>
#include <string>
#include <string_view>

namespace strata {

enum class Modality : std::uint8_t { audio, text };

std::string_view to_string(Modality m) noexcept;

/// Parses "audio" or "text"; throws ConfigError otherwise.
Modality parse_modality(std::string_view name);

/// Sampling-relevant metadata of one training example.
///
/// input_length is seconds for audio and tokens for text; output_length is
/// the number of target tokens.
struct ExampleMeta {
    std::string id;
    std::string source_id;
    Modality modality = Modality::audio;
    double input_length = 0.0;
    std::int64_t output_length = 0;

    bool operator==(const ExampleMeta &) const = default;
};

/// An infinite, single-consumer pull iterator.
template <typename T>
class Source {
public:
    virtual ~Source() = default;

    virtual T next() = 0;
};

using ExampleSource = Source<ExampleMeta>;

}  // namespace strata
