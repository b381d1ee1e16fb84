// Copyright (c) the scodec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// "SCBS" compressed image container. The byte layout is normative and
// documented in FORMAT.md.

#ifndef SCODEC_CONTAINER_H_
#define SCODEC_CONTAINER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "scodec/bytes.h"
#include "scodec/weights.h"

namespace scodec {

inline constexpr uint16_t kContainerVersion = 1;
inline constexpr size_t kHeaderBytes = 28;
inline constexpr size_t kColorPayloadBytes = 12;
inline constexpr size_t kStreamCount = 5;  // z, then groups 1..4
inline constexpr size_t kStreamTableBytes = 4 * kStreamCount;

inline constexpr uint16_t kFlagColorFix = 1u << 0;
inline constexpr uint16_t kFlagTiled = 1u << 1;

struct Header {
  uint16_t version = kContainerVersion;
  uint32_t width = 0;   // original, before padding
  uint32_t height = 0;  // original, before padding
  ModelId model_id{};
  uint16_t timestep = 0;  // schedule index used for one-step denoising
  uint16_t flags = 0;
  uint16_t reserved = 0;

  bool operator==(const Header&) const = default;
};

// 16-bit fixed-point per-channel statistics; value k means k / 65535.
struct ColorPayload {
  std::array<uint16_t, 3> mean{};
  std::array<uint16_t, 3> stddev{};

  bool operator==(const ColorPayload&) const = default;
};

struct Container {
  Header header;
  std::optional<ColorPayload> color;
  std::array<Bytes, kStreamCount> streams;

  bool operator==(const Container&) const = default;
};

// The color-fix flag is derived from `color`, not taken from header.flags.
Bytes WriteContainer(const Container& container);
// Throws kFormat with the failing offset on any inconsistency.
Container ReadContainer(std::span<const uint8_t> bytes);

// 8 * file_bytes / (width * height) with the original extents.
double BitsPerPixel(size_t file_bytes, uint32_t width, uint32_t height);

}  // namespace scodec

#endif  // SCODEC_CONTAINER_H_
