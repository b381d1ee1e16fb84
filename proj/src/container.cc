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

#include "scodec/container.h"

#include <algorithm>
#include <limits>
#include <string>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr uint8_t kMagic[4] = {'S', 'C', 'B', 'S'};

}  // namespace

Bytes WriteContainer(const Container& c) {
  ByteWriter w;
  w.Raw(kMagic);
  w.U16(c.header.version);
  w.U32(c.header.width);
  w.U32(c.header.height);
  w.Raw(c.header.model_id);
  w.U16(c.header.timestep);
  uint16_t flags = c.header.flags & ~kFlagColorFix;
  if (c.color) flags |= kFlagColorFix;
  w.U16(flags);
  w.U16(c.header.reserved);
  if (c.color) {
    for (uint16_t v : c.color->mean) w.U16(v);
    for (uint16_t v : c.color->stddev) w.U16(v);
  }
  for (const auto& s : c.streams) {
    if (s.size() > std::numeric_limits<uint32_t>::max()) {
      Fail(ErrorKind::kConfig, "stream too large for container");
    }
    w.U32(static_cast<uint32_t>(s.size()));
  }
  for (const auto& s : c.streams) w.Raw(s);
  return w.Take();
}

Container ReadContainer(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    Fail(ErrorKind::kFormat, "bad container magic at offset 0");
  }
  Container c;
  c.header.version = r.U16("version");
  if (c.header.version != kContainerVersion) {
    Fail(ErrorKind::kFormat, "unsupported container version " +
                                 std::to_string(c.header.version) +
                                 " at offset 4");
  }
  c.header.width = r.U32("width");
  c.header.height = r.U32("height");
  if (c.header.width == 0 || c.header.height == 0) {
    Fail(ErrorKind::kFormat, "zero image extent at offset 6");
  }
  auto id = r.Raw(c.header.model_id.size(), "model id");
  std::copy(id.begin(), id.end(), c.header.model_id.begin());
  c.header.timestep = r.U16("timestep");
  c.header.flags = r.U16("flags");
  c.header.reserved = r.U16("reserved");
  if (c.header.flags & ~(kFlagColorFix | kFlagTiled)) {
    Fail(ErrorKind::kFormat, "unknown flag bits at offset 24");
  }
  if (c.header.flags & kFlagColorFix) {
    ColorPayload color;
    for (auto& v : color.mean) v = r.U16("color mean");
    for (auto& v : color.stddev) v = r.U16("color stddev");
    c.color = color;
  }
  std::array<uint32_t, kStreamCount> lengths{};
  for (auto& len : lengths) len = r.U32("stream length");
  const size_t table_end = r.offset();
  uint64_t total = 0;
  for (uint32_t len : lengths) total += len;
  if (total != r.remaining()) {
    Fail(ErrorKind::kFormat, "stream table at offset " +
                                 std::to_string(table_end - kStreamTableBytes) +
                                 " declares " + std::to_string(total) +
                                 " payload bytes but " +
                                 std::to_string(r.remaining()) + " follow");
  }
  for (size_t i = 0; i < kStreamCount; ++i) {
    auto raw = r.Raw(lengths[i], "stream payload");
    c.streams[i].assign(raw.begin(), raw.end());
  }
  return c;
}

double BitsPerPixel(size_t file_bytes, uint32_t width, uint32_t height) {
  return 8.0 * static_cast<double>(file_bytes) /
         (static_cast<double>(width) * static_cast<double>(height));
}

}  // namespace scodec
