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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scodec/color_fix.h"
#include "scodec/container.h"
#include "scodec/error.h"

namespace scodec {
namespace {

Container Minimal() {
  Container c;
  c.header.width = 1;
  c.header.height = 1;
  return c;
}

Container RandomContainer(std::mt19937_64& rng) {
  Container c;
  c.header.width = 1 + rng() % 100000;
  c.header.height = 1 + rng() % 100000;
  for (auto& b : c.header.model_id) b = static_cast<uint8_t>(rng());
  c.header.timestep = static_cast<uint16_t>(rng());
  c.header.reserved = static_cast<uint16_t>(rng());
  if (rng() & 1) {
    ColorPayload p;
    for (auto& v : p.mean) v = static_cast<uint16_t>(rng());
    for (auto& v : p.stddev) v = static_cast<uint16_t>(rng());
    c.color = p;
  }
  c.header.flags = static_cast<uint16_t>((c.color ? kFlagColorFix : 0) |
                                         ((rng() & 1) ? kFlagTiled : 0));
  for (auto& s : c.streams) {
    s.resize(rng() % 300);
    for (auto& b : s) b = static_cast<uint8_t>(rng());
  }
  return c;
}

void ExpectFormatError(const Bytes& b, const std::string& fragment) {
  try {
    ReadContainer(b);
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos,
                  e.what());
  }
}

TEST_CASE("minimal container is header plus stream table") {
  const Bytes b = WriteContainer(Minimal());
  CHECK(kHeaderBytes == 28);
  CHECK(b.size() == kHeaderBytes + kStreamTableBytes);
  CHECK(b.size() == 48);
  CHECK(ReadContainer(b) == Minimal());
  CHECK(b[0] == 'S');
  CHECK(b[3] == 'S');
}

TEST_CASE("color payload adds exactly 96 bits") {
  Container c = Minimal();
  const size_t without = WriteContainer(c).size();
  c.color = ToPayload(ColorStats{{0.5, 0.4, 0.3}, {0.1, 0.2, 0.3}});
  const Bytes b = WriteContainer(c);
  CHECK(b.size() - without == 12);
  CHECK(8 * kColorPayloadBytes == 96);
  const Container r = ReadContainer(b);
  CHECK(r.color == c.color);
  CHECK((r.header.flags & kFlagColorFix) != 0);
}

TEST_CASE("write/read fuzz round trip") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const Container c = RandomContainer(rng);
    const Bytes b = WriteContainer(c);
    REQUIRE(ReadContainer(b) == c);
    REQUIRE(WriteContainer(ReadContainer(b)) == b);
  }
}

TEST_CASE("little-endian field layout") {
  Container c = Minimal();
  c.header.width = 0x01020304;
  c.header.height = 0x0A0B0C0D;
  c.header.timestep = 999;
  c.streams[2] = {0xEE};
  const Bytes b = WriteContainer(c);
  CHECK(b[4] == 1);  // version
  CHECK(b[5] == 0);
  CHECK(b[6] == 0x04);
  CHECK(b[9] == 0x01);
  CHECK(b[10] == 0x0D);
  CHECK(b[22] == (999 & 0xFF));
  CHECK(b[23] == (999 >> 8));
  CHECK(b[28 + 8] == 1);  // g2 length
  CHECK(b.back() == 0xEE);
}

TEST_CASE("malformed containers report offsets") {
  const Bytes good = WriteContainer(Minimal());
  Bytes magic = good;
  magic[1] = 'X';
  ExpectFormatError(magic, "offset 0");
  Bytes version = good;
  version[4] = 2;
  ExpectFormatError(version, "version");
  Bytes flags = good;
  flags[24] = 0x80;
  ExpectFormatError(flags, "offset 24");
  Bytes zero = good;
  zero[6] = 0;
  ExpectFormatError(zero, "extent");
  ExpectFormatError(Bytes(good.begin(), good.begin() + 20), "offset");
  Bytes extra = good;
  extra.push_back(0);
  ExpectFormatError(extra, "stream table");
  Container c = Minimal();
  c.streams[4] = {1, 2, 3};
  Bytes cut = WriteContainer(c);
  cut.pop_back();
  ExpectFormatError(cut, "stream table");
}

TEST_CASE("bpp uses original extents") {
  CHECK(BitsPerPixel(48, 4, 2) == 48.0);
  CHECK(BitsPerPixel(1000, 768, 512) == doctest::Approx(8000.0 / 393216.0));
}

}  // namespace
}  // namespace scodec
