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

// Little-endian byte serialization helpers shared by the file formats.

#ifndef SCODEC_BYTES_H_
#define SCODEC_BYTES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scodec {

using Bytes = std::vector<uint8_t>;

class ByteWriter {
 public:
  void U8(uint8_t v) { buf_.push_back(v); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void F32(float v);
  void Raw(std::span<const uint8_t> bytes);
  void Raw(std::string_view bytes);

  const Bytes& bytes() const { return buf_; }
  Bytes Take() { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

 private:
  Bytes buf_;
};

// Bounds-checked reader. Every failure is a kFormat error carrying the byte
// offset and the label of the field being read.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint8_t U8(const char* what);
  uint16_t U16(const char* what);
  uint32_t U32(const char* what);
  float F32(const char* what);
  std::span<const uint8_t> Raw(size_t count, const char* what);
  std::string String(size_t count, const char* what);

  size_t offset() const { return offset_; }
  size_t remaining() const { return bytes_.size() - offset_; }

 private:
  void Need(size_t count, const char* what) const;

  std::span<const uint8_t> bytes_;
  size_t offset_ = 0;
};

Bytes ReadFileBytes(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);

std::array<uint8_t, 32> Sha256(std::span<const uint8_t> bytes);
std::string HexString(std::span<const uint8_t> bytes);

}  // namespace scodec

#endif  // SCODEC_BYTES_H_
