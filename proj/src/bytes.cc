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

#include "scodec/bytes.h"

#include <openssl/sha.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "scodec/error.h"

namespace scodec {

void ByteWriter::U16(uint16_t v) {
  buf_.push_back(static_cast<uint8_t>(v));
  buf_.push_back(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::U32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::F32(float v) { U32(std::bit_cast<uint32_t>(v)); }

void ByteWriter::Raw(std::span<const uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::Raw(std::string_view bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteReader::Need(size_t count, const char* what) const {
  if (count > remaining()) {
    Fail(ErrorKind::kFormat, std::string("truncated while reading ") + what +
                                 " at offset " + std::to_string(offset_) +
                                 " (need " + std::to_string(count) +
                                 " bytes, have " +
                                 std::to_string(remaining()) + ")");
  }
}

uint8_t ByteReader::U8(const char* what) {
  Need(1, what);
  return bytes_[offset_++];
}

uint16_t ByteReader::U16(const char* what) {
  Need(2, what);
  uint16_t v = static_cast<uint16_t>(bytes_[offset_] |
                                     (bytes_[offset_ + 1] << 8));
  offset_ += 2;
  return v;
}

uint32_t ByteReader::U32(const char* what) {
  Need(4, what);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(bytes_[offset_ + i]) << (8 * i);
  }
  offset_ += 4;
  return v;
}

float ByteReader::F32(const char* what) {
  return std::bit_cast<float>(U32(what));
}

std::span<const uint8_t> ByteReader::Raw(size_t count, const char* what) {
  Need(count, what);
  auto out = bytes_.subspan(offset_, count);
  offset_ += count;
  return out;
}

std::string ByteReader::String(size_t count, const char* what) {
  auto raw = Raw(count, what);
  return std::string(raw.begin(), raw.end());
}

Bytes ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)),
              std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "failed reading '" + path.string() + "'");
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot create '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorKind::kIo, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    Fail(ErrorKind::kIo, "cannot rename into '" + path.string() +
                             "': " + ec.message());
  }
}

std::array<uint8_t, 32> Sha256(std::span<const uint8_t> bytes) {
  std::array<uint8_t, 32> digest{};
  SHA256(bytes.data(), bytes.size(), digest.data());
  return digest;
}

std::string HexString(std::span<const uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

}  // namespace scodec
