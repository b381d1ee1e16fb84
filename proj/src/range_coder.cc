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

#include "scodec/range_coder.h"

#include <algorithm>
#include <string>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr uint32_t kTop = 1u << 24;
constexpr uint32_t kBottom = 1u << 16;

}  // namespace

bool CdfTable::Valid() const {
  if (cdf.size() < 2 || cdf.front() != 0 || cdf.back() != kProbTotal) {
    return false;
  }
  for (size_t i = 1; i < cdf.size(); ++i) {
    if (cdf[i] <= cdf[i - 1]) return false;
  }
  return true;
}

int CdfTable::Find(uint32_t value) const {
  auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), value);
  return static_cast<int>(it - cdf.begin()) - 1;
}

void RangeEncoder::Encode(uint32_t cum_low, uint32_t frequency) {
  if (frequency == 0 || cum_low + frequency > kProbTotal) {
    Fail(ErrorKind::kConfig, "range coder: invalid interval [" +
                                 std::to_string(cum_low) + ", +" +
                                 std::to_string(frequency) + ")");
  }
  const uint32_t step = range_ >> kProbBits;
  low_ += step * cum_low;
  range_ = step * frequency;
  Normalize();
}

void RangeEncoder::Encode(const CdfTable& table, int symbol) {
  if (symbol < 0 || symbol >= table.size()) {
    Fail(ErrorKind::kConfig, "range coder: symbol " + std::to_string(symbol) +
                                 " outside table of size " +
                                 std::to_string(table.size()));
  }
  Encode(table.Low(symbol), table.Frequency(symbol));
}

void RangeEncoder::Normalize() {
  // Shift out settled top bytes; when the interval straddles a byte
  // boundary with too little range left, shrink it to the part below the
  // boundary instead of propagating a carry.
  while (true) {
    if ((low_ ^ (low_ + range_)) < kTop) {
      // top byte settled
    } else if (range_ < kBottom) {
      range_ = (0u - low_) & (kBottom - 1);
    } else {
      break;
    }
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
    range_ <<= 8;
  }
}

Bytes RangeEncoder::Finish() {
  for (int i = 0; i < 4; ++i) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ <<= 8;
  }
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

uint8_t RangeDecoder::NextByte() {
  if (pos_ >= bytes_.size()) {
    Fail(ErrorKind::kDecode, "range decoder: stream truncated after " +
                                 std::to_string(bytes_.size()) + " bytes");
  }
  return bytes_[pos_++];
}

uint32_t RangeDecoder::Peek() {
  step_ = range_ >> kProbBits;
  const uint32_t value = (code_ - low_) / step_;
  if (value >= kProbTotal) {
    Fail(ErrorKind::kDecode, "range decoder: corrupt stream at byte " +
                                 std::to_string(pos_));
  }
  return value;
}

void RangeDecoder::Consume(uint32_t cum_low, uint32_t frequency) {
  low_ += step_ * cum_low;
  range_ = step_ * frequency;
  Normalize();
}

int RangeDecoder::Decode(const CdfTable& table) {
  const int symbol = table.Find(Peek());
  Consume(table.Low(symbol), table.Frequency(symbol));
  return symbol;
}

void RangeDecoder::Normalize() {
  while (true) {
    if ((low_ ^ (low_ + range_)) < kTop) {
    } else if (range_ < kBottom) {
      range_ = (0u - low_) & (kBottom - 1);
    } else {
      break;
    }
    code_ = (code_ << 8) | NextByte();
    low_ <<= 8;
    range_ <<= 8;
  }
}

void RangeDecoder::ExpectEnd() const {
  if (pos_ != bytes_.size()) {
    Fail(ErrorKind::kDecode, "range decoder: " +
                                 std::to_string(bytes_.size() - pos_) +
                                 " unread trailing bytes");
  }
}

namespace {

const CdfTable& TableFor(std::span<const CdfTable> tables, size_t i,
                         size_t count) {
  if (tables.size() == 1) return tables[0];
  if (tables.size() != count) {
    Fail(ErrorKind::kConfig, "range coder: " + std::to_string(tables.size()) +
                                 " tables for " + std::to_string(count) +
                                 " symbols");
  }
  return tables[i];
}

}  // namespace

Bytes EncodeStream(std::span<const int> symbols,
                   std::span<const CdfTable> tables) {
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) {
    enc.Encode(TableFor(tables, i, symbols.size()), symbols[i]);
  }
  return enc.Finish();
}

std::vector<int> DecodeStream(std::span<const uint8_t> bytes,
                              std::span<const CdfTable> tables, size_t count) {
  RangeDecoder dec(bytes);
  std::vector<int> out(count);
  for (size_t i = 0; i < count; ++i) {
    out[i] = dec.Decode(TableFor(tables, i, count));
  }
  dec.ExpectEnd();
  return out;
}

}  // namespace scodec
