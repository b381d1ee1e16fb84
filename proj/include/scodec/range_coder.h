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

#ifndef SCODEC_RANGE_CODER_H_
#define SCODEC_RANGE_CODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "scodec/bytes.h"

namespace scodec {

inline constexpr int kProbBits = 16;
inline constexpr uint32_t kProbTotal = 1u << kProbBits;

// Cumulative frequency table over symbol indices 0..K-1:
// cdf[0] = 0 < cdf[1] < ... < cdf[K] = kProbTotal.
struct CdfTable {
  std::vector<uint32_t> cdf;

  int size() const { return static_cast<int>(cdf.size()) - 1; }
  uint32_t Low(int symbol) const { return cdf[symbol]; }
  uint32_t Frequency(int symbol) const {
    return cdf[symbol + 1] - cdf[symbol];
  }
  // True when the table is strictly increasing from 0 to kProbTotal.
  bool Valid() const;
  // Symbol whose interval contains `value` (< kProbTotal).
  int Find(uint32_t value) const;
};

// Carry-less range coder (Subbotin): 32-bit low and range, byte-wise
// renormalization. Output is exactly what the decoder consumes, so a
// stream decodes only when every byte is present.
class RangeEncoder {
 public:
  void Encode(uint32_t cum_low, uint32_t frequency);
  void Encode(const CdfTable& table, int symbol);
  // Emits the four bytes of `low`; the encoder is spent afterwards.
  Bytes Finish();

  size_t bytes_written() const { return out_.size(); }

 private:
  void Normalize();

  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  Bytes out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> bytes);

  // Cumulative value of the next symbol; call Consume with its interval.
  uint32_t Peek();
  void Consume(uint32_t cum_low, uint32_t frequency);
  int Decode(const CdfTable& table);
  // Throws kDecode when bytes remain unread.
  void ExpectEnd() const;

 private:
  uint8_t NextByte();
  void Normalize();

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  uint32_t low_ = 0;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t step_ = 0;  // range / kProbTotal for the pending symbol
};

// `tables` holds either one table per symbol or a single shared table.
Bytes EncodeStream(std::span<const int> symbols,
                   std::span<const CdfTable> tables);
std::vector<int> DecodeStream(std::span<const uint8_t> bytes,
                              std::span<const CdfTable> tables, size_t count);

}  // namespace scodec

#endif  // SCODEC_RANGE_CODER_H_
