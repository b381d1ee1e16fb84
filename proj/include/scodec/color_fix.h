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

// Quantized per-channel mean/std transfer applied to decoded images.

#ifndef SCODEC_COLOR_FIX_H_
#define SCODEC_COLOR_FIX_H_

#include <array>
#include <cstdint>

#include "scodec/container.h"
#include "scodec/tensor.h"

namespace scodec {

// Channels whose std is at or below this are copied through unchanged.
inline constexpr double kColorStdEpsilon = 1e-6;

struct ColorStats {
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};  // population (1/N) convention
};

// Statistics of a (1, 3, H, W) image, accumulated in double.
ColorStats ComputeColorStats(const Tensor& image);

// floor(v * 65535 + 0.5) for v clamped to [0, 1].
uint16_t QuantizeStat(double v);
double DequantizeStat(uint16_t k);

ColorPayload ToPayload(const ColorStats& stats);
ColorStats FromPayload(const ColorPayload& payload);

// (x - mean_x) / std_x * target.std + target.mean per channel, optionally
// clamped to [0, 1].
Tensor ColorFix(const Tensor& image, const ColorStats& target,
                bool clamp = true);

}  // namespace scodec

#endif  // SCODEC_COLOR_FIX_H_
