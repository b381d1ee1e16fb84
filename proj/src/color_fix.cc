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

#include "scodec/color_fix.h"

#include <algorithm>
#include <cmath>

#include "scodec/error.h"

namespace scodec {

ColorStats ComputeColorStats(const Tensor& image) {
  if (image.n() != 1 || image.c() != 3 || image.h() * image.w() == 0) {
    Fail(ErrorKind::kConfig, "color statistics need a non-empty (1, 3, H, W) "
                             "image, got " + image.shape().ToString());
  }
  ColorStats stats;
  const double count = static_cast<double>(image.h() * image.w());
  for (int c = 0; c < 3; ++c) {
    const auto plane = image.Plane(0, c);
    double sum = 0.0;
    for (float v : plane) sum += v;
    const double mean = sum / count;
    double sq = 0.0;
    for (float v : plane) sq += (v - mean) * (v - mean);
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(sq / count);
  }
  return stats;
}

uint16_t QuantizeStat(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint16_t>(std::floor(c * 65535.0 + 0.5));
}

double DequantizeStat(uint16_t k) { return k / 65535.0; }

ColorPayload ToPayload(const ColorStats& stats) {
  ColorPayload p;
  for (int c = 0; c < 3; ++c) {
    p.mean[c] = QuantizeStat(stats.mean[c]);
    p.stddev[c] = QuantizeStat(stats.stddev[c]);
  }
  return p;
}

ColorStats FromPayload(const ColorPayload& payload) {
  ColorStats s;
  for (int c = 0; c < 3; ++c) {
    s.mean[c] = DequantizeStat(payload.mean[c]);
    s.stddev[c] = DequantizeStat(payload.stddev[c]);
  }
  return s;
}

Tensor ColorFix(const Tensor& image, const ColorStats& target, bool clamp) {
  const ColorStats own = ComputeColorStats(image);
  Tensor out = image;
  for (int c = 0; c < 3; ++c) {
    auto plane = out.Plane(0, c);
    if (own.stddev[c] > kColorStdEpsilon) {
      const double gain = target.stddev[c] / own.stddev[c];
      for (float& v : plane) {
        v = static_cast<float>((v - own.mean[c]) * gain + target.mean[c]);
      }
    }
    if (clamp) {
      for (float& v : plane) v = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return out;
}

}  // namespace scodec
