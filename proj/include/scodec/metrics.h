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

#ifndef SCODEC_METRICS_H_
#define SCODEC_METRICS_H_

#include <array>
#include <vector>

#include "scodec/tensor.h"

namespace scodec {

// 10 * log10(1 / MSE) over all channels jointly; +infinity when identical.
double Psnr(const Tensor& a, const Tensor& b);

inline constexpr int kMsSsimScales = 5;
inline constexpr std::array<double, kMsSsimScales> kMsSsimWeights = {
    0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr int64_t kMsSsimMinExtent = 160;

// Five-scale MS-SSIM for images in [0, 1], averaged over channels. Each
// scale filters in valid mode with an 11x11 Gaussian (sigma 1.5); at scales
// narrower than the window the window is cut to the largest odd size that
// fits and renormalized. Scales are separated by 2x2 average pooling.
// Throws kConfig when either extent is below kMsSsimMinExtent.
double MsSsim(const Tensor& a, const Tensor& b);

struct RatePoint {
  double bpp = 0.0;
  double quality = 0.0;
};
using Curve = std::vector<RatePoint>;

// Bjontegaard delta rate in percent: cubic least-squares fits of log10(bpp)
// over quality, averaged over the shared quality interval. Positive means
// `test` needs more bits than `anchor` for equal quality.
double BdRate(const Curve& anchor, const Curve& test);

}  // namespace scodec

#endif  // SCODEC_METRICS_H_
