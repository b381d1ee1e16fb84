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

// End-to-end image encoding and decoding.
//
// Encode: pad -> latent sources -> adapters (l) -> g_a (y) -> h_a (z);
// z is coded with the factorized prior, then the four quadtree groups of y
// are coded in order, each predicted from the hyperprior and the refined
// groups before it. Decode mirrors the entropy path, then runs g_s and the
// auxiliary decoder on y_hat, denoises l_T in one step, adds the auxiliary
// residual and maps the result to pixels.

#ifndef SCODEC_CODEC_H_
#define SCODEC_CODEC_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scodec/container.h"
#include "scodec/diffusion.h"
#include "scodec/entropy_model.h"
#include "scodec/nets.h"
#include "scodec/tensor.h"
#include "scodec/tiling.h"

namespace scodec {

inline constexpr int64_t kPadMultiple = 256;

// Shapes of every latent for an image of the given original extents.
struct LatentShapes {
  Shape padded;  // (1, 3, H', W') with H', W' multiples of 256
  Shape src8;    // primary source, 1/8
  Shape l;       // 1/16
  Shape y;       // 1/64
  Shape z;       // 1/256
  Shape l_t;     // 1/8
};
LatentShapes ComputeLatentShapes(int64_t width, int64_t height,
                                 const TransformConfig& cfg);

// Accumulated wall time per named stage, in first-use order.
class StageTimings {
 public:
  void Add(const std::string& stage, double seconds);
  double Get(const std::string& stage) const;
  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Integer symbols of every stream, flat (n, c, h, w) order per stream.
struct SymbolTap {
  std::vector<int32_t> z;
  std::array<std::vector<int32_t>, kNumGroups> groups;

  bool operator==(const SymbolTap&) const = default;
};

struct EncodeOptions {
  bool color_fix = true;
  int timestep = kDefaultTimestep;
  // Image-pixel tiling of the latent sources. Tiles are cut on a 16-pixel
  // grid, so the symbols do not depend on it.
  TileConfig tiles;
};

struct EncodeResult {
  Bytes bytes;
  Container container;
  RateEstimate estimate;  // ideal-coder bits per stream
  SymbolTap symbols;
  LatentShapes shapes;
  Tensor y_hat;  // refined, as the decoder will see it
  StageTimings timings;
};

// `image` is (1, 3, H, W) in [0, 1].
EncodeResult EncodeImage(const Tensor& image, const CodecNets& nets,
                         const EncodeOptions& options = {});

struct DecodeOptions {
  // nullptr selects the zero predictor.
  const EpsilonPredictor* predictor = nullptr;
  // Image-pixel tiling of the denoise + pixel-decoder stage.
  TileConfig tiles;
  bool apply_color_fix = true;
};

struct DecodeResult {
  Header header;
  Tensor image;      // original extents, color-fixed when requested, [0, 1]
  Tensor unfixed;    // original extents before color fix, clamped to [0, 1]
  SymbolTap symbols;
  Tensor y_hat;
  Tensor l_t;
  StageTimings timings;
};

// Throws kModelMismatch when the container names different weights, kFormat
// on malformed containers and kDecode on corrupt streams.
DecodeResult DecodeImage(std::span<const uint8_t> bytes, const CodecNets& nets,
                         const DecodeOptions& options = {});

}  // namespace scodec

#endif  // SCODEC_CODEC_H_
