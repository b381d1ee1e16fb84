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

// Overlapping-tile evaluation of spatially local functions.

#ifndef SCODEC_TILING_H_
#define SCODEC_TILING_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "scodec/tensor.h"

namespace scodec {

// Tile geometry in pixels of the tensor handed to TileProcess. size == 0
// disables tiling.
struct TileConfig {
  int64_t size = 0;
  int64_t overlap = 0;
  // Standard deviation of the Gaussian weight map; 0 means size / 4.
  double sigma = 0.0;

  bool enabled() const { return size > 0; }
  void Validate() const;
  // Same geometry measured at a resolution `factor` times coarser.
  TileConfig Scaled(int64_t factor) const;
};

enum class TileBlend {
  // Gaussian-weighted average of every covering tile.
  kGaussian,
  // Each output pixel is copied from exactly one tile, split midway through
  // each overlap on the alignment grid.
  kCrop,
};

struct TileOptions {
  TileBlend blend = TileBlend::kGaussian;
  // Output pixels per input pixel (e.g. 8 for a 1/8 -> 1/1 decoder). Tile
  // extents in the output are the input extents times this factor.
  int64_t upscale = 1;
  // Input pixels per output pixel, for downsampling functions. Exactly one
  // of upscale and downscale may differ from 1.
  int64_t downscale = 1;
  // Tile starts are placed on multiples of this many input pixels.
  int64_t align = 1;
  // kGaussian: receptive half-width of the function in input pixels. Output
  // pixels this close to a tile edge that is not an image edge get zero
  // weight, which requires overlap >= 2 * (margin + 1).
  double margin = 0.0;
};

// One axis of a tile grid: [start, start + length) ranges in input pixels.
struct TileSpan {
  int64_t start = 0;
  int64_t length = 0;
};
std::vector<TileSpan> TileSpans(int64_t extent, const TileConfig& cfg,
                                int64_t align);

using TileFunction = std::function<Tensor(const Tensor&)>;

// Splits `input` spatially into tiles, applies `fn` to each and blends the
// results. `fn` must map a (n, c, h, w) tile to (n, c', h*up/down, w*up/down).
// With tiling disabled this is fn(input).
Tensor TileProcess(const Tensor& input, const TileConfig& cfg,
                   const TileOptions& options, const TileFunction& fn);

}  // namespace scodec

#endif  // SCODEC_TILING_H_
