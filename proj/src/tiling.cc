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

#include "scodec/tiling.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "scodec/error.h"

namespace scodec {
namespace {

int64_t AlignDown(int64_t v, int64_t align) { return v / align * align; }

// Weight profile of one tile along one axis, in output pixels.
std::vector<double> AxisWeights(int64_t length, double sigma, int64_t zero_lo,
                                int64_t zero_hi) {
  std::vector<double> w(static_cast<size_t>(length));
  const double center = 0.5 * static_cast<double>(length - 1);
  for (int64_t i = 0; i < length; ++i) {
    if (i < zero_lo || i >= length - zero_hi) {
      w[i] = 0.0;
      continue;
    }
    const double d = (static_cast<double>(i) - center) / sigma;
    w[i] = std::exp(-0.5 * d * d);
  }
  return w;
}

// Output-pixel ownership boundaries for crop blending: tile k owns
// [bounds[k], bounds[k + 1]).
std::vector<int64_t> CropBounds(const std::vector<TileSpan>& spans,
                                int64_t extent, int64_t align) {
  std::vector<int64_t> bounds(spans.size() + 1);
  bounds.front() = 0;
  bounds.back() = extent;
  for (size_t k = 1; k < spans.size(); ++k) {
    const int64_t prev_end = spans[k - 1].start + spans[k - 1].length;
    const int64_t overlap = prev_end - spans[k].start;
    bounds[k] = spans[k].start + AlignDown(overlap / 2, align);
  }
  return bounds;
}

}  // namespace

void TileConfig::Validate() const {
  if (size < 0 || overlap < 0) {
    Fail(ErrorKind::kConfig, "tile size and overlap must be non-negative");
  }
  if (!enabled()) return;
  if (overlap >= size) {
    Fail(ErrorKind::kConfig, "tile overlap " + std::to_string(overlap) +
                                 " must be smaller than tile size " +
                                 std::to_string(size));
  }
  if (sigma < 0.0) Fail(ErrorKind::kConfig, "tile sigma must be >= 0");
}

TileConfig TileConfig::Scaled(int64_t factor) const {
  TileConfig out = *this;
  out.size = size / factor;
  out.overlap = overlap / factor;
  out.sigma = sigma / static_cast<double>(factor);
  return out;
}

std::vector<TileSpan> TileSpans(int64_t extent, const TileConfig& cfg,
                                int64_t align) {
  if (!cfg.enabled() || extent <= cfg.size) return {{0, extent}};
  const int64_t stride = std::max<int64_t>(
      align, AlignDown(cfg.size - cfg.overlap, align));
  const int64_t last = AlignDown(extent - cfg.size, align);
  std::vector<TileSpan> spans;
  for (int64_t s = 0;; s += stride) {
    const int64_t start = std::min(s, last);
    if (!spans.empty() && start <= spans.back().start) break;
    spans.push_back({start, std::min(cfg.size, extent - start)});
    if (start == last) break;
  }
  // A final tile that does not reach the edge (unaligned extents) is widened.
  TileSpan& tail = spans.back();
  tail.length = extent - tail.start;
  return spans;
}

Tensor TileProcess(const Tensor& input, const TileConfig& cfg,
                   const TileOptions& opt, const TileFunction& fn) {
  cfg.Validate();
  if (opt.upscale < 1 || opt.downscale < 1 ||
      (opt.upscale != 1 && opt.downscale != 1)) {
    Fail(ErrorKind::kConfig, "tile scale factors must be >= 1, one of them 1");
  }
  const int64_t align = std::max(opt.align, opt.downscale);
  if (cfg.enabled() && cfg.size % align != 0) {
    Fail(ErrorKind::kConfig, "tile size " + std::to_string(cfg.size) +
                                 " is not a multiple of the alignment " +
                                 std::to_string(align));
  }
  const std::vector<TileSpan> ys = TileSpans(input.h(), cfg, align);
  const std::vector<TileSpan> xs = TileSpans(input.w(), cfg, align);
  if (ys.size() == 1 && xs.size() == 1) return fn(input);

  auto to_out = [&](int64_t v) { return v * opt.upscale / opt.downscale; };
  const int64_t out_h = to_out(input.h());
  const int64_t out_w = to_out(input.w());

  Tensor out;
  if (opt.blend == TileBlend::kCrop) {
    const std::vector<int64_t> by = CropBounds(ys, input.h(), align);
    const std::vector<int64_t> bx = CropBounds(xs, input.w(), align);
    for (size_t ty = 0; ty < ys.size(); ++ty) {
      for (size_t tx = 0; tx < xs.size(); ++tx) {
        const Tensor tile = fn(Crop(input, ys[ty].start, xs[tx].start,
                                    ys[ty].length, xs[tx].length));
        if (out.empty()) out = Tensor({tile.n(), tile.c(), out_h, out_w});
        const int64_t oy0 = to_out(ys[ty].start);
        const int64_t ox0 = to_out(xs[tx].start);
        for (int64_t n = 0; n < tile.n(); ++n) {
          for (int64_t c = 0; c < tile.c(); ++c) {
            for (int64_t y = to_out(by[ty]); y < to_out(by[ty + 1]); ++y) {
              const float* src = tile.data() + tile.Index(n, c, y - oy0, 0);
              float* dst = &out.at(n, c, y, 0);
              for (int64_t x = to_out(bx[tx]); x < to_out(bx[tx + 1]); ++x) {
                dst[x] = src[x - ox0];
              }
            }
          }
        }
      }
    }
    return out;
  }

  const double sigma =
      (cfg.sigma > 0.0 ? cfg.sigma : static_cast<double>(cfg.size) / 4.0) *
      static_cast<double>(opt.upscale) / static_cast<double>(opt.downscale);
  const int64_t zone =
      opt.margin > 0.0
          ? static_cast<int64_t>(std::ceil(
                (opt.margin + 1.0) * static_cast<double>(opt.upscale) /
                static_cast<double>(opt.downscale)))
          : 0;
  auto axis = [&](const TileSpan& s, int64_t extent) {
    const bool lo_edge = s.start == 0;
    const bool hi_edge = s.start + s.length == extent;
    return AxisWeights(to_out(s.length), sigma, lo_edge ? 0 : zone,
                       hi_edge ? 0 : zone);
  };

  std::vector<double> acc;
  std::vector<double> weight(static_cast<size_t>(out_h * out_w), 0.0);
  int64_t out_n = 0, out_c = 0;
  // Tiles are accumulated in raster order so the sum is reproducible.
  for (const TileSpan& sy : ys) {
    const std::vector<double> wy = axis(sy, input.h());
    for (const TileSpan& sx : xs) {
      const std::vector<double> wx = axis(sx, input.w());
      const Tensor tile =
          fn(Crop(input, sy.start, sx.start, sy.length, sx.length));
      if (tile.h() != to_out(sy.length) || tile.w() != to_out(sx.length)) {
        Fail(ErrorKind::kConfig, "tile function returned " +
                                     tile.shape().ToString() +
                                     ", inconsistent with the tile scale");
      }
      if (acc.empty()) {
        out_n = tile.n();
        out_c = tile.c();
        acc.assign(static_cast<size_t>(out_n * out_c * out_h * out_w), 0.0);
      }
      const int64_t oy0 = to_out(sy.start);
      const int64_t ox0 = to_out(sx.start);
      for (int64_t y = 0; y < tile.h(); ++y) {
        for (int64_t x = 0; x < tile.w(); ++x) {
          const double w = wy[y] * wx[x];
          if (w == 0.0) continue;
          const size_t pix = static_cast<size_t>((oy0 + y) * out_w + ox0 + x);
          weight[pix] += w;
          for (int64_t n = 0; n < out_n; ++n) {
            for (int64_t c = 0; c < out_c; ++c) {
              acc[static_cast<size_t>((n * out_c + c) * out_h * out_w) + pix] +=
                  w * tile.at(n, c, y, x);
            }
          }
        }
      }
    }
  }
  for (size_t pix = 0; pix < weight.size(); ++pix) {
    if (!(weight[pix] > 0.0)) {
      Fail(ErrorKind::kConfig,
           "tile weights vanish at output pixel (" +
               std::to_string(pix / out_w) + ", " +
               std::to_string(pix % out_w) +
               "); increase the overlap relative to the function margin");
    }
  }
  out = Tensor({out_n, out_c, out_h, out_w});
  const size_t plane = weight.size();
  for (size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = static_cast<float>(acc[i] / weight[i % plane]);
  }
  return out;
}

}  // namespace scodec
