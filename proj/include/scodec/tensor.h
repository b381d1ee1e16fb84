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

#ifndef SCODEC_TENSOR_H_
#define SCODEC_TENSOR_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scodec {

// Extents of a dense (batch, channel, height, width) array.
struct Shape {
  int64_t n = 0;
  int64_t c = 0;
  int64_t h = 0;
  int64_t w = 0;

  int64_t elements() const { return n * c * h * w; }
  bool operator==(const Shape&) const = default;
  std::string ToString() const;
};

// Dense 4-D float32 tensor, row-major in (n, c, h, w) order.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  int64_t n() const { return shape_.n; }
  int64_t c() const { return shape_.c; }
  int64_t h() const { return shape_.h; }
  int64_t w() const { return shape_.w; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::span<float> span() { return data_; }
  std::span<const float> span() const { return data_; }

  size_t Index(int64_t n, int64_t c, int64_t y, int64_t x) const {
    return static_cast<size_t>(((n * shape_.c + c) * shape_.h + y) * shape_.w +
                               x);
  }
  float& at(int64_t n, int64_t c, int64_t y, int64_t x) {
    return data_[Index(n, c, y, x)];
  }
  float at(int64_t n, int64_t c, int64_t y, int64_t x) const {
    return data_[Index(n, c, y, x)];
  }

  // One (h, w) plane.
  std::span<float> Plane(int64_t n, int64_t c) {
    return std::span<float>(data_).subspan(Index(n, c, 0, 0),
                                           static_cast<size_t>(h() * w()));
  }
  std::span<const float> Plane(int64_t n, int64_t c) const {
    return std::span<const float>(data_).subspan(
        Index(n, c, 0, 0), static_cast<size_t>(h() * w()));
  }

  bool AllFinite() const;
  bool BitEqual(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<float> data_;
};

struct ConvSpec {
  int64_t in_channels = 1;
  int64_t out_channels = 1;
  int64_t kernel_h = 1;
  int64_t kernel_w = 1;
  int64_t stride = 1;
  int64_t padding = 0;
  int64_t groups = 1;
  // Horizontal padding when it differs from `padding` (1xk kernels).
  int64_t padding_w = -1;

  int64_t PadW() const { return padding_w < 0 ? padding : padding_w; }
  // Shape the weight tensor must have: (out, in / groups, kh, kw).
  Shape WeightShape() const {
    return {out_channels, in_channels / groups, kernel_h, kernel_w};
  }
  int64_t OutputHeight(int64_t in) const {
    return (in + 2 * padding - kernel_h) / stride + 1;
  }
  int64_t OutputWidth(int64_t in) const {
    return (in + 2 * PadW() - kernel_w) / stride + 1;
  }
  void Validate() const;
};

// Direct zero-padded convolution. Every output element is accumulated as
// bias + sum over (input channel, kernel row, kernel column) in ascending
// order, in float32. The bias may be empty (no bias) or hold out_channels
// values.
Tensor Conv2d(const Tensor& input, const Tensor& weights,
              std::span<const float> bias, const ConvSpec& spec);

// Space-to-depth: (n, c, h, w) -> (n, c*r*r, h/r, w/r). Output channel
// c*r*r + dy*r + dx holds input pixel (y*r + dy, x*r + dx).
Tensor PixelUnshuffle(const Tensor& input, int64_t r);
// Exact inverse of PixelUnshuffle.
Tensor PixelShuffle(const Tensor& input, int64_t r);

enum class Activation { kGeluTanh, kSilu, kRelu, kTanh, kSigmoid };

Activation ParseActivation(const std::string& name);
float Activate(float x, Activation kind);
Tensor Apply(const Tensor& input, Activation kind);
void ApplyInPlace(Tensor& t, Activation kind);

Tensor ConcatChannels(const Tensor& a, const Tensor& b);
Tensor SliceChannels(const Tensor& t, int64_t begin, int64_t count);
// a += b, shapes must match.
void AddInPlace(Tensor& a, const Tensor& b);
Tensor Crop(const Tensor& t, int64_t y0, int64_t x0, int64_t h, int64_t w);

}  // namespace scodec

#endif  // SCODEC_TENSOR_H_
