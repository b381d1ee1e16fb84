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

#include "scodec/tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "scodec/error.h"
#include "scodec/parallel.h"

namespace scodec {

std::string Shape::ToString() const {
  std::ostringstream os;
  os << "(" << n << "," << c << "," << h << "," << w << ")";
  return os.str();
}

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    Fail(ErrorKind::kConfig, "negative tensor extent " + shape.ToString());
  }
  data_.assign(static_cast<size_t>(shape.elements()), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  if (static_cast<int64_t>(data_.size()) != shape.elements()) {
    Fail(ErrorKind::kConfig, "tensor data length " +
                                 std::to_string(data_.size()) +
                                 " does not match shape " + shape.ToString());
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

bool Tensor::BitEqual(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(),
                      data_.size() * sizeof(float)) == 0);
}

void ConvSpec::Validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) Fail(ErrorKind::kConfig, "conv spec: " + what);
  };
  need(in_channels > 0, "in_channels must be positive");
  need(out_channels > 0, "out_channels must be positive");
  need(kernel_h > 0 && kernel_w > 0, "kernel extents must be positive");
  need(stride > 0, "stride must be positive");
  need(padding >= 0, "padding must be non-negative");
  need(padding_w >= -1, "padding_w must be non-negative (or -1)");
  need(groups > 0 && in_channels % groups == 0 && out_channels % groups == 0,
       "groups must divide in_channels and out_channels");
}

Tensor Conv2d(const Tensor& input, const Tensor& weights,
              std::span<const float> bias, const ConvSpec& spec) {
  spec.Validate();
  if (input.c() != spec.in_channels) {
    Fail(ErrorKind::kConfig, "conv2d: input channels " +
                                 std::to_string(input.c()) + " != expected " +
                                 std::to_string(spec.in_channels));
  }
  if (!(weights.shape() == spec.WeightShape())) {
    Fail(ErrorKind::kConfig, "conv2d: weight shape " +
                                 weights.shape().ToString() + " != expected " +
                                 spec.WeightShape().ToString());
  }
  if (!bias.empty() && static_cast<int64_t>(bias.size()) != spec.out_channels) {
    Fail(ErrorKind::kConfig, "conv2d: bias length " +
                                 std::to_string(bias.size()) +
                                 " != out_channels " +
                                 std::to_string(spec.out_channels));
  }
  const int64_t out_h = spec.OutputHeight(input.h());
  const int64_t out_w = spec.OutputWidth(input.w());
  if (out_h < 1 || out_w < 1) {
    Fail(ErrorKind::kConfig, "conv2d: output extent < 1 for input " +
                                 input.shape().ToString());
  }
  Tensor out({input.n(), spec.out_channels, out_h, out_w});
  const int64_t in_per_group = spec.in_channels / spec.groups;
  const int64_t out_per_group = spec.out_channels / spec.groups;
  const int64_t in_h = input.h();
  const int64_t in_w = input.w();
  const int64_t stride = spec.stride;
  const int64_t pad = spec.padding;
  const int64_t pad_w = spec.PadW();

  ParallelFor(0, input.n() * spec.out_channels, [&](int64_t job) {
    const int64_t n = job / spec.out_channels;
    const int64_t oc = job % spec.out_channels;
    const int64_t group = oc / out_per_group;
    float* dst = out.Plane(n, oc).data();
    std::fill(dst, dst + out_h * out_w, bias.empty() ? 0.0f : bias[oc]);
    for (int64_t icg = 0; icg < in_per_group; ++icg) {
      const int64_t ic = group * in_per_group + icg;
      const float* src = input.Plane(n, ic).data();
      for (int64_t ky = 0; ky < spec.kernel_h; ++ky) {
        for (int64_t kx = 0; kx < spec.kernel_w; ++kx) {
          const float wv = weights.at(oc, icg, ky, kx);
          // Output columns whose input column lies inside the image.
          int64_t ox_lo = 0;
          while (ox_lo < out_w && ox_lo * stride - pad_w + kx < 0) ++ox_lo;
          int64_t ox_hi = out_w;
          while (ox_hi > ox_lo && (ox_hi - 1) * stride - pad_w + kx >= in_w) {
            --ox_hi;
          }
          for (int64_t oy = 0; oy < out_h; ++oy) {
            const int64_t iy = oy * stride - pad + ky;
            if (iy < 0 || iy >= in_h) continue;
            float* drow = dst + oy * out_w;
            const float* srow = src + iy * in_w - pad_w + kx;
            if (stride == 1) {
              for (int64_t ox = ox_lo; ox < ox_hi; ++ox) {
                drow[ox] += wv * srow[ox];
              }
            } else {
              for (int64_t ox = ox_lo; ox < ox_hi; ++ox) {
                drow[ox] += wv * srow[ox * stride];
              }
            }
          }
        }
      }
    }
  });
  return out;
}

Tensor PixelUnshuffle(const Tensor& input, int64_t r) {
  if (r < 1) Fail(ErrorKind::kConfig, "pixel_unshuffle: factor must be >= 1");
  if (input.h() % r != 0 || input.w() % r != 0) {
    Fail(ErrorKind::kConfig, "pixel_unshuffle: extents " +
                                 input.shape().ToString() +
                                 " not divisible by " + std::to_string(r));
  }
  const int64_t oh = input.h() / r;
  const int64_t ow = input.w() / r;
  Tensor out({input.n(), input.c() * r * r, oh, ow});
  for (int64_t n = 0; n < input.n(); ++n) {
    for (int64_t c = 0; c < input.c(); ++c) {
      for (int64_t dy = 0; dy < r; ++dy) {
        for (int64_t dx = 0; dx < r; ++dx) {
          const int64_t oc = c * r * r + dy * r + dx;
          for (int64_t y = 0; y < oh; ++y) {
            for (int64_t x = 0; x < ow; ++x) {
              out.at(n, oc, y, x) = input.at(n, c, y * r + dy, x * r + dx);
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor PixelShuffle(const Tensor& input, int64_t r) {
  if (r < 1) Fail(ErrorKind::kConfig, "pixel_shuffle: factor must be >= 1");
  if (input.c() % (r * r) != 0) {
    Fail(ErrorKind::kConfig, "pixel_shuffle: channels " +
                                 std::to_string(input.c()) +
                                 " not divisible by " + std::to_string(r * r));
  }
  const int64_t oc_count = input.c() / (r * r);
  Tensor out({input.n(), oc_count, input.h() * r, input.w() * r});
  for (int64_t n = 0; n < input.n(); ++n) {
    for (int64_t c = 0; c < oc_count; ++c) {
      for (int64_t dy = 0; dy < r; ++dy) {
        for (int64_t dx = 0; dx < r; ++dx) {
          const int64_t ic = c * r * r + dy * r + dx;
          for (int64_t y = 0; y < input.h(); ++y) {
            for (int64_t x = 0; x < input.w(); ++x) {
              out.at(n, c, y * r + dy, x * r + dx) = input.at(n, ic, y, x);
            }
          }
        }
      }
    }
  }
  return out;
}

Activation ParseActivation(const std::string& name) {
  if (name == "gelu-tanh") return Activation::kGeluTanh;
  if (name == "silu") return Activation::kSilu;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  Fail(ErrorKind::kConfig, "unknown activation '" + name + "'");
}

float Activate(float x, Activation kind) {
  switch (kind) {
    case Activation::kGeluTanh: {
      constexpr float kSqrt2OverPi = 0.7978845608028654f;
      return 0.5f * x * (1.0f + std::tanh(kSqrt2OverPi *
                                          (x + 0.044715f * x * x * x)));
    }
    case Activation::kSilu:
      return x / (1.0f + std::exp(-x));
    case Activation::kRelu:
      return x > 0.0f ? x : 0.0f;
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kSigmoid:
      return 1.0f / (1.0f + std::exp(-x));
  }
  return x;
}

void ApplyInPlace(Tensor& t, Activation kind) {
  for (float& v : t.span()) v = Activate(v, kind);
}

Tensor Apply(const Tensor& input, Activation kind) {
  Tensor out = input;
  ApplyInPlace(out, kind);
  return out;
}

Tensor ConcatChannels(const Tensor& a, const Tensor& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    Fail(ErrorKind::kConfig, "concat: incompatible shapes " +
                                 a.shape().ToString() + " and " +
                                 b.shape().ToString());
  }
  Tensor out({a.n(), a.c() + b.c(), a.h(), a.w()});
  const size_t plane = static_cast<size_t>(a.h() * a.w());
  for (int64_t n = 0; n < a.n(); ++n) {
    float* dst = out.Plane(n, 0).data();
    std::copy_n(a.Plane(n, 0).data(), plane * a.c(), dst);
    if (b.c() > 0) {
      std::copy_n(b.Plane(n, 0).data(), plane * b.c(), dst + plane * a.c());
    }
  }
  return out;
}

Tensor SliceChannels(const Tensor& t, int64_t begin, int64_t count) {
  if (begin < 0 || count < 0 || begin + count > t.c()) {
    Fail(ErrorKind::kConfig, "slice: channels [" + std::to_string(begin) +
                                 ", " + std::to_string(begin + count) +
                                 ") out of range for " + t.shape().ToString());
  }
  Tensor out({t.n(), count, t.h(), t.w()});
  const size_t plane = static_cast<size_t>(t.h() * t.w());
  for (int64_t n = 0; n < t.n(); ++n) {
    if (count == 0) continue;
    std::copy_n(t.Plane(n, begin).data(), plane * count,
                out.Plane(n, 0).data());
  }
  return out;
}

void AddInPlace(Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) {
    Fail(ErrorKind::kConfig, "add: shape " + a.shape().ToString() +
                                 " != " + b.shape().ToString());
  }
  float* dst = a.data();
  const float* src = b.data();
  for (size_t i = 0; i < a.size(); ++i) dst[i] += src[i];
}

Tensor Crop(const Tensor& t, int64_t y0, int64_t x0, int64_t h, int64_t w) {
  if (y0 < 0 || x0 < 0 || h < 0 || w < 0 || y0 + h > t.h() ||
      x0 + w > t.w()) {
    Fail(ErrorKind::kConfig, "crop window out of range for " +
                                 t.shape().ToString());
  }
  Tensor out({t.n(), t.c(), h, w});
  for (int64_t n = 0; n < t.n(); ++n) {
    for (int64_t c = 0; c < t.c(); ++c) {
      for (int64_t y = 0; y < h; ++y) {
        std::copy_n(&t.data()[t.Index(n, c, y0 + y, x0)], w,
                    &out.at(n, c, y, 0));
      }
    }
  }
  return out;
}

}  // namespace scodec
