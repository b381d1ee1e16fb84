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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scodec/error.h"
#include "scodec/tensor.h"
#include "test_util.h"

namespace scodec {
namespace {

using testing::RandomTensor;

// Six nested loops, accumulated in double.
Tensor NaiveConv(const Tensor& in, const Tensor& w, const std::vector<float>& b,
                 const ConvSpec& s) {
  const int64_t oh = s.OutputHeight(in.h()), ow = s.OutputWidth(in.w());
  Tensor out({in.n(), s.out_channels, oh, ow});
  const int64_t icg = s.in_channels / s.groups, ocg = s.out_channels / s.groups;
  for (int64_t n = 0; n < in.n(); ++n)
    for (int64_t oc = 0; oc < s.out_channels; ++oc)
      for (int64_t y = 0; y < oh; ++y)
        for (int64_t x = 0; x < ow; ++x) {
          double acc = b.empty() ? 0.0 : b[oc];
          const int64_t g = oc / ocg;
          for (int64_t ic = 0; ic < icg; ++ic)
            for (int64_t ky = 0; ky < s.kernel_h; ++ky)
              for (int64_t kx = 0; kx < s.kernel_w; ++kx) {
                const int64_t iy = y * s.stride + ky - s.padding;
                const int64_t ix = x * s.stride + kx - s.PadW();
                if (iy < 0 || ix < 0 || iy >= in.h() || ix >= in.w()) continue;
                acc += static_cast<double>(w.at(oc, ic, ky, kx)) *
                       in.at(n, g * icg + ic, iy, ix);
              }
          out.at(n, oc, y, x) = static_cast<float>(acc);
        }
  return out;
}

float MaxAbsDiff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  float m = 0.0f;
  for (size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

TEST_CASE("conv2d: scaling kernel") {
  ConvSpec s;
  const Tensor out = Conv2d(Tensor({1, 1, 3, 3}, 1.0f),
                            Tensor({1, 1, 1, 1}, 2.0f), {}, s);
  CHECK(out.shape() == Shape{1, 1, 3, 3});
  for (float v : out.span()) CHECK(v == 2.0f);
}

TEST_CASE("conv2d: identity kernel with padding") {
  ConvSpec s;
  s.kernel_h = s.kernel_w = 3;
  s.padding = 1;
  Tensor k({1, 1, 3, 3});
  k.at(0, 0, 1, 1) = 1.0f;
  const Tensor in = RandomTensor({1, 1, 4, 4}, 3);
  CHECK(Conv2d(in, k, {}, s).BitEqual(in));
}

TEST_CASE("conv2d: matches a naive loop oracle") {
  for (int trial = 0; trial < 4; ++trial) {
    ConvSpec s;
    s.in_channels = 4;
    s.out_channels = 8;
    s.kernel_h = s.kernel_w = 3;
    s.stride = 1 + trial % 2;
    s.padding = trial % 3 == 0 ? 0 : 1;
    s.groups = trial == 3 ? 2 : 1;
    const Tensor in = RandomTensor({1, 4, 8, 8}, 10 + trial);
    const Tensor w = RandomTensor(s.WeightShape(), 20 + trial);
    const Tensor bt = RandomTensor({1, 1, 1, 8}, 30 + trial);
    std::vector<float> b(bt.span().begin(), bt.span().end());
    const Tensor got = Conv2d(in, w, b, s);
    CHECK(MaxAbsDiff(got, NaiveConv(in, w, b, s)) <= 1e-5f);
  }
}

TEST_CASE("conv2d: band kernels with asymmetric padding") {
  ConvSpec s;
  s.in_channels = s.out_channels = s.groups = 3;
  s.kernel_h = 1;
  s.kernel_w = 5;
  s.padding = 0;
  s.padding_w = 2;
  const Tensor in = RandomTensor({1, 3, 6, 7}, 4);
  const Tensor w = RandomTensor(s.WeightShape(), 5);
  const Tensor got = Conv2d(in, w, {}, s);
  CHECK(got.shape() == in.shape());
  CHECK(MaxAbsDiff(got, NaiveConv(in, w, {}, s)) <= 1e-5f);
}

TEST_CASE("conv2d: shape mismatches are configuration errors") {
  ConvSpec s;
  s.in_channels = 2;
  s.out_channels = 1;
  const Tensor w({1, 2, 1, 1});
  try {
    Conv2d(Tensor({1, 3, 4, 4}), w, {}, s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    CHECK(std::string(e.what()).find("input channels") != std::string::npos);
  }
  CHECK_THROWS_AS(Conv2d(Tensor({1, 2, 4, 4}), Tensor({1, 2, 3, 3}), {}, s),
                  Error);
  ConvSpec big;
  big.kernel_h = big.kernel_w = 5;
  CHECK_THROWS_AS(Conv2d(Tensor({1, 1, 3, 3}), Tensor({1, 1, 5, 5}), {}, big),
                  Error);
  ConvSpec grp;
  grp.in_channels = 3;
  grp.out_channels = 2;
  grp.groups = 2;
  CHECK_THROWS_AS(grp.Validate(), Error);
}

TEST_CASE("conv2d: linearity and determinism") {
  ConvSpec s;
  s.in_channels = 3;
  s.out_channels = 5;
  s.kernel_h = s.kernel_w = 3;
  s.padding = 1;
  const Tensor w = RandomTensor(s.WeightShape(), 1);
  const Tensor x = RandomTensor({1, 3, 9, 9}, 2);
  const Tensor y = RandomTensor({1, 3, 9, 9}, 3);
  const float a = 0.7f, b = -1.3f;
  Tensor mix(x.shape());
  for (size_t i = 0; i < mix.size(); ++i) {
    mix.data()[i] = a * x.data()[i] + b * y.data()[i];
  }
  const Tensor lhs = Conv2d(mix, w, {}, s);
  const Tensor cx = Conv2d(x, w, {}, s), cy = Conv2d(y, w, {}, s);
  for (size_t i = 0; i < lhs.size(); ++i) {
    const float rhs = a * cx.data()[i] + b * cy.data()[i];
    CHECK(std::abs(lhs.data()[i] - rhs) <=
          1e-4f * std::max(1.0f, std::abs(rhs)));
  }
  CHECK(Conv2d(x, w, {}, s).BitEqual(cx));
}

TEST_CASE("pixel_unshuffle: 2x2 hand enumeration") {
  const Tensor in({1, 1, 2, 2}, {1, 2, 3, 4});
  const Tensor out = PixelUnshuffle(in, 2);
  CHECK(out.shape() == Shape{1, 4, 1, 1});
  CHECK(out.span()[0] == 1.0f);
  CHECK(out.span()[1] == 2.0f);
  CHECK(out.span()[2] == 3.0f);
  CHECK(out.span()[3] == 4.0f);
  CHECK(PixelShuffle(out, 2).BitEqual(in));
}

TEST_CASE("pixel_unshuffle / pixel_shuffle: shapes, identity, bijection") {
  const Tensor t = RandomTensor({1, 4, 64, 64}, 7);
  CHECK(PixelUnshuffle(t, 1).BitEqual(t));
  CHECK(PixelShuffle(t, 1).BitEqual(t));
  CHECK(PixelUnshuffle(t, 4).shape() == Shape{1, 64, 16, 16});
  const Tensor r = RandomTensor({1, 8, 6, 6}, 8);
  CHECK(PixelShuffle(PixelUnshuffle(r, 2), 2).BitEqual(r));
  CHECK(PixelUnshuffle(PixelShuffle(r, 2), 2).BitEqual(r));
  const Tensor r3 = RandomTensor({2, 9, 6, 12}, 9);
  CHECK(PixelShuffle(PixelUnshuffle(r3, 3), 3).BitEqual(r3));
  CHECK_THROWS_AS(PixelUnshuffle(Tensor({1, 1, 3, 4}), 2), Error);
  CHECK_THROWS_AS(PixelShuffle(Tensor({1, 3, 2, 2}), 2), Error);
}

TEST_CASE("activations") {
  CHECK(Activate(-1.0f, Activation::kRelu) == 0.0f);
  CHECK(Activate(2.0f, Activation::kRelu) == 2.0f);
  CHECK(Activate(0.0f, Activation::kSilu) == 0.0f);
  // High-precision evaluation of the tanh approximation at 1.
  const long double k = std::sqrt(2.0L / 3.14159265358979323846264338327950288L);
  const long double ref =
      0.5L * (1.0L + std::tanh(k * (1.0L + 0.044715L)));
  CHECK(std::abs(Activate(1.0f, Activation::kGeluTanh) - ref) <= 1e-6L);
  CHECK(ParseActivation("sigmoid") == Activation::kSigmoid);
  CHECK_THROWS_AS(ParseActivation("swish"), Error);
  // Monotone kinds preserve order.
  for (Activation a : {Activation::kSilu, Activation::kRelu, Activation::kTanh,
                       Activation::kSigmoid}) {
    float prev = Activate(-0.5f, a);
    for (float x = -0.4f; x < 5.0f; x += 0.1f) {
      const float v = Activate(x, a);
      CHECK(v >= prev);
      prev = v;
    }
  }
  Tensor t({1, 1, 1, 3}, {-100.0f, 0.0f, 100.0f});
  CHECK(Apply(t, Activation::kSigmoid).AllFinite());
  CHECK(Apply(t, Activation::kGeluTanh).AllFinite());
}

TEST_CASE("channel and spatial helpers") {
  const Tensor a = RandomTensor({1, 2, 3, 4}, 1);
  const Tensor b = RandomTensor({1, 3, 3, 4}, 2);
  const Tensor c = ConcatChannels(a, b);
  CHECK(c.shape() == Shape{1, 5, 3, 4});
  CHECK(SliceChannels(c, 0, 2).BitEqual(a));
  CHECK(SliceChannels(c, 2, 3).BitEqual(b));
  CHECK_THROWS_AS(SliceChannels(c, 4, 2), Error);
  const Tensor cr = Crop(b, 1, 2, 2, 2);
  CHECK(cr.at(0, 1, 0, 0) == b.at(0, 1, 1, 2));
  CHECK_THROWS_AS(Crop(b, 2, 0, 2, 1), Error);
  Tensor sum = a;
  AddInPlace(sum, a);
  CHECK(sum.at(0, 1, 2, 3) == 2.0f * a.at(0, 1, 2, 3));
  CHECK_THROWS_AS(AddInPlace(sum, b), Error);
  CHECK_THROWS_AS(Tensor({1, 1, 2, 2}, std::vector<float>(3)), Error);
}

}  // namespace
}  // namespace scodec
