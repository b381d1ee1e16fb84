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
#include <random>

#include "scodec/codec.h"
#include "scodec/color_fix.h"
#include "scodec/diffusion.h"
#include "scodec/error.h"
#include "scodec/image.h"
#include "test_util.h"

namespace scodec {
namespace {

using testing::BytesDigest;
using testing::MakeNets;
using testing::MatchesGolden;
using testing::RandomTensor;
using testing::SmallConfig;
using testing::SyntheticImage;
using testing::TensorDigest;

// Returns a fixed tensor regardless of input.
class FixedPredictor : public EpsilonPredictor {
 public:
  explicit FixedPredictor(Tensor eps) : eps_(std::move(eps)) {}
  Tensor Predict(const Tensor&, int) const override { return eps_; }

 private:
  Tensor eps_;
};

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kConfig;
}

TEST_CASE("noise schedule: linear betas, monotone, validated") {
  const NoiseSchedule s = NoiseSchedule::Linear();
  CHECK(s.steps() == 1000);
  CHECK(s.alpha_bar(0) == doctest::Approx(1.0 - 1e-4).epsilon(1e-12));
  long double prod = 1.0L;
  for (int t = 0; t < 1000; ++t) {
    prod *= 1.0L - (1e-4L + (0.02L - 1e-4L) * t / 999.0L);
    if (t == 499 || t == 999) {
      CHECK(s.alpha_bar(t) ==
            doctest::Approx(static_cast<double>(prod)).epsilon(1e-9));
    }
    if (t > 0) CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
  }
  CHECK(s.alpha_bar(999) > 0.0);
  CHECK_THROWS_AS(s.alpha_bar(1000), Error);
  CHECK_THROWS_AS(s.alpha_bar(-1), Error);
  CHECK_THROWS_AS(NoiseSchedule({0.5, 0.6}), Error);
  CHECK_THROWS_AS(NoiseSchedule({1.0, 0.0}), Error);
  CHECK_THROWS_AS(NoiseSchedule({}), Error);
}

TEST_CASE("one-step denoise: algebra") {
  const Tensor l_t = RandomTensor({1, 4, 8, 12}, 1, -3.0f, 3.0f);
  const NoiseSchedule s = NoiseSchedule::Linear();

  const ZeroPredictor zero;
  const Tensor z = OneStepDenoise(l_t, s, 999, zero);
  const double a = s.alpha_bar(999);
  for (size_t i = 0; i < l_t.size(); ++i) {
    CHECK(z.data()[i] ==
          static_cast<float>(static_cast<double>(l_t.data()[i]) / std::sqrt(a)));
  }

  const Tensor eps = RandomTensor(l_t.shape(), 2);
  const FixedPredictor fixed(eps);
  for (int t : {0, 250, 999}) {
    const Tensor out = OneStepDenoise(l_t, s, t, fixed);
    const double at = s.alpha_bar(t);
    for (size_t i = 0; i < l_t.size(); ++i) {
      const double want =
          (l_t.data()[i] - std::sqrt(1.0 - at) * eps.data()[i]) / std::sqrt(at);
      CHECK(std::abs(out.data()[i] - want) <= 1e-5 * std::max(1.0, std::abs(want)));
    }
  }

  const NoiseSchedule identity(std::vector<double>{1.0});
  CHECK(OneStepDenoise(l_t, identity, 0, fixed).BitEqual(l_t));

  const FixedPredictor wrong(Tensor({1, 4, 8, 8}));
  CHECK(KindOf([&] { OneStepDenoise(l_t, s, 999, wrong); }) == ErrorKind::kConfig);
  CHECK_THROWS_AS(OneStepDenoise(l_t, s, 1000, zero), Error);
}

TEST_CASE("color fix: statistics transfer and payload") {
  const Tensor target_img = SyntheticImage(64, 48, 3);
  const Tensor source = SyntheticImage(64, 48, 4);
  const ColorStats target = ComputeColorStats(target_img);
  const Tensor fixed = ColorFix(source, target, /*clamp=*/false);
  const ColorStats got = ComputeColorStats(fixed);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(got.mean[c] - target.mean[c]) < 1e-4);
    CHECK(std::abs(got.stddev[c] - target.stddev[c]) < 1e-4);
  }
  const Tensor once = ColorFix(source, target, /*clamp=*/false);
  const Tensor twice = ColorFix(once, target, /*clamp=*/false);
  for (size_t i = 0; i < once.size(); ++i) {
    CHECK(std::abs(once.data()[i] - twice.data()[i]) < 1e-6);
  }

  CHECK(QuantizeStat(0.5) == 32768);
  CHECK(QuantizeStat(0.0) == 0);
  CHECK(QuantizeStat(1.0) == 65535);
  CHECK(QuantizeStat(2.0) == 65535);
  CHECK(DequantizeStat(65535) == 1.0);
  const ColorStats back = FromPayload(ToPayload(target));
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(back.mean[c] - target.mean[c]) <= 0.5 / 65535 + 1e-12);
  }

  // A flat channel is copied through rather than divided by zero.
  Tensor flat = source;
  for (int64_t y = 0; y < flat.h(); ++y) {
    for (int64_t x = 0; x < flat.w(); ++x) flat.at(0, 1, y, x) = 0.25f;
  }
  const Tensor f = ColorFix(flat, target);
  CHECK(f.AllFinite());
  CHECK(f.at(0, 1, 5, 5) == 0.25f);
}

TEST_CASE("latent shapes for 768x512") {
  const LatentShapes s = ComputeLatentShapes(768, 512, TransformConfig{});
  CHECK(s.padded == Shape{1, 3, 512, 768});
  CHECK(s.src8 == Shape{1, 4, 64, 96});
  CHECK(s.l == Shape{1, 128, 32, 48});
  CHECK(s.y == Shape{1, 320, 8, 12});
  CHECK(s.z == Shape{1, 160, 2, 3});
  CHECK(s.l_t == Shape{1, 4, 64, 96});
  const LatentShapes odd = ComputeLatentShapes(257, 1, TransformConfig{});
  CHECK(odd.padded == Shape{1, 3, 256, 512});
}

struct Fixture {
  TransformConfig cfg = SmallConfig();
  std::shared_ptr<const CodecNets> nets = MakeNets(cfg, 11);
  Tensor image = SyntheticImage(300, 200, 5);
};

TEST_CASE("encode/decode: deterministic, lossless symbols, golden") {
  Fixture f;
  const EncodeResult a = EncodeImage(f.image, *f.nets);
  const EncodeResult b = EncodeImage(f.image, *f.nets);
  CHECK(a.bytes == b.bytes);
  CHECK(a.shapes.y == Shape{1, 32, 4, 8});
  CHECK(a.container.header.width == 300);
  CHECK(a.container.header.height == 200);
  CHECK(a.container.header.timestep == kDefaultTimestep);
  CHECK(a.container.color.has_value());

  const DecodeResult d1 = DecodeImage(a.bytes, *f.nets);
  const DecodeResult d2 = DecodeImage(a.bytes, *f.nets);
  CHECK(d1.symbols == a.symbols);
  CHECK(d1.y_hat.BitEqual(a.y_hat));
  CHECK(d1.image.BitEqual(d2.image));
  CHECK(d1.image.shape() == f.image.shape());
  for (float v : d1.image.span()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK(MatchesGolden("pipeline_container", BytesDigest(a.bytes)));
  CHECK(MatchesGolden("pipeline_image", TensorDigest(d1.image)));

  const double est = a.estimate.total_bits();
  CHECK(8.0 * a.bytes.size() >= est * 0.99);
  CHECK(8.0 * a.bytes.size() <= est * 1.01 + 8.0 * (48 + 12 + 5 * 4));
}

TEST_CASE("encode options: color flag, timestep, tiling") {
  Fixture f;
  const EncodeResult with = EncodeImage(f.image, *f.nets);
  EncodeOptions no_color;
  no_color.color_fix = false;
  const EncodeResult without = EncodeImage(f.image, *f.nets, no_color);
  CHECK(with.bytes.size() - without.bytes.size() == kColorPayloadBytes);
  CHECK(without.symbols == with.symbols);
  const DecodeResult d = DecodeImage(without.bytes, *f.nets);
  CHECK(d.image.BitEqual(d.unfixed));

  EncodeOptions tiled;
  tiled.tiles = {256, 128, 0.0};
  const EncodeResult t = EncodeImage(SyntheticImage(600, 300, 9), *f.nets, tiled);
  const EncodeResult u = EncodeImage(SyntheticImage(600, 300, 9), *f.nets);
  CHECK(t.symbols == u.symbols);
  CHECK((t.container.header.flags & kFlagTiled) != 0);

  EncodeOptions early;
  early.timestep = 10;
  const EncodeResult e = EncodeImage(f.image, *f.nets, early);
  CHECK(DecodeImage(e.bytes, *f.nets).header.timestep == 10);
  early.timestep = 1000;
  CHECK_THROWS_AS(EncodeImage(f.image, *f.nets, early), Error);
}

TEST_CASE("2048x1536 tiled encode at 512/64 reproduces the untiled symbols") {
  Fixture f;
  const Tensor img = SyntheticImage(2048, 1536, 13);
  EncodeOptions tiled;
  tiled.tiles = {512, 64, 0.0};
  const EncodeResult t = EncodeImage(img, *f.nets, tiled);
  const EncodeResult u = EncodeImage(img, *f.nets);
  CHECK(t.symbols == u.symbols);
  CHECK(t.container.streams == u.container.streams);
}

TEST_CASE("decode tiling stays close to the untiled reconstruction") {
  Fixture f;
  const Tensor img = SyntheticImage(512, 512, 12);
  const EncodeResult e = EncodeImage(img, *f.nets);
  const DecodeResult whole = DecodeImage(e.bytes, *f.nets);
  DecodeOptions opt;
  opt.tiles = {256, 128, 0.0};
  const DecodeResult tiled = DecodeImage(e.bytes, *f.nets, opt);
  double max_diff = 0.0;
  for (size_t i = 0; i < whole.unfixed.size(); ++i) {
    max_diff = std::max<double>(
        max_diff, std::abs(whole.unfixed.data()[i] - tiled.unfixed.data()[i]));
  }
  CHECK(max_diff <= 1e-3);
}

TEST_CASE("decode errors") {
  Fixture f;
  const EncodeResult e = EncodeImage(f.image, *f.nets);
  const auto other = MakeNets(f.cfg, 12);
  CHECK(KindOf([&] { DecodeImage(e.bytes, *other); }) ==
        ErrorKind::kModelMismatch);

  // Streams carry no checksum. A flipped byte raises an error, changes the
  // decoded symbols, or lands in the coder's flush slack and changes
  // nothing at all.
  const DecodeResult clean = DecodeImage(e.bytes, *f.nets);
  std::mt19937_64 rng(3);
  const size_t payload_start = e.bytes.size() - [&] {
    size_t n = 0;
    for (const Bytes& s : e.container.streams) n += s.size();
    return n;
  }();
  int errors = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Bytes corrupt = e.bytes;
    const size_t pos =
        payload_start + rng() % (corrupt.size() - payload_start);
    corrupt[pos] ^= static_cast<uint8_t>(1 + rng() % 255);
    try {
      const DecodeResult d = DecodeImage(corrupt, *f.nets);
      if (d.symbols == e.symbols) CHECK(d.image.BitEqual(clean.image));
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::kDecode);
      ++errors;
    }
  }
  CHECK(errors > 0);

  Bytes truncated(e.bytes.begin(), e.bytes.end() - 1);
  CHECK(KindOf([&] { DecodeImage(truncated, *f.nets); }) == ErrorKind::kFormat);

  Container c = e.container;
  c.header.timestep = 1000;
  CHECK(KindOf([&] { DecodeImage(WriteContainer(c), *f.nets); }) ==
        ErrorKind::kFormat);
}

TEST_CASE("toy predictor changes the reconstruction only through l_0") {
  Fixture f;
  const EncodeResult e = EncodeImage(f.image, *f.nets);
  const auto toy = MakePredictor("toy", *f.nets->epsilon, kDefaultScheduleSteps);
  DecodeOptions opt;
  opt.predictor = toy.get();
  const DecodeResult a = DecodeImage(e.bytes, *f.nets, opt);
  const DecodeResult z = DecodeImage(e.bytes, *f.nets);
  CHECK(a.symbols == z.symbols);
  CHECK(a.l_t.BitEqual(z.l_t));
  CHECK_FALSE(a.image.BitEqual(z.image));
  CHECK_THROWS_AS(MakePredictor("ddim", *f.nets->epsilon, 1000), Error);
}

TEST_CASE("image io round trip") {
  const Tensor img = QuantizeTo8Bit(SyntheticImage(37, 21, 8));
  const auto dir = std::filesystem::temp_directory_path() / "scodec_img_test";
  std::filesystem::create_directories(dir);
  WriteImage(dir / "a.png", img);
  WriteImage(dir / "a.ppm", img);
  CHECK(ReadImage(dir / "a.png").BitEqual(img));
  CHECK(ReadImage(dir / "a.ppm").BitEqual(img));
  WriteFileBytes(dir / "bad.png", Bytes{1, 2, 3});
  CHECK_THROWS_AS(ReadImage(dir / "bad.png"), Error);
  CHECK(KindOf([&] { ReadImage(dir / "missing.png"); }) == ErrorKind::kIo);
  const Tensor padded = PadReplicate(img, 16);
  CHECK(padded.shape() == Shape{1, 3, 32, 48});
  CHECK(padded.at(0, 2, 31, 47) == img.at(0, 2, 20, 36));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace scodec
