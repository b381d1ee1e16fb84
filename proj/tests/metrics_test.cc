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
#include <limits>
#include <random>

#include "scodec/error.h"
#include "scodec/metrics.h"
#include "test_util.h"

namespace scodec {
namespace {

using testing::RandomTensor;
using testing::SyntheticImage;

// Straightforward MS-SSIM: explicit 2-D windows, no separability.
double OracleMsSsim(const Tensor& a, const Tensor& b) {
  using Grid = std::vector<std::vector<double>>;
  auto window = [](int64_t size) {
    std::vector<double> g(size);
    double sum = 0.0;
    for (int64_t i = 0; i < size; ++i) {
      const double d = i - (size - 1) / 2.0;
      g[i] = std::exp(-d * d / (2 * 1.5 * 1.5));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
  };
  auto odd = [](int64_t e) { int64_t s = std::min<int64_t>(11, e); return s % 2 ? s : s - 1; };
  auto pool = [](const Grid& p) {
    Grid o(p.size() / 2, std::vector<double>(p[0].size() / 2));
    for (size_t y = 0; y < o.size(); ++y)
      for (size_t x = 0; x < o[0].size(); ++x)
        o[y][x] = (p[2 * y][2 * x] + p[2 * y][2 * x + 1] + p[2 * y + 1][2 * x] +
                   p[2 * y + 1][2 * x + 1]) / 4;
    return o;
  };
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0.0;
  for (int64_t c = 0; c < a.c(); ++c) {
    Grid pa(a.h(), std::vector<double>(a.w())), pb = pa;
    for (int64_t y = 0; y < a.h(); ++y)
      for (int64_t x = 0; x < a.w(); ++x) {
        pa[y][x] = a.at(0, c, y, x);
        pb[y][x] = b.at(0, c, y, x);
      }
    double value = 1.0;
    for (int s = 0; s < 5; ++s) {
      const int64_t h = pa.size(), w = pa[0].size();
      const auto gy = window(odd(h)), gx = window(odd(w));
      const int64_t ky = gy.size(), kx = gx.size();
      double cs_sum = 0, ssim_sum = 0;
      int64_t count = 0;
      for (int64_t y = 0; y + ky <= h; ++y) {
        for (int64_t x = 0; x + kx <= w; ++x) {
          double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
          for (int64_t i = 0; i < ky; ++i)
            for (int64_t j = 0; j < kx; ++j) {
              const double g = gy[i] * gx[j];
              const double u = pa[y + i][x + j], v = pb[y + i][x + j];
              ma += g * u; mb += g * v;
              saa += g * u * u; sbb += g * v * v; sab += g * u * v;
            }
          const double cs = (2 * (sab - ma * mb) + c2) /
                            (saa - ma * ma + sbb - mb * mb + c2);
          cs_sum += cs;
          ssim_sum += cs * (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
          ++count;
        }
      }
      const double term = (s < 4 ? cs_sum : ssim_sum) / count;
      value *= std::pow(std::max(term, 0.0), kMsSsimWeights[s]);
      pa = pool(pa);
      pb = pool(pb);
    }
    total += value;
  }
  return total / a.c();
}

Tensor AddNoise(const Tensor& t, double amount, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, amount);
  Tensor out = t;
  for (float& v : out.span()) v = static_cast<float>(std::clamp(v + n(rng), 0.0, 1.0));
  return out;
}

TEST_CASE("psnr") {
  Tensor zero({1, 3, 4, 4}), half({1, 3, 4, 4});
  for (float& v : half.span()) v = 0.5f;
  CHECK(Psnr(zero, half) == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(std::isinf(Psnr(half, half)));
  const Tensor img = SyntheticImage(64, 64, 1);
  double last = std::numeric_limits<double>::infinity();
  for (double sigma : {0.01, 0.03, 0.1}) {
    const double p = Psnr(img, AddNoise(img, sigma, 2));
    CHECK(p < last);
    last = p;
  }
  // Uniform noise of standard deviation s on mid-range values (no clipping).
  Tensor mid({1, 3, 64, 64});
  for (float& v : mid.span()) v = 0.5f;
  std::mt19937_64 rng(9);
  for (double s : {0.01, 0.05, 0.1}) {
    std::uniform_real_distribution<double> u(-s * std::sqrt(3.0), s * std::sqrt(3.0));
    Tensor noisy = mid;
    double sq = 0.0;
    for (float& v : noisy.span()) {
      v = static_cast<float>(v + u(rng));
      sq += (v - 0.5) * (v - 0.5);
    }
    const double direct = 10.0 * std::log10(mid.size() / sq);
    CHECK(std::abs(Psnr(mid, noisy) - direct) < 1e-6);
    CHECK(std::abs(Psnr(mid, noisy) - 20.0 * std::log10(1.0 / s)) < 0.2);
  }
  // Small clipped Gaussian noise sits near 10 log10(1 / sigma^2).
  CHECK(Psnr(img, AddNoise(img, 0.01, 3)) == doctest::Approx(40.0).epsilon(0.01));
  CHECK_THROWS_AS(Psnr(zero, Tensor({1, 3, 4, 5})), Error);
}

TEST_CASE("ms-ssim: identity, inversion, oracle agreement") {
  const Tensor img = SyntheticImage(192, 176, 4);
  CHECK(MsSsim(img, img) == 1.0);
  Tensor inv = img;
  for (float& v : inv.span()) v = 1.0f - v;
  CHECK(MsSsim(img, inv) < 0.3);
  for (int pair = 0; pair < 5; ++pair) {
    const Tensor a = SyntheticImage(160 + 8 * pair, 170, 10 + pair);
    const Tensor b = AddNoise(a, 0.02 + 0.03 * pair, 20 + pair);
    const double got = MsSsim(a, b);
    CHECK(got < 1.0);
    CHECK(got == doctest::Approx(OracleMsSsim(a, b)).epsilon(1e-4));
  }
  try {
    MsSsim(Tensor({1, 3, 159, 400}), Tensor({1, 3, 159, 400}));
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
  }
}

Curve MakeCurve(std::vector<double> bpp, std::vector<double> q) {
  Curve c;
  for (size_t i = 0; i < bpp.size(); ++i) c.push_back({bpp[i], q[i]});
  return c;
}

// Lagrange interpolation through four points, integrated with Simpson.
double OracleBdRate(const Curve& anchor, const Curve& test) {
  auto poly = [](const Curve& c, double q) {
    double s = 0.0;
    for (size_t i = 0; i < 4; ++i) {
      double l = 1.0;
      for (size_t j = 0; j < 4; ++j)
        if (j != i) l *= (q - c[j].quality) / (c[i].quality - c[j].quality);
      s += l * std::log10(c[i].bpp);
    }
    return s;
  };
  const double lo = std::max(anchor.front().quality, test.front().quality);
  const double hi = std::min(anchor.back().quality, test.back().quality);
  const int n = 2000;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double q = lo + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    sum += w * (poly(test, q) - poly(anchor, q));
  }
  return 100.0 * (std::pow(10.0, sum * h / 3.0 / (hi - lo)) - 1.0);
}

TEST_CASE("bd-rate") {
  const Curve a = MakeCurve({0.1, 0.2, 0.4, 0.8}, {28.0, 31.0, 34.0, 37.5});
  CHECK(std::abs(BdRate(a, a)) < 1e-9);
  Curve doubled = a;
  for (auto& p : doubled) p.bpp *= 2.0;
  CHECK(BdRate(a, doubled) == doctest::Approx(100.0).epsilon(1e-9));

  const Curve t = MakeCurve({0.12, 0.22, 0.41, 0.75}, {28.5, 31.2, 34.6, 38.0});
  CHECK(std::abs(BdRate(a, t) - OracleBdRate(a, t)) < 0.05);
  const double fwd = BdRate(a, t) / 100.0, back = BdRate(t, a) / 100.0;
  CHECK((1.0 + fwd) * (1.0 + back) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(BdRate(a, t) < 0.0);

  CHECK_THROWS_AS(BdRate(a, MakeCurve({0.1, 0.2, 0.3}, {1, 2, 3})), Error);
  CHECK_THROWS_AS(BdRate(a, MakeCurve({0.1, 0.3, 0.2, 0.4}, {1, 2, 3, 4})), Error);
  CHECK_THROWS_AS(BdRate(a, MakeCurve({0.1, 0.2, 0.3, 0.4}, {40, 41, 42, 43})),
                  Error);
  CHECK_THROWS_AS(BdRate(a, MakeCurve({0.0, 0.2, 0.3, 0.4}, {29, 30, 31, 32})),
                  Error);
}

}  // namespace
}  // namespace scodec
