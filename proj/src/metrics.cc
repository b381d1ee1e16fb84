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

#include "scodec/metrics.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void CheckSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (!(a.shape() == b.shape())) {
    Fail(ErrorKind::kConfig, std::string(what) + ": shapes differ, " +
                                 a.shape().ToString() + " vs " +
                                 b.shape().ToString());
  }
}

// Row-major (h, w) plane in double precision.
struct Plane {
  int64_t h = 0;
  int64_t w = 0;
  std::vector<double> v;

  double at(int64_t y, int64_t x) const { return v[y * w + x]; }
};

Plane Downsample(const Plane& p) {
  Plane out{p.h / 2, p.w / 2, {}};
  out.v.resize(static_cast<size_t>(out.h * out.w));
  for (int64_t y = 0; y < out.h; ++y) {
    for (int64_t x = 0; x < out.w; ++x) {
      out.v[y * out.w + x] = 0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) +
                                     p.at(2 * y + 1, 2 * x) +
                                     p.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

std::vector<double> GaussianWindow(int64_t size) {
  std::vector<double> g(static_cast<size_t>(size));
  const double c = 0.5 * static_cast<double>(size - 1);
  double sum = 0.0;
  for (int64_t i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - c;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

int64_t WindowFor(int64_t extent) {
  int64_t size = std::min<int64_t>(kSsimWindow, extent);
  if (size % 2 == 0) --size;
  return size;
}

// Valid-mode separable filter of one plane.
Plane Filter(const Plane& p, const std::vector<double>& gy,
             const std::vector<double>& gx) {
  const int64_t ky = static_cast<int64_t>(gy.size());
  const int64_t kx = static_cast<int64_t>(gx.size());
  Plane rows{p.h, p.w - kx + 1, {}};
  rows.v.assign(static_cast<size_t>(rows.h * rows.w), 0.0);
  for (int64_t y = 0; y < rows.h; ++y) {
    for (int64_t x = 0; x < rows.w; ++x) {
      double s = 0.0;
      for (int64_t k = 0; k < kx; ++k) s += gx[k] * p.at(y, x + k);
      rows.v[y * rows.w + x] = s;
    }
  }
  Plane out{p.h - ky + 1, rows.w, {}};
  out.v.assign(static_cast<size_t>(out.h * out.w), 0.0);
  for (int64_t y = 0; y < out.h; ++y) {
    for (int64_t x = 0; x < out.w; ++x) {
      double s = 0.0;
      for (int64_t k = 0; k < ky; ++k) s += gy[k] * rows.at(y + k, x);
      out.v[y * out.w + x] = s;
    }
  }
  return out;
}

Plane Product(const Plane& a, const Plane& b) {
  Plane out{a.h, a.w, std::vector<double>(a.v.size())};
  for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

// Mean contrast-structure term and mean full SSIM at one scale.
std::pair<double, double> SsimTerms(const Plane& a, const Plane& b) {
  const auto gy = GaussianWindow(WindowFor(a.h));
  const auto gx = GaussianWindow(WindowFor(a.w));
  const Plane mu_a = Filter(a, gy, gx);
  const Plane mu_b = Filter(b, gy, gx);
  const Plane aa = Filter(Product(a, a), gy, gx);
  const Plane bb = Filter(Product(b, b), gy, gx);
  const Plane ab = Filter(Product(a, b), gy, gx);
  double cs_sum = 0.0;
  double ssim_sum = 0.0;
  for (size_t i = 0; i < mu_a.v.size(); ++i) {
    const double ma = mu_a.v[i];
    const double mb = mu_b.v[i];
    const double va = aa.v[i] - ma * ma;
    const double vb = bb.v[i] - mb * mb;
    const double cov = ab.v[i] - ma * mb;
    const double cs = (2.0 * cov + kC2) / (va + vb + kC2);
    const double lum = (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const double count = static_cast<double>(mu_a.v.size());
  return {cs_sum / count, ssim_sum / count};
}

Plane ChannelPlane(const Tensor& t, int64_t n, int64_t c) {
  Plane p{t.h(), t.w(), {}};
  const auto src = t.Plane(n, c);
  p.v.assign(src.begin(), src.end());
  return p;
}

void CheckCurve(const Curve& c, const char* which) {
  if (c.size() < 4) {
    Fail(ErrorKind::kConfig, std::string(which) +
                                 " curve needs at least 4 points for a cubic "
                                 "fit, got " + std::to_string(c.size()));
  }
  for (size_t i = 0; i < c.size(); ++i) {
    if (!(c[i].bpp > 0.0) || !std::isfinite(c[i].quality)) {
      Fail(ErrorKind::kConfig, std::string(which) + " curve point " +
                                   std::to_string(i) +
                                   " needs bpp > 0 and finite quality");
    }
    if (i > 0 && !(c[i].bpp > c[i - 1].bpp)) {
      Fail(ErrorKind::kConfig, std::string(which) +
                                   " curve bpp must be strictly increasing");
    }
  }
}

// Coefficients c0..c3 of log10(bpp) ~ sum c_k q^k.
Eigen::Vector4d FitCubic(const Curve& c) {
  Eigen::MatrixXd a(c.size(), 4);
  Eigen::VectorXd b(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < 4; ++k) {
      a(i, k) = p;
      p *= c[i].quality;
    }
    b(i) = std::log10(c[i].bpp);
  }
  return a.colPivHouseholderQr().solve(b);
}

double IntegrateCubic(const Eigen::Vector4d& c, double lo, double hi) {
  auto primitive = [&](double q) {
    return c(0) * q + c(1) * q * q / 2.0 + c(2) * q * q * q / 3.0 +
           c(3) * q * q * q * q / 4.0;
  };
  return primitive(hi) - primitive(lo);
}

}  // namespace

double Psnr(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "psnr");
  if (a.size() == 0) Fail(ErrorKind::kConfig, "psnr: empty images");
  double sq = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    sq += d * d;
  }
  if (sq == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(a.size()) / sq);
}

double MsSsim(const Tensor& a, const Tensor& b) {
  CheckSameShape(a, b, "ms-ssim");
  if (a.h() < kMsSsimMinExtent || a.w() < kMsSsimMinExtent) {
    Fail(ErrorKind::kConfig,
         "ms-ssim needs both extents >= " + std::to_string(kMsSsimMinExtent) +
             " for 5 scales, got " + std::to_string(a.w()) + "x" +
             std::to_string(a.h()) + "; use PSNR or a larger image");
  }
  double total = 0.0;
  for (int64_t n = 0; n < a.n(); ++n) {
    for (int64_t c = 0; c < a.c(); ++c) {
      Plane pa = ChannelPlane(a, n, c);
      Plane pb = ChannelPlane(b, n, c);
      double value = 1.0;
      for (int s = 0; s < kMsSsimScales; ++s) {
        const auto [cs, ssim] = SsimTerms(pa, pb);
        const double term = s + 1 < kMsSsimScales ? cs : ssim;
        value *= std::pow(std::max(term, 0.0), kMsSsimWeights[s]);
        if (s + 1 < kMsSsimScales) {
          pa = Downsample(pa);
          pb = Downsample(pb);
        }
      }
      total += value;
    }
  }
  return total / static_cast<double>(a.n() * a.c());
}

double BdRate(const Curve& anchor, const Curve& test) {
  CheckCurve(anchor, "anchor");
  CheckCurve(test, "test");
  auto range = [](const Curve& c) {
    const auto [lo, hi] = std::minmax_element(
        c.begin(), c.end(), [](const RatePoint& x, const RatePoint& y) {
          return x.quality < y.quality;
        });
    return std::pair{lo->quality, hi->quality};
  };
  const auto [alo, ahi] = range(anchor);
  const auto [tlo, thi] = range(test);
  const double lo = std::max(alo, tlo);
  const double hi = std::min(ahi, thi);
  if (!(hi > lo)) {
    Fail(ErrorKind::kConfig, "bd-rate: quality ranges do not overlap");
  }
  const double avg =
      (IntegrateCubic(FitCubic(test), lo, hi) -
       IntegrateCubic(FitCubic(anchor), lo, hi)) /
      (hi - lo);
  return 100.0 * (std::pow(10.0, avg) - 1.0);
}

}  // namespace scodec
