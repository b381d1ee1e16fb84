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

#include "scodec/entropy_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Beyond this many standard deviations a tail mass is below 1e-30 and can
// only ever contribute a zero count, so erfc is not evaluated.
constexpr double kTailCutoff = 12.0;

// P(X > x) for standard normal X.
double UpperTail(double x) {
  if (x > kTailCutoff) return 0.0;
  if (x < -kTailCutoff) return 1.0;
  return 0.5 * std::erfc(x * kInvSqrt2);
}

// P(X < x).
double LowerTail(double x) { return UpperTail(-x); }

// P(a < X < b) with the tail on the short side for accuracy.
double IntervalMass(double a, double b) {
  if (a >= 0.0) return UpperTail(a) - UpperTail(b);
  if (b <= 0.0) return LowerTail(b) - LowerTail(a);
  return 1.0 - LowerTail(a) - UpperTail(b);
}

float ClampScale(float s) { return std::clamp(s, kScaleMin, kScaleMax); }

float Softplus(float x) {
  return x > 20.0f ? x : std::log1p(std::exp(x));
}

void CheckEven(const Shape& s) {
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    Fail(ErrorKind::kConfig, "internal: quadtree partition needs even extents, "
                             "got " + s.ToString());
  }
}

// Tables depend only on the scale for mean-centered symbols; consecutive
// elements often share a clamped scale, so the last table is reused.
class TableCache {
 public:
  const CdfTable& Get(float scale) {
    if (!valid_ || scale != scale_) {
      table_ = BuildCdf(0.0, scale);
      scale_ = scale;
      valid_ = true;
    }
    return table_;
  }

 private:
  bool valid_ = false;
  float scale_ = 0.0f;
  CdfTable table_;
};

}  // namespace

Quantized Quantize(const Tensor& y, const Tensor& mu) {
  if (!(y.shape() == mu.shape())) {
    Fail(ErrorKind::kConfig, "quantize: shape " + y.shape().ToString() +
                                 " != mean shape " + mu.shape().ToString());
  }
  Quantized q;
  q.symbols.resize(y.size());
  q.y_hat = Tensor(y.shape());
  for (size_t i = 0; i < y.size(); ++i) {
    const float centered = y.data()[i] - mu.data()[i];
    const float r = std::round(centered);
    const int32_t s = static_cast<int32_t>(std::clamp<float>(
        r, -static_cast<float>(kMaxSymbolMagnitude),
        static_cast<float>(kMaxSymbolMagnitude)));
    q.symbols[i] = s;
    q.y_hat.data()[i] = static_cast<float>(s) + mu.data()[i];
  }
  return q;
}

Tensor Dequantize(std::span<const int32_t> symbols, const Tensor& mu) {
  if (symbols.size() != mu.size()) {
    Fail(ErrorKind::kConfig, "dequantize: symbol count mismatch");
  }
  Tensor out(mu.shape());
  for (size_t i = 0; i < symbols.size(); ++i) {
    out.data()[i] = static_cast<float>(symbols[i]) + mu.data()[i];
  }
  return out;
}

std::array<Tensor, kNumGroups> Partition(const Tensor& field) {
  CheckEven(field.shape());
  std::array<Tensor, kNumGroups> groups;
  const Shape gs{field.n(), field.c(), field.h() / 2, field.w() / 2};
  for (int g = 0; g < kNumGroups; ++g) {
    groups[g] = Tensor(gs);
    const int dy = kGroupOffsets[g][0];
    const int dx = kGroupOffsets[g][1];
    for (int64_t n = 0; n < gs.n; ++n) {
      for (int64_t c = 0; c < gs.c; ++c) {
        for (int64_t y = 0; y < gs.h; ++y) {
          for (int64_t x = 0; x < gs.w; ++x) {
            groups[g].at(n, c, y, x) = field.at(n, c, 2 * y + dy, 2 * x + dx);
          }
        }
      }
    }
  }
  return groups;
}

Tensor MergeMasked(std::span<const Tensor> groups, const Shape& field_shape) {
  CheckEven(field_shape);
  if (groups.size() > kNumGroups) {
    Fail(ErrorKind::kSequencing, "more than four groups to merge");
  }
  const Shape gs{field_shape.n, field_shape.c, field_shape.h / 2,
                 field_shape.w / 2};
  Tensor field(field_shape);
  for (size_t g = 0; g < groups.size(); ++g) {
    if (!(groups[g].shape() == gs)) {
      Fail(ErrorKind::kConfig, "merge: group shape " +
                                   groups[g].shape().ToString() +
                                   " != expected " + gs.ToString());
    }
    const int dy = kGroupOffsets[g][0];
    const int dx = kGroupOffsets[g][1];
    for (int64_t n = 0; n < gs.n; ++n) {
      for (int64_t c = 0; c < gs.c; ++c) {
        for (int64_t y = 0; y < gs.h; ++y) {
          for (int64_t x = 0; x < gs.w; ++x) {
            field.at(n, c, 2 * y + dy, 2 * x + dx) = groups[g].at(n, c, y, x);
          }
        }
      }
    }
  }
  return field;
}

Tensor Merge(std::span<const Tensor> groups) {
  if (groups.size() != kNumGroups) {
    Fail(ErrorKind::kSequencing, "merge needs all four groups");
  }
  const Shape& gs = groups[0].shape();
  return MergeMasked(groups, {gs.n, gs.c, gs.h * 2, gs.w * 2});
}

double DiscreteGaussianProbability(int64_t s, double mu, double sigma) {
  const double a = (static_cast<double>(s) - 0.5 - mu) / sigma;
  const double b = (static_cast<double>(s) + 0.5 - mu) / sigma;
  return IntervalMass(a, b);
}

CdfTable BuildCdf(double mean_offset, double sigma) {
  if (!(sigma > 0.0)) {
    Fail(ErrorKind::kConfig, "build_cdf: scale must be positive");
  }
  std::array<double, kTableSize> p{};
  for (int k = 0; k < kEscapeIndex; ++k) {
    p[k] = DiscreteGaussianProbability(k - kSymbolLimit, mean_offset, sigma);
  }
  p[kEscapeIndex] =
      LowerTail((-kSymbolLimit - 0.5 - mean_offset) / sigma) +
      UpperTail((kSymbolLimit + 0.5 - mean_offset) / sigma);

  // One guaranteed count per entry, the rest proportional to mass; the
  // rounding remainder goes to the most probable entry.
  constexpr uint32_t kSpare = kProbTotal - kTableSize;
  std::array<uint32_t, kTableSize> counts{};
  uint32_t used = 0;
  int argmax = 0;
  for (int k = 0; k < kTableSize; ++k) {
    const double scaled = std::floor(std::clamp(p[k], 0.0, 1.0) * kSpare);
    counts[k] = 1 + static_cast<uint32_t>(scaled);
    used += counts[k];
    if (p[k] > p[argmax]) argmax = k;
  }
  counts[argmax] += kProbTotal - used;

  CdfTable table;
  table.cdf.resize(kTableSize + 1);
  table.cdf[0] = 0;
  for (int k = 0; k < kTableSize; ++k) {
    table.cdf[k + 1] = table.cdf[k] + counts[k];
  }
  return table;
}

void EncodeSymbol(RangeEncoder& enc, const CdfTable& table, int32_t symbol) {
  if (symbol >= -kSymbolLimit && symbol <= kSymbolLimit) {
    enc.Encode(table, symbol + kSymbolLimit);
    return;
  }
  if (symbol < -kMaxSymbolMagnitude || symbol > kMaxSymbolMagnitude) {
    Fail(ErrorKind::kConfig, "symbol " + std::to_string(symbol) +
                                 " exceeds the escape range");
  }
  enc.Encode(table, kEscapeIndex);
  enc.Encode(static_cast<uint32_t>(symbol + 32768), 1);
}

int32_t DecodeSymbol(RangeDecoder& dec, const CdfTable& table) {
  const int index = dec.Decode(table);
  if (index != kEscapeIndex) return index - kSymbolLimit;
  const uint32_t raw = dec.Peek();
  dec.Consume(raw, 1);
  const int32_t symbol = static_cast<int32_t>(raw) - 32768;
  if (symbol < -kMaxSymbolMagnitude ||
      (symbol >= -kSymbolLimit && symbol <= kSymbolLimit)) {
    Fail(ErrorKind::kDecode, "invalid escaped symbol " +
                                 std::to_string(symbol));
  }
  return symbol;
}

double SymbolBits(const CdfTable& table, int32_t symbol) {
  auto bits = [&](int index) {
    return -std::log2(static_cast<double>(table.Frequency(index)) /
                      kProbTotal);
  };
  if (symbol >= -kSymbolLimit && symbol <= kSymbolLimit) {
    return bits(symbol + kSymbolLimit);
  }
  return bits(kEscapeIndex) + kProbBits;
}

void EncodeGaussianSymbols(RangeEncoder& enc, std::span<const int32_t> symbols,
                           std::span<const float> scales) {
  if (symbols.size() != scales.size()) {
    Fail(ErrorKind::kConfig, "symbol/scale count mismatch");
  }
  TableCache cache;
  for (size_t i = 0; i < symbols.size(); ++i) {
    EncodeSymbol(enc, cache.Get(ClampScale(scales[i])), symbols[i]);
  }
}

std::vector<int32_t> DecodeGaussianSymbols(RangeDecoder& dec,
                                           std::span<const float> scales) {
  TableCache cache;
  std::vector<int32_t> out(scales.size());
  for (size_t i = 0; i < scales.size(); ++i) {
    out[i] = DecodeSymbol(dec, cache.Get(ClampScale(scales[i])));
  }
  return out;
}

double GaussianBits(std::span<const int32_t> symbols,
                    std::span<const float> scales) {
  if (symbols.size() != scales.size()) {
    Fail(ErrorKind::kConfig, "symbol/scale count mismatch");
  }
  TableCache cache;
  double bits = 0.0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    bits += SymbolBits(cache.Get(ClampScale(scales[i])), symbols[i]);
  }
  return bits;
}

double RateEstimate::total_bits() const {
  double total = z_bits;
  for (double b : group_bits) total += b;
  return total;
}

FactorizedPrior::FactorizedPrior(std::span<const float> location,
                                 std::span<const float> scale)
    : location_(location.begin(), location.end()) {
  if (location.size() != scale.size()) {
    Fail(ErrorKind::kConfig, "factorized prior: location/scale length differ");
  }
  tables_.reserve(scale.size());
  for (float s : scale) tables_.push_back(BuildCdf(0.0, ClampScale(s)));
}

Quantized FactorizedPrior::Quantize(const Tensor& z) const {
  if (z.c() != static_cast<int64_t>(location_.size())) {
    Fail(ErrorKind::kConfig, "factorized prior: channel count mismatch");
  }
  Tensor mu(z.shape());
  for (int64_t n = 0; n < z.n(); ++n) {
    for (int64_t c = 0; c < z.c(); ++c) {
      auto plane = mu.Plane(n, c);
      std::fill(plane.begin(), plane.end(), location_[c]);
    }
  }
  return scodec::Quantize(z, mu);
}

void FactorizedPrior::Encode(RangeEncoder& enc, const Shape& shape,
                             std::span<const int32_t> symbols) const {
  const int64_t plane = shape.h * shape.w;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const int64_t c = (static_cast<int64_t>(i) / plane) % shape.c;
    EncodeSymbol(enc, tables_[c], symbols[i]);
  }
}

std::vector<int32_t> FactorizedPrior::Decode(RangeDecoder& dec,
                                             const Shape& shape) const {
  const int64_t plane = shape.h * shape.w;
  std::vector<int32_t> out(static_cast<size_t>(shape.elements()));
  for (size_t i = 0; i < out.size(); ++i) {
    const int64_t c = (static_cast<int64_t>(i) / plane) % shape.c;
    out[i] = DecodeSymbol(dec, tables_[c]);
  }
  return out;
}

Tensor FactorizedPrior::Dequantize(std::span<const int32_t> symbols,
                                   const Shape& shape) const {
  Tensor out(shape);
  const int64_t plane = shape.h * shape.w;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const int64_t c = (static_cast<int64_t>(i) / plane) % shape.c;
    out.data()[i] = static_cast<float>(symbols[i]) + location_[c];
  }
  return out;
}

double FactorizedPrior::Bits(std::span<const int32_t> symbols,
                             const Shape& shape) const {
  const int64_t plane = shape.h * shape.w;
  double bits = 0.0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const int64_t c = (static_cast<int64_t>(i) / plane) % shape.c;
    bits += SymbolBits(tables_[c], symbols[i]);
  }
  return bits;
}

EntropyModel::StepPrediction EntropyModel::Predict(
    const Tensor& phi_hyper, std::span<const Tensor> decoded, int step) const {
  if (step < 1 || step > kNumGroups) {
    Fail(ErrorKind::kSequencing, "step " + std::to_string(step) +
                                     " outside 1..4");
  }
  if (static_cast<int>(decoded.size()) != step - 1) {
    Fail(ErrorKind::kSequencing,
         "step " + std::to_string(step) + " needs " +
             std::to_string(step - 1) + " decoded groups, got " +
             std::to_string(decoded.size()));
  }
  const Shape field_shape{phi_hyper.n(), code_channels_, phi_hyper.h(),
                          phi_hyper.w()};
  const Tensor context = MergeMasked(decoded, field_shape);
  StepPrediction out;
  out.features = nets_.Features(step - 1, ConcatChannels(phi_hyper, context));
  const Tensor head = nets_.Head(step - 1, out.features);
  const auto mean_groups = Partition(SliceChannels(head, 0, code_channels_));
  auto scale_groups =
      Partition(SliceChannels(head, code_channels_, code_channels_));
  out.params.mean = mean_groups[step - 1];
  out.params.scale = std::move(scale_groups[step - 1]);
  for (float& v : out.params.scale.span()) v = ClampScale(Softplus(v));
  return out;
}

Tensor EntropyModel::ApplyLrp(int step, const StepPrediction& prediction,
                              std::span<const Tensor> decoded,
                              const Tensor& y_hat_group) const {
  std::vector<Tensor> known(decoded.begin(), decoded.end());
  if (static_cast<int>(known.size()) != step - 1) {
    Fail(ErrorKind::kSequencing, "LRP step " + std::to_string(step) +
                                     " called with " +
                                     std::to_string(known.size()) +
                                     " decoded groups");
  }
  known.push_back(y_hat_group);
  const Shape field_shape{y_hat_group.n(), y_hat_group.c(),
                          y_hat_group.h() * 2, y_hat_group.w() * 2};
  const Tensor field = MergeMasked(known, field_shape);
  const Tensor residual = nets_.Lrp(step - 1, prediction.features, field);
  Tensor refined = y_hat_group;
  const Tensor r = Partition(residual)[step - 1];
  for (size_t i = 0; i < refined.size(); ++i) {
    refined.data()[i] += 0.5f * std::tanh(r.data()[i]);
  }
  return refined;
}

}  // namespace scodec
