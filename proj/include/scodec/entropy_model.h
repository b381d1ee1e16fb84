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

// Four-step quadtree autoregressive Gaussian entropy model.
//
// The code latent is split into four interleaved groups, one position per
// aligned 2x2 block each. Group i is coded with a mean/scale predicted from
// the hyperprior and the already decoded (and LRP-refined) groups < i.
// Coded symbols are mean-centered: s = round(y - mu), y_hat = s + mu.

#ifndef SCODEC_ENTROPY_MODEL_H_
#define SCODEC_ENTROPY_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "scodec/nets.h"
#include "scodec/range_coder.h"
#include "scodec/tensor.h"

namespace scodec {

inline constexpr int kNumGroups = 4;
inline constexpr float kScaleMin = 0.04f;
inline constexpr float kScaleMax = 64.0f;
// In-table symbols are [-kSymbolLimit, kSymbolLimit]; the last table entry
// is an escape followed by a 16-bit raw value.
inline constexpr int kSymbolLimit = 127;
inline constexpr int kTableSize = 2 * kSymbolLimit + 2;
inline constexpr int kEscapeIndex = kTableSize - 1;
inline constexpr int32_t kMaxSymbolMagnitude = 32767;

// (row, column) offset owned by each group inside every 2x2 block: the
// anchor, then its diagonal, then the two remaining positions.
inline constexpr std::array<std::array<int, 2>, kNumGroups> kGroupOffsets = {
    {{0, 0}, {1, 1}, {0, 1}, {1, 0}}};

struct Quantized {
  Tensor y_hat;                  // s + mu
  std::vector<int32_t> symbols;  // s, flat (n, c, h, w) order
};

// Round-half-away-from-zero of y - mu, clamped to +-kMaxSymbolMagnitude.
Quantized Quantize(const Tensor& y, const Tensor& mu);
// y_hat = s + mu.
Tensor Dequantize(std::span<const int32_t> symbols, const Tensor& mu);

// Requires even spatial extents.
std::array<Tensor, kNumGroups> Partition(const Tensor& field);
Tensor Merge(std::span<const Tensor> groups);
// Places the given leading groups into a zero field of shape `field_shape`.
Tensor MergeMasked(std::span<const Tensor> groups, const Shape& field_shape);

struct GaussianParams {
  Tensor mean;
  Tensor scale;  // within [kScaleMin, kScaleMax]
};

// Probability of integer s under N(mu, sigma^2) integrated over
// [s - 0.5, s + 0.5].
double DiscreteGaussianProbability(int64_t s, double mu, double sigma);

// Discretized Gaussian over [-kSymbolLimit, kSymbolLimit] plus the escape
// bucket (tail mass), quantized to kProbTotal with every entry >= 1. Any
// sigma > 0 is accepted; the codec always passes clamped scales.
CdfTable BuildCdf(double mean_offset, double sigma);

// Escape-aware symbol coding with a BuildCdf table.
void EncodeSymbol(RangeEncoder& enc, const CdfTable& table, int32_t symbol);
int32_t DecodeSymbol(RangeDecoder& dec, const CdfTable& table);
// Exact cost of EncodeSymbol in the ideal-coder sense.
double SymbolBits(const CdfTable& table, int32_t symbol);

// Symbols of one group, coded in flat (n, c, h, w) raster order with zero-mean
// tables of the given scales.
void EncodeGaussianSymbols(RangeEncoder& enc, std::span<const int32_t> symbols,
                           std::span<const float> scales);
std::vector<int32_t> DecodeGaussianSymbols(RangeDecoder& dec,
                                           std::span<const float> scales);
double GaussianBits(std::span<const int32_t> symbols,
                    std::span<const float> scales);

struct RateEstimate {
  double z_bits = 0.0;
  std::array<double, kNumGroups> group_bits{};
  double total_bits() const;
};

// Per-channel zero-mean discretized Gaussian for the side latent z; the
// loaded location is subtracted before rounding.
class FactorizedPrior {
 public:
  FactorizedPrior(std::span<const float> location, std::span<const float> scale);

  Quantized Quantize(const Tensor& z) const;
  void Encode(RangeEncoder& enc, const Shape& shape,
              std::span<const int32_t> symbols) const;
  std::vector<int32_t> Decode(RangeDecoder& dec, const Shape& shape) const;
  Tensor Dequantize(std::span<const int32_t> symbols, const Shape& shape) const;
  double Bits(std::span<const int32_t> symbols, const Shape& shape) const;
  const CdfTable& table(int64_t channel) const { return tables_[channel]; }

 private:
  std::vector<float> location_;
  std::vector<CdfTable> tables_;
};

// Parameter prediction and latent residual prediction for the four steps.
class EntropyModel {
 public:
  EntropyModel(const ContextNets& nets, const TransformConfig& cfg)
      : nets_(nets), code_channels_(cfg.code_channels) {}

  struct StepPrediction {
    GaussianParams params;  // shaped like one group
    Tensor features;        // shared-trunk output at full 1/64 resolution
  };

  // `step` is 1-based; `decoded` must hold exactly step - 1 refined groups.
  StepPrediction Predict(const Tensor& phi_hyper,
                         std::span<const Tensor> decoded, int step) const;

  // y_hat_i + 0.5 * tanh(LRP(features, groups <= i)).
  Tensor ApplyLrp(int step, const StepPrediction& prediction,
                  std::span<const Tensor> decoded,
                  const Tensor& y_hat_group) const;

 private:
  const ContextNets& nets_;
  int64_t code_channels_;
};

}  // namespace scodec

#endif  // SCODEC_ENTROPY_MODEL_H_
