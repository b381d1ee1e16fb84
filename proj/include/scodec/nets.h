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

// Inference networks of the latent codec. Every network pulls its
// parameters by name from a ParamSource when constructed, so the same
// constructors enumerate the weight schema, build random stores, and bind a
// loaded WeightStore.

#ifndef SCODEC_NETS_H_
#define SCODEC_NETS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scodec/config.h"
#include "scodec/tensor.h"
#include "scodec/weights.h"

namespace scodec {

class ParamSource {
 public:
  virtual ~ParamSource() = default;
  virtual const Tensor& Get(const std::string& name, const Shape& shape) = 0;
};

class StoreParams : public ParamSource {
 public:
  explicit StoreParams(const WeightStore& store) : store_(store) {}
  const Tensor& Get(const std::string& name, const Shape& shape) override {
    return store_.Get(name, shape);
  }

 private:
  const WeightStore& store_;
};

// Records every requested (name, shape) and hands out zero tensors.
class SchemaRecorder : public ParamSource {
 public:
  const Tensor& Get(const std::string& name, const Shape& shape) override;
  const std::map<std::string, Tensor>& params() const { return params_; }

 private:
  std::map<std::string, Tensor> params_;
};

struct Conv {
  ConvSpec spec;
  const Tensor* weight = nullptr;
  const Tensor* bias = nullptr;

  Conv() = default;
  Conv(ParamSource& ps, const std::string& name, ConvSpec spec);
  Tensor operator()(const Tensor& x) const;
};

// Square kernel, stride 1, "same" padding.
Conv SameConv(ParamSource& ps, const std::string& name, int64_t in,
              int64_t out, int64_t kernel, int64_t groups = 1);

// Space-to-depth by 2 followed by a pointwise projection.
struct DownSample {
  Conv proj;
  DownSample() = default;
  DownSample(ParamSource& ps, const std::string& name, int64_t in,
             int64_t out, int64_t factor = 2);
  Tensor operator()(const Tensor& x) const;
  int64_t factor = 2;
};

// Pointwise expansion followed by depth-to-space by 2.
struct UpSample {
  Conv proj;
  UpSample() = default;
  UpSample(ParamSource& ps, const std::string& name, int64_t in, int64_t out);
  Tensor operator()(const Tensor& x) const;
};

// Residual block of one of the configured kinds.
class Block {
 public:
  Block(ParamSource& ps, const std::string& name, BlockKind kind,
        int64_t channels, const TransformConfig& cfg);
  Tensor operator()(const Tensor& x) const;
  // Half-width of the receptive field, in input pixels.
  double Margin() const;

 private:
  BlockKind kind_;
  int64_t channels_;
  int64_t branch_ = 0;  // inception-dw: channels per depthwise branch
  Conv a_, b_, c_, fc1_, fc2_;
};

class StagedNet {
 public:
  // Pixel-scale of the output relative to the input.
  double OutputScale() const { return scale_; }
  // Receptive half-width in input pixels.
  double Margin() const { return margin_; }

 protected:
  double scale_ = 1.0;
  double margin_ = 0.0;
};

// g_a: l (1/16) -> y (1/64).
class AnalysisTransform : public StagedNet {
 public:
  AnalysisTransform(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& l) const;

 private:
  Conv stem_, head_;
  std::vector<DownSample> down_;
  std::vector<std::vector<Block>> stages_;
};

// g_s and the auxiliary decoder share this structure: y (1/64) -> 1/8.
class SynthesisTransform : public StagedNet {
 public:
  SynthesisTransform(ParamSource& ps, const TransformConfig& cfg,
                     const std::string& prefix, const StageConfig& stages);
  Tensor operator()(const Tensor& y) const;

 private:
  Conv stem_, head_;
  std::vector<UpSample> up_;
  std::vector<std::vector<Block>> stages_;
};

// h_a: y (1/64) -> z (1/256).
class HyperAnalysis : public StagedNet {
 public:
  HyperAnalysis(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& y) const;

 private:
  Conv stem_, head_;
  DownSample down1_, down2_;
};

// h_s: z_hat (1/256) -> Phi_hyper (1/64).
class HyperSynthesis : public StagedNet {
 public:
  HyperSynthesis(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& z_hat) const;

 private:
  Conv stem_, head_;
  UpSample up1_, up2_;
};

// Built-in stand-ins for the pre-trained encoders: a 1/8 primary source and
// a 1/16 auxiliary source. Both are local to 16x16 pixel blocks, so tiling
// on a 16-pixel grid reproduces the untiled output exactly.
class LatentSources {
 public:
  LatentSources(ParamSource& ps, const TransformConfig& cfg);
  // x: (n, 3, H, W) in [0, 1], H and W multiples of 16.
  Tensor Primary(const Tensor& x) const;    // (n, C_d, H/8, W/8)
  Tensor Auxiliary(const Tensor& x) const;  // (n, aux_source_channels, H/16, W/16)

 private:
  Conv primary_, aux1_, aux2_;
};

// Adapters that align both sources to 1/16 and concatenate them into l.
class LatentAdapters {
 public:
  LatentAdapters(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& src8, const Tensor& src16) const;

 private:
  DownSample primary_;
  Conv aux_;
};

// Toy pixel decoder standing in for the pre-trained VAE decoder:
// latent (1/8) -> RGB (1/1), offset to mid-gray. Output is not clamped.
class PixelDecoder : public StagedNet {
 public:
  PixelDecoder(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& latent) const;

 private:
  Conv stem_, head_;
  std::vector<UpSample> up_;
  std::vector<Conv> refine_;
};

// Small noise-prediction network: input is l_T plus a constant channel
// holding t / num_steps.
class ToyEpsilonNet : public StagedNet {
 public:
  ToyEpsilonNet(ParamSource& ps, const TransformConfig& cfg);
  Tensor operator()(const Tensor& l_t, double t_fraction) const;

 private:
  Conv conv1_, conv2_;
};

// Parameter networks of the 4-step autoregressive entropy model: one shared
// context trunk plus a private adapter, head and LRP net per step.
class ContextNets {
 public:
  static constexpr int kSteps = 4;
  ContextNets(ParamSource& ps, const TransformConfig& cfg);

  // Step is 0-based. Input is concat(Phi_hyper, masked decoded field).
  Tensor Features(int step, const Tensor& context_input) const;
  // (n, 2*C_y, h, w): mean channels then raw scale channels.
  Tensor Head(int step, const Tensor& features) const;
  // (n, C_y, h, w) residual before 0.5*tanh bounding.
  Tensor Lrp(int step, const Tensor& features, const Tensor& field) const;

 private:
  Conv shared1_, shared2_;
  std::vector<Conv> adapters_, heads_, lrp1_, lrp2_;
};

// Per-channel location/scale of the factorized prior on z.
struct FactorizedPriorParams {
  const Tensor* location = nullptr;  // (1, 1, 1, C_z)
  const Tensor* scale = nullptr;     // (1, 1, 1, C_z)
  FactorizedPriorParams(ParamSource& ps, const TransformConfig& cfg);
};

// All networks bound to one WeightStore.
struct CodecNets {
  explicit CodecNets(std::shared_ptr<const WeightStore> store);

  std::shared_ptr<const WeightStore> store;
  TransformConfig config;
  std::unique_ptr<LatentSources> sources;
  std::unique_ptr<LatentAdapters> adapters;
  std::unique_ptr<AnalysisTransform> analysis;
  std::unique_ptr<SynthesisTransform> synthesis;
  std::unique_ptr<SynthesisTransform> aux_decoder;
  std::unique_ptr<HyperAnalysis> hyper_analysis;
  std::unique_ptr<HyperSynthesis> hyper_synthesis;
  std::unique_ptr<ContextNets> context;
  std::unique_ptr<FactorizedPriorParams> z_prior;
  std::unique_ptr<PixelDecoder> pixel_decoder;
  std::unique_ptr<ToyEpsilonNet> epsilon;
};

// Every parameter any network requests for `cfg`, with zero values.
std::map<std::string, Tensor> WeightSchema(const TransformConfig& cfg);

// Deterministic pseudo-random weights (fan-in scaled uniform). Identical
// across platforms for a given seed.
WeightStore RandomWeights(const TransformConfig& cfg, uint64_t seed);

}  // namespace scodec

#endif  // SCODEC_NETS_H_
