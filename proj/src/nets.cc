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

#include "scodec/nets.h"

#include <cmath>
#include <random>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr Activation kGelu = Activation::kGeluTanh;

Tensor Gelu(Tensor t) {
  ApplyInPlace(t, kGelu);
  return t;
}

std::string Sub(const std::string& prefix, const std::string& name) {
  return prefix + "." + name;
}

Tensor MultiplyInPlace(Tensor a, const Tensor& b) {
  float* dst = a.data();
  const float* src = b.data();
  for (size_t i = 0; i < a.size(); ++i) dst[i] *= src[i];
  return a;
}

}  // namespace

const Tensor& SchemaRecorder::Get(const std::string& name,
                                  const Shape& shape) {
  auto [it, inserted] = params_.try_emplace(name, shape);
  if (!inserted && !(it->second.shape() == shape)) {
    Fail(ErrorKind::kSchema, "parameter '" + name +
                                 "' requested with two shapes");
  }
  return it->second;
}

Conv::Conv(ParamSource& ps, const std::string& name, ConvSpec s) : spec(s) {
  spec.Validate();
  weight = &ps.Get(name + ".weight", spec.WeightShape());
  bias = &ps.Get(name + ".bias", {1, 1, 1, spec.out_channels});
}

Tensor Conv::operator()(const Tensor& x) const {
  return Conv2d(x, *weight, bias->span(), spec);
}

Conv SameConv(ParamSource& ps, const std::string& name, int64_t in,
              int64_t out, int64_t kernel, int64_t groups) {
  ConvSpec spec;
  spec.in_channels = in;
  spec.out_channels = out;
  spec.kernel_h = spec.kernel_w = kernel;
  spec.padding = kernel / 2;
  spec.groups = groups;
  return Conv(ps, name, spec);
}

DownSample::DownSample(ParamSource& ps, const std::string& name, int64_t in,
                       int64_t out, int64_t f)
    : proj(SameConv(ps, Sub(name, "proj"), in * f * f, out, 1)), factor(f) {}

Tensor DownSample::operator()(const Tensor& x) const {
  return proj(PixelUnshuffle(x, factor));
}

UpSample::UpSample(ParamSource& ps, const std::string& name, int64_t in,
                   int64_t out)
    : proj(SameConv(ps, Sub(name, "proj"), in, out * 4, 1)) {}

Tensor UpSample::operator()(const Tensor& x) const {
  return PixelShuffle(proj(x), 2);
}

Block::Block(ParamSource& ps, const std::string& name, BlockKind kind,
             int64_t channels, const TransformConfig& cfg)
    : kind_(kind), channels_(channels) {
  switch (kind) {
    case BlockKind::kInceptionDw: {
      branch_ = channels / 4;
      const int64_t k = cfg.band_kernel;
      if (branch_ > 0) {
        a_ = SameConv(ps, Sub(name, "dw_square"), branch_, branch_, 3, branch_);
        ConvSpec row;
        row.in_channels = row.out_channels = row.groups = branch_;
        row.kernel_h = 1;
        row.kernel_w = k;
        row.padding = 0;
        row.padding_w = k / 2;
        b_ = Conv(ps, Sub(name, "dw_band_w"), row);
        ConvSpec col = row;
        col.kernel_h = k;
        col.kernel_w = 1;
        col.padding = k / 2;
        col.padding_w = 0;
        c_ = Conv(ps, Sub(name, "dw_band_h"), col);
      }
      fc1_ = SameConv(ps, Sub(name, "fc1"), channels, channels * cfg.mlp_ratio,
                      1);
      fc2_ = SameConv(ps, Sub(name, "fc2"), channels * cfg.mlp_ratio, channels,
                      1);
      break;
    }
    case BlockKind::kGatedCnn: {
      const int64_t hidden = channels * cfg.gated_expand;
      fc1_ = SameConv(ps, Sub(name, "fc1"), channels, 2 * hidden, 1);
      a_ = SameConv(ps, Sub(name, "dw_gate"), hidden, hidden, cfg.gated_kernel,
                    hidden);
      fc2_ = SameConv(ps, Sub(name, "fc2"), hidden, channels, 1);
      break;
    }
    case BlockKind::kPlainConv: {
      a_ = SameConv(ps, Sub(name, "conv1"), channels, channels, 3);
      fc2_ = SameConv(ps, Sub(name, "conv2"), channels, channels, 3);
      break;
    }
  }
}

double Block::Margin() const {
  switch (kind_) {
    case BlockKind::kInceptionDw:
      return branch_ > 0 ? static_cast<double>(b_.spec.kernel_w / 2) : 0.0;
    case BlockKind::kGatedCnn:
      return static_cast<double>(a_.spec.kernel_h / 2);
    case BlockKind::kPlainConv:
      return 2.0;
  }
  return 0.0;
}

Tensor Block::operator()(const Tensor& x) const {
  Tensor update;
  switch (kind_) {
    case BlockKind::kInceptionDw: {
      // Token mixing: three depthwise branches over the leading channel
      // groups, identity over the rest.
      Tensor mixed = x;
      if (branch_ > 0) {
        const Tensor sq = a_(SliceChannels(x, 0, branch_));
        const Tensor bw = b_(SliceChannels(x, branch_, branch_));
        const Tensor bh = c_(SliceChannels(x, 2 * branch_, branch_));
        const size_t plane = static_cast<size_t>(x.h() * x.w());
        for (int64_t n = 0; n < x.n(); ++n) {
          std::copy_n(sq.Plane(n, 0).data(), plane * branch_,
                      mixed.Plane(n, 0).data());
          std::copy_n(bw.Plane(n, 0).data(), plane * branch_,
                      mixed.Plane(n, branch_).data());
          std::copy_n(bh.Plane(n, 0).data(), plane * branch_,
                      mixed.Plane(n, 2 * branch_).data());
        }
      }
      update = fc2_(Gelu(fc1_(mixed)));
      break;
    }
    case BlockKind::kGatedCnn: {
      const Tensor h = fc1_(x);
      const int64_t hidden = h.c() / 2;
      Tensor gate = a_(SliceChannels(h, 0, hidden));
      ApplyInPlace(gate, Activation::kSigmoid);
      update = fc2_(MultiplyInPlace(std::move(gate),
                                    SliceChannels(h, hidden, hidden)));
      break;
    }
    case BlockKind::kPlainConv:
      update = fc2_(Gelu(a_(x)));
      break;
  }
  AddInPlace(update, x);
  return update;
}

AnalysisTransform::AnalysisTransform(ParamSource& ps,
                                     const TransformConfig& cfg) {
  const auto& st = cfg.analysis;
  const int64_t ch = st.channels;
  stem_ = SameConv(ps, "g_a.stem", cfg.latent_channels, ch, 3);
  margin_ = 1.0;
  double scale = 1.0;
  for (size_t s = 0; s < st.depths.size(); ++s) {
    if (s > 0) {
      down_.emplace_back(ps, "g_a.down" + std::to_string(s), ch, ch);
      margin_ += scale;
      scale *= 2.0;
    }
    stages_.emplace_back();
    for (int64_t b = 0; b < st.depths[s]; ++b) {
      stages_.back().emplace_back(
          ps, "g_a.stage" + std::to_string(s) + ".block" + std::to_string(b),
          st.kinds[s], ch, cfg);
      margin_ += stages_.back().back().Margin() * scale;
    }
  }
  head_ = SameConv(ps, "g_a.head", ch, cfg.code_channels, 3);
  margin_ += scale;
  scale_ = 1.0 / scale;
}

Tensor AnalysisTransform::operator()(const Tensor& l) const {
  Tensor x = stem_(l);
  for (size_t s = 0; s < stages_.size(); ++s) {
    if (s > 0) x = down_[s - 1](x);
    for (const auto& block : stages_[s]) x = block(x);
  }
  return head_(x);
}

SynthesisTransform::SynthesisTransform(ParamSource& ps,
                                       const TransformConfig& cfg,
                                       const std::string& prefix,
                                       const StageConfig& st) {
  const int64_t ch = st.channels;
  stem_ = SameConv(ps, Sub(prefix, "stem"), cfg.code_channels, ch, 3);
  margin_ = 1.0;
  double scale = 1.0;
  for (size_t s = 0; s < st.depths.size(); ++s) {
    if (s > 0) {
      up_.emplace_back(ps, Sub(prefix, "up" + std::to_string(s)), ch, ch);
      scale *= 0.5;
    }
    stages_.emplace_back();
    for (int64_t b = 0; b < st.depths[s]; ++b) {
      stages_.back().emplace_back(
          ps,
          Sub(prefix, "stage" + std::to_string(s) + ".block" +
                          std::to_string(b)),
          st.kinds[s], ch, cfg);
      margin_ += stages_.back().back().Margin() * scale;
    }
  }
  head_ = SameConv(ps, Sub(prefix, "head"), ch, cfg.diffusion_channels, 3);
  margin_ += scale;
  scale_ = 1.0 / scale;
}

Tensor SynthesisTransform::operator()(const Tensor& y) const {
  Tensor x = stem_(y);
  for (size_t s = 0; s < stages_.size(); ++s) {
    if (s > 0) x = up_[s - 1](x);
    for (const auto& block : stages_[s]) x = block(x);
  }
  return head_(x);
}

HyperAnalysis::HyperAnalysis(ParamSource& ps, const TransformConfig& cfg) {
  const int64_t ch = cfg.hyper_channels;
  stem_ = SameConv(ps, "h_a.stem", cfg.code_channels, ch, 3);
  down1_ = DownSample(ps, "h_a.down1", ch, ch);
  down2_ = DownSample(ps, "h_a.down2", ch, ch);
  head_ = SameConv(ps, "h_a.head", ch, cfg.hyper_code_channels, 3);
  scale_ = 0.25;
  margin_ = 1.0 + 1.0 + 2.0 + 4.0;
}

Tensor HyperAnalysis::operator()(const Tensor& y) const {
  Tensor x = Gelu(stem_(y));
  x = Gelu(down1_(x));
  x = Gelu(down2_(x));
  return head_(x);
}

HyperSynthesis::HyperSynthesis(ParamSource& ps, const TransformConfig& cfg) {
  const int64_t ch = cfg.hyper_channels;
  stem_ = SameConv(ps, "h_s.stem", cfg.hyper_code_channels, ch, 3);
  up1_ = UpSample(ps, "h_s.up1", ch, ch);
  up2_ = UpSample(ps, "h_s.up2", ch, ch);
  head_ = SameConv(ps, "h_s.head", ch, cfg.phi_channels, 3);
  scale_ = 4.0;
  margin_ = 1.0 + 0.25;
}

Tensor HyperSynthesis::operator()(const Tensor& z_hat) const {
  Tensor x = Gelu(stem_(z_hat));
  x = Gelu(up1_(x));
  x = Gelu(up2_(x));
  return head_(x);
}

LatentSources::LatentSources(ParamSource& ps, const TransformConfig& cfg) {
  primary_ = SameConv(ps, "sources.primary", 3 * 64, cfg.diffusion_channels, 1);
  aux1_ = SameConv(ps, "sources.aux1", 3 * 256, cfg.aux_source_channels, 1);
  aux2_ = SameConv(ps, "sources.aux2", cfg.aux_source_channels,
                   cfg.aux_source_channels, 1);
}

namespace {

Tensor Centered(const Tensor& x) {
  Tensor out = x;
  for (float& v : out.span()) v = 2.0f * v - 1.0f;
  return out;
}

}  // namespace

Tensor LatentSources::Primary(const Tensor& x) const {
  return primary_(PixelUnshuffle(Centered(x), 8));
}

Tensor LatentSources::Auxiliary(const Tensor& x) const {
  return aux2_(Gelu(aux1_(PixelUnshuffle(Centered(x), 16))));
}

LatentAdapters::LatentAdapters(ParamSource& ps, const TransformConfig& cfg)
    : primary_(ps, "adapters.primary", cfg.diffusion_channels,
               cfg.latent_channels / 2),
      aux_(SameConv(ps, "adapters.aux", cfg.aux_source_channels,
                    cfg.latent_channels / 2, 3)) {}

Tensor LatentAdapters::operator()(const Tensor& src8,
                                  const Tensor& src16) const {
  Tensor a = primary_(src8);
  Tensor b = aux_(src16);
  if (a.h() != b.h() || a.w() != b.w() || a.n() != b.n()) {
    Fail(ErrorKind::kConfig, "latent sources disagree after adapters: " +
                                 a.shape().ToString() + " vs " +
                                 b.shape().ToString());
  }
  return ConcatChannels(a, b);
}

PixelDecoder::PixelDecoder(ParamSource& ps, const TransformConfig& cfg) {
  const auto& ch = cfg.decoder_channels;
  stem_ = SameConv(ps, "pixel_dec.stem", cfg.diffusion_channels, ch[0], 3);
  margin_ = 1.0;
  double scale = 1.0;
  for (size_t s = 1; s < ch.size(); ++s) {
    up_.emplace_back(ps, "pixel_dec.up" + std::to_string(s), ch[s - 1], ch[s]);
    scale *= 0.5;
    refine_.push_back(SameConv(ps, "pixel_dec.refine" + std::to_string(s),
                               ch[s], ch[s], 3));
    margin_ += scale;
  }
  head_ = SameConv(ps, "pixel_dec.head", ch.back(), 3, 3);
  margin_ += scale;
  scale_ = 1.0 / scale;
}

Tensor PixelDecoder::operator()(const Tensor& latent) const {
  Tensor x = Gelu(stem_(latent));
  for (size_t s = 0; s < up_.size(); ++s) {
    x = Gelu(up_[s](x));
    x = Gelu(refine_[s](x));
  }
  Tensor out = head_(x);
  for (float& v : out.span()) v += 0.5f;
  return out;
}

ToyEpsilonNet::ToyEpsilonNet(ParamSource& ps, const TransformConfig& cfg) {
  conv1_ = SameConv(ps, "eps.conv1", cfg.diffusion_channels + 1,
                    cfg.predictor_channels, 3);
  conv2_ = SameConv(ps, "eps.conv2", cfg.predictor_channels,
                    cfg.diffusion_channels, 3);
  margin_ = 2.0;
}

Tensor ToyEpsilonNet::operator()(const Tensor& l_t, double t_fraction) const {
  Tensor t_plane({l_t.n(), 1, l_t.h(), l_t.w()},
                 static_cast<float>(t_fraction));
  return conv2_(Gelu(conv1_(ConcatChannels(l_t, t_plane))));
}

ContextNets::ContextNets(ParamSource& ps, const TransformConfig& cfg) {
  const int64_t in = cfg.phi_channels + cfg.code_channels;
  const int64_t m = cfg.context_channels;
  shared1_ = SameConv(ps, "ctx.shared1", m, m, 3);
  shared2_ = SameConv(ps, "ctx.shared2", m, m, 3);
  for (int i = 0; i < kSteps; ++i) {
    const std::string step = std::to_string(i + 1);
    adapters_.push_back(SameConv(ps, "ctx.adapter" + step, in, m, 1));
    heads_.push_back(
        SameConv(ps, "ctx.head" + step, m, 2 * cfg.code_channels, 1));
    lrp1_.push_back(SameConv(ps, "ctx.lrp" + step + ".conv1",
                             m + cfg.code_channels, cfg.lrp_channels, 3));
    lrp2_.push_back(SameConv(ps, "ctx.lrp" + step + ".conv2",
                             cfg.lrp_channels, cfg.code_channels, 1));
  }
}

Tensor ContextNets::Features(int step, const Tensor& context_input) const {
  Tensor x = Gelu(adapters_.at(step)(context_input));
  x = Gelu(shared1_(x));
  return Gelu(shared2_(x));
}

Tensor ContextNets::Head(int step, const Tensor& features) const {
  return heads_.at(step)(features);
}

Tensor ContextNets::Lrp(int step, const Tensor& features,
                        const Tensor& field) const {
  return lrp2_.at(step)(Gelu(lrp1_.at(step)(ConcatChannels(features, field))));
}

FactorizedPriorParams::FactorizedPriorParams(ParamSource& ps,
                                             const TransformConfig& cfg) {
  location = &ps.Get("z_prior.location", {1, 1, 1, cfg.hyper_code_channels});
  scale = &ps.Get("z_prior.scale", {1, 1, 1, cfg.hyper_code_channels});
}

namespace {

template <typename Visit>
void BuildAll(ParamSource& ps, const TransformConfig& cfg, Visit&& visit) {
  visit(std::make_unique<LatentSources>(ps, cfg));
  visit(std::make_unique<LatentAdapters>(ps, cfg));
  visit(std::make_unique<AnalysisTransform>(ps, cfg));
  visit(std::make_unique<SynthesisTransform>(ps, cfg, "g_s", cfg.synthesis));
  visit(std::make_unique<SynthesisTransform>(ps, cfg, "aux_dec",
                                             cfg.aux_decoder));
  visit(std::make_unique<HyperAnalysis>(ps, cfg));
  visit(std::make_unique<HyperSynthesis>(ps, cfg));
  visit(std::make_unique<ContextNets>(ps, cfg));
  visit(std::make_unique<FactorizedPriorParams>(ps, cfg));
  visit(std::make_unique<PixelDecoder>(ps, cfg));
  visit(std::make_unique<ToyEpsilonNet>(ps, cfg));
}

}  // namespace

CodecNets::CodecNets(std::shared_ptr<const WeightStore> s)
    : store(std::move(s)), config(store->config()) {
  StoreParams ps(*store);
  sources = std::make_unique<LatentSources>(ps, config);
  adapters = std::make_unique<LatentAdapters>(ps, config);
  analysis = std::make_unique<AnalysisTransform>(ps, config);
  synthesis =
      std::make_unique<SynthesisTransform>(ps, config, "g_s", config.synthesis);
  aux_decoder = std::make_unique<SynthesisTransform>(ps, config, "aux_dec",
                                                     config.aux_decoder);
  hyper_analysis = std::make_unique<HyperAnalysis>(ps, config);
  hyper_synthesis = std::make_unique<HyperSynthesis>(ps, config);
  context = std::make_unique<ContextNets>(ps, config);
  z_prior = std::make_unique<FactorizedPriorParams>(ps, config);
  pixel_decoder = std::make_unique<PixelDecoder>(ps, config);
  epsilon = std::make_unique<ToyEpsilonNet>(ps, config);
}

std::map<std::string, Tensor> WeightSchema(const TransformConfig& cfg) {
  cfg.Validate();
  SchemaRecorder recorder;
  BuildAll(recorder, cfg, [](auto&&) {});
  return recorder.params();
}

namespace {

// Residual-branch outputs and entropy heads start smaller so random
// networks stay well inside float range.
double InitGain(const std::string& name) {
  for (const char* tag : {".fc2.", ".conv2.", "ctx.head", ".lrp"}) {
    if (name.find(tag) != std::string::npos) return 0.5;
  }
  return 1.0;
}

}  // namespace

WeightStore RandomWeights(const TransformConfig& cfg, uint64_t seed) {
  auto params = WeightSchema(cfg);
  std::mt19937_64 rng(seed);
  // mt19937_64 output is fully specified by the standard; the mapping to
  // [0, 1) is done here rather than with a distribution object.
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return static_cast<float>(lo + (hi - lo) * u);
  };
  for (auto& [name, t] : params) {
    const bool is_weight = name.size() > 7 &&
                           name.compare(name.size() - 7, 7, ".weight") == 0;
    if (name == "z_prior.location") {
      for (float& v : t.span()) v = uniform(-0.3, 0.3);
    } else if (name == "z_prior.scale") {
      for (float& v : t.span()) v = uniform(0.3, 1.5);
    } else if (is_weight) {
      const double fan_in = static_cast<double>(t.c() * t.h() * t.w());
      const double bound = InitGain(name) * std::sqrt(3.0 / fan_in);
      for (float& v : t.span()) v = uniform(-bound, bound);
    } else {
      for (float& v : t.span()) v = uniform(-0.02, 0.02);
    }
  }
  return WeightStore(cfg, std::move(params));
}

}  // namespace scodec
