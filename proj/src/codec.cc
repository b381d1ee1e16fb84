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

#include "scodec/codec.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <vector>

#include "scodec/color_fix.h"
#include "scodec/error.h"
#include "scodec/image.h"

namespace scodec {
namespace {

class ScopedTimer {
 public:
  ScopedTimer(StageTimings& timings, const char* stage)
      : timings_(timings), stage_(stage),
        start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    timings_.Add(stage_, std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count());
  }

 private:
  StageTimings& timings_;
  const char* stage_;
  std::chrono::steady_clock::time_point start_;
};

void CheckShape(const Tensor& t, const Shape& expected, const char* what) {
  if (!(t.shape() == expected)) {
    Fail(ErrorKind::kConfig, std::string(what) + " has shape " +
                                 t.shape().ToString() + ", expected " +
                                 expected.ToString());
  }
}

FactorizedPrior MakePrior(const CodecNets& nets) {
  return FactorizedPrior(nets.z_prior->location->span(),
                         nets.z_prior->scale->span());
}

Tensor Clamp01(Tensor t) {
  for (float& v : t.span()) v = std::clamp(v, 0.0f, 1.0f);
  return t;
}

}  // namespace

LatentShapes ComputeLatentShapes(int64_t width, int64_t height,
                                 const TransformConfig& cfg) {
  if (width < 1 || height < 1) {
    Fail(ErrorKind::kConfig, "image must be at least 1x1");
  }
  const int64_t h = RoundUp(height, kPadMultiple);
  const int64_t w = RoundUp(width, kPadMultiple);
  LatentShapes s;
  s.padded = {1, 3, h, w};
  s.src8 = {1, cfg.diffusion_channels, h / 8, w / 8};
  s.l = {1, cfg.latent_channels, h / 16, w / 16};
  s.y = {1, cfg.code_channels, h / 64, w / 64};
  s.z = {1, cfg.hyper_code_channels, h / 256, w / 256};
  s.l_t = {1, cfg.diffusion_channels, h / 8, w / 8};
  return s;
}

void StageTimings::Add(const std::string& stage, double seconds) {
  for (auto& [name, total] : entries_) {
    if (name == stage) {
      total += seconds;
      return;
    }
  }
  entries_.emplace_back(stage, seconds);
}

double StageTimings::Get(const std::string& stage) const {
  for (const auto& [name, total] : entries_) {
    if (name == stage) return total;
  }
  return 0.0;
}

EncodeResult EncodeImage(const Tensor& image, const CodecNets& nets,
                         const EncodeOptions& options) {
  if (image.n() != 1 || image.c() != 3) {
    Fail(ErrorKind::kConfig, "encode expects a (1, 3, H, W) image, got " +
                                 image.shape().ToString());
  }
  if (image.h() > std::numeric_limits<uint32_t>::max() ||
      image.w() > std::numeric_limits<uint32_t>::max()) {
    Fail(ErrorKind::kConfig, "image too large for the container");
  }
  if (options.timestep < 0 || options.timestep >= kDefaultScheduleSteps) {
    Fail(ErrorKind::kConfig,
         "timestep " + std::to_string(options.timestep) + " outside [0, " +
             std::to_string(kDefaultScheduleSteps) + ")");
  }
  const TransformConfig& cfg = nets.config;
  EncodeResult r;
  r.shapes = ComputeLatentShapes(image.w(), image.h(), cfg);
  const Tensor padded = PadReplicate(image, kPadMultiple);

  Tensor src8, src16;
  {
    ScopedTimer t(r.timings, "sources");
    TileOptions crop;
    crop.blend = TileBlend::kCrop;
    crop.align = 16;
    crop.downscale = 8;
    src8 = TileProcess(padded, options.tiles, crop, [&](const Tensor& tile) {
      return nets.sources->Primary(tile);
    });
    crop.downscale = 16;
    src16 = TileProcess(padded, options.tiles, crop, [&](const Tensor& tile) {
      return nets.sources->Auxiliary(tile);
    });
  }
  Tensor y, z;
  {
    ScopedTimer t(r.timings, "g_a");
    const Tensor l = (*nets.adapters)(src8, src16);
    CheckShape(l, r.shapes.l, "l");
    y = (*nets.analysis)(l);
    CheckShape(y, r.shapes.y, "y");
  }
  {
    ScopedTimer t(r.timings, "h_a");
    z = (*nets.hyper_analysis)(y);
    CheckShape(z, r.shapes.z, "z");
  }

  ScopedTimer t(r.timings, "entropy-encode");
  const FactorizedPrior prior = MakePrior(nets);
  const Quantized zq = prior.Quantize(z);
  r.symbols.z = zq.symbols;
  {
    RangeEncoder enc;
    prior.Encode(enc, z.shape(), zq.symbols);
    r.container.streams[0] = enc.Finish();
    r.estimate.z_bits = prior.Bits(zq.symbols, z.shape());
  }
  const Tensor phi = (*nets.hyper_synthesis)(zq.y_hat);

  const EntropyModel model(*nets.context, cfg);
  const auto y_groups = Partition(y);
  std::vector<Tensor> decoded;
  for (int step = 1; step <= kNumGroups; ++step) {
    const auto pred = model.Predict(phi, decoded, step);
    const Quantized q = Quantize(y_groups[step - 1], pred.params.mean);
    RangeEncoder enc;
    EncodeGaussianSymbols(enc, q.symbols, pred.params.scale.span());
    r.container.streams[step] = enc.Finish();
    r.estimate.group_bits[step - 1] =
        GaussianBits(q.symbols, pred.params.scale.span());
    r.symbols.groups[step - 1] = q.symbols;
    decoded.push_back(model.ApplyLrp(step, pred, decoded, q.y_hat));
  }
  r.y_hat = Merge(decoded);

  Header& h = r.container.header;
  h.width = static_cast<uint32_t>(image.w());
  h.height = static_cast<uint32_t>(image.h());
  h.model_id = nets.store->model_id();
  h.timestep = static_cast<uint16_t>(options.timestep);
  h.flags = options.tiles.enabled() ? kFlagTiled : 0;
  if (options.color_fix) {
    r.container.color = ToPayload(ComputeColorStats(image));
  }
  r.bytes = WriteContainer(r.container);
  return r;
}

DecodeResult DecodeImage(std::span<const uint8_t> bytes, const CodecNets& nets,
                         const DecodeOptions& options) {
  DecodeResult r;
  const Container c = ReadContainer(bytes);
  r.header = c.header;
  if (c.header.model_id != nets.store->model_id()) {
    Fail(ErrorKind::kModelMismatch,
         "container was made with model " + ModelIdHex(c.header.model_id) +
             " but the loaded weights are " +
             ModelIdHex(nets.store->model_id()));
  }
  const NoiseSchedule schedule = NoiseSchedule::Linear();
  if (c.header.timestep >= schedule.steps()) {
    Fail(ErrorKind::kFormat, "timestep " + std::to_string(c.header.timestep) +
                                 " at offset 22 exceeds the schedule");
  }
  const TransformConfig& cfg = nets.config;
  const LatentShapes shapes =
      ComputeLatentShapes(c.header.width, c.header.height, cfg);

  {
    ScopedTimer t(r.timings, "entropy-decode");
    const FactorizedPrior prior = MakePrior(nets);
    {
      RangeDecoder dec(c.streams[0]);
      r.symbols.z = prior.Decode(dec, shapes.z);
      dec.ExpectEnd();
    }
    const Tensor z_hat = prior.Dequantize(r.symbols.z, shapes.z);
    const Tensor phi = (*nets.hyper_synthesis)(z_hat);
    const EntropyModel model(*nets.context, cfg);
    std::vector<Tensor> decoded;
    for (int step = 1; step <= kNumGroups; ++step) {
      const auto pred = model.Predict(phi, decoded, step);
      RangeDecoder dec(c.streams[step]);
      r.symbols.groups[step - 1] =
          DecodeGaussianSymbols(dec, pred.params.scale.span());
      dec.ExpectEnd();
      const Tensor y_hat_group =
          Dequantize(r.symbols.groups[step - 1], pred.params.mean);
      decoded.push_back(model.ApplyLrp(step, pred, decoded, y_hat_group));
    }
    r.y_hat = Merge(decoded);
  }
  {
    ScopedTimer t(r.timings, "g_s");
    r.l_t = (*nets.synthesis)(r.y_hat);
    CheckShape(r.l_t, shapes.l_t, "l_T");
  }
  Tensor aux;
  {
    ScopedTimer t(r.timings, "aux");
    aux = (*nets.aux_decoder)(r.y_hat);
    CheckShape(aux, shapes.l_t, "auxiliary residual");
  }

  const ZeroPredictor zero;
  const EpsilonPredictor& predictor =
      options.predictor != nullptr ? *options.predictor : zero;
  const int64_t cd = cfg.diffusion_channels;
  TileOptions blend;
  blend.blend = TileBlend::kGaussian;
  blend.upscale = 8;
  blend.margin = predictor.Margin() + nets.pixel_decoder->Margin();
  const Tensor padded = TileProcess(
      ConcatChannels(r.l_t, aux), options.tiles.Scaled(8), blend,
      [&](const Tensor& tile) {
        Tensor latent;
        {
          ScopedTimer t(r.timings, "denoise");
          latent = OneStepDenoise(SliceChannels(tile, 0, cd), schedule,
                                  c.header.timestep, predictor);
          AddInPlace(latent, SliceChannels(tile, cd, cd));
        }
        ScopedTimer t(r.timings, "pixel-decode");
        return (*nets.pixel_decoder)(latent);
      });
  CheckShape(padded, shapes.padded, "reconstruction");

  const Tensor cropped = Crop(padded, 0, 0, c.header.height, c.header.width);
  r.unfixed = Clamp01(cropped);
  if (c.color && options.apply_color_fix) {
    ScopedTimer t(r.timings, "color-fix");
    r.image = ColorFix(cropped, FromPayload(*c.color), /*clamp=*/true);
  } else {
    r.image = r.unfixed;
  }
  return r;
}

}  // namespace scodec
