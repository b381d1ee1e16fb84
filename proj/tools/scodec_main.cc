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

// scodec: command-line front end. See README.md for the subcommands, the
// config file format and the exit codes.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scodec/codec.h"
#include "scodec/color_fix.h"
#include "scodec/config.h"
#include "scodec/container.h"
#include "scodec/diffusion.h"
#include "scodec/error.h"
#include "scodec/eval.h"
#include "scodec/image.h"
#include "scodec/metrics.h"
#include "scodec/nets.h"
#include "scodec/parallel.h"
#include "scodec/weights.h"

namespace scodec {
namespace {

constexpr int kExitIo = 1;
constexpr int kExitFormat = 2;
constexpr int kExitModel = 3;
constexpr int kExitUsage = 4;

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kFormat:
    case ErrorKind::kCorrupt:
    case ErrorKind::kDecode:
      return kExitFormat;
    case ErrorKind::kModelMismatch:
      return kExitModel;
    case ErrorKind::kConfig:
    case ErrorKind::kSchema:
    case ErrorKind::kSequencing:
      return kExitUsage;
  }
  return kExitUsage;
}

struct GlobalArgs {
  std::string weights;
  int threads = 0;
  bool verbose = false;
};

struct TileArgs {
  int64_t size = 0;
  int64_t overlap = -1;

  void Register(CLI::App* app) {
    app->add_option("--tile", size,
                    "Tile size in image pixels (multiple of 256, 0 = off)");
    app->add_option("--overlap", overlap,
                    "Tile overlap in image pixels (default min(512, tile/2))");
  }
  TileConfig Get() const {
    TileConfig t;
    t.size = size;
    if (size > 0) {
      if (size % kPadMultiple != 0) {
        Fail(ErrorKind::kConfig, "--tile must be a multiple of 256");
      }
      t.overlap = overlap >= 0 ? overlap : std::min<int64_t>(512, size / 2);
      if (t.overlap % 16 != 0) {
        Fail(ErrorKind::kConfig, "--overlap must be a multiple of 16");
      }
    }
    t.Validate();
    return t;
  }
};

std::shared_ptr<const CodecNets> LoadNets(const GlobalArgs& g) {
  if (g.weights.empty()) {
    Fail(ErrorKind::kConfig,
         "no weights given; pass --weights or set SCODEC_WEIGHTS");
  }
  auto store = std::make_shared<const WeightStore>(LoadWeights(g.weights));
  return std::make_shared<const CodecNets>(store);
}

std::string Fixed(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

void PrintEncodeStats(const EncodeResult& r) {
  const Header& h = r.container.header;
  std::cout << "bytes=" << r.bytes.size() << " bpp="
            << Fixed(BitsPerPixel(r.bytes.size(), h.width, h.height), 6)
            << " z_bits=" << r.container.streams[0].size() * 8;
  for (int g = 0; g < kNumGroups; ++g) {
    std::cout << " g" << g + 1
              << "_bits=" << r.container.streams[g + 1].size() * 8;
  }
  std::cout << " color_bits=" << (r.container.color ? 96 : 0) << "\n";
}

void PrintHeader(const Container& c, size_t file_bytes) {
  const Header& h = c.header;
  std::cout << "format      SCBS v" << h.version << "\n"
            << "width       " << h.width << "\n"
            << "height      " << h.height << "\n"
            << "model_id    " << ModelIdHex(h.model_id) << "\n"
            << "timestep    " << h.timestep << "\n"
            << "flags       0x" << std::hex << h.flags << std::dec
            << ((h.flags & kFlagColorFix) ? " color-fix" : "")
            << ((h.flags & kFlagTiled) ? " tiled" : "") << "\n";
  if (c.color) {
    const ColorStats s = FromPayload(*c.color);
    std::cout << "color_mean  " << Fixed(s.mean[0], 6) << " "
              << Fixed(s.mean[1], 6) << " " << Fixed(s.mean[2], 6) << "\n"
              << "color_std   " << Fixed(s.stddev[0], 6) << " "
              << Fixed(s.stddev[1], 6) << " " << Fixed(s.stddev[2], 6)
              << "\n";
  }
  static const char* kNames[kStreamCount] = {"z", "g1", "g2", "g3", "g4"};
  std::cout << "streams\n";
  for (size_t i = 0; i < kStreamCount; ++i) {
    std::cout << "  " << kNames[i] << "\t" << c.streams[i].size()
              << " bytes\n";
  }
  std::cout << "file_bytes  " << file_bytes << "\n"
            << "bpp         "
            << Fixed(BitsPerPixel(file_bytes, h.width, h.height), 6) << "\n";
}

void PrintWeightInfo(const WeightStore& store) {
  size_t values = 0;
  for (const auto& [name, t] : store.params()) values += t.size();
  std::cout << "format      SCWT v" << kWeightFormatVersion << "\n"
            << "model_id    " << ModelIdHex(store.model_id()) << "\n"
            << "parameters  " << store.params().size() << " tensors, "
            << values << " values\n"
            << "config\n";
  std::cout << store.config_text();
}

int Run(int argc, char** argv) {
  CLI::App app{"scodec: latent image codec"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value options file ([subcommand] sections)");
  GlobalArgs g;
  app.add_option("-w,--weights", g.weights, "Weight file (SCWT)")
      ->envname("SCODEC_WEIGHTS");
  app.add_option("--threads", g.threads, "Worker thread cap (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", g.verbose, "Per-stage timings on stderr");

  // encode
  std::string enc_in, enc_out;
  bool enc_no_color = false;
  int enc_timestep = kDefaultTimestep;
  TileArgs enc_tiles;
  auto* encode = app.add_subcommand("encode", "Compress an image");
  encode->add_option("input", enc_in, "PNG or PPM image")->required();
  encode->add_option("output", enc_out, "Container file")->required();
  encode->add_flag("--no-color-fix", enc_no_color, "Omit the color payload");
  encode->add_option("--timestep", enc_timestep, "Denoising timestep index")
      ->check(CLI::Range(0, kDefaultScheduleSteps - 1));
  enc_tiles.Register(encode);

  // decode
  std::string dec_in, dec_out, dec_predictor = "zero";
  bool dec_no_color = false;
  TileArgs dec_tiles;
  auto* decode = app.add_subcommand("decode", "Reconstruct an image");
  decode->add_option("input", dec_in, "Container file")->required();
  decode->add_option("output", dec_out, "PNG (or .ppm) output")->required();
  decode->add_option("--predictor", dec_predictor, "Noise predictor")
      ->check(CLI::IsMember({"zero", "toy"}));
  decode->add_flag("--no-color-fix", dec_no_color,
                   "Ignore the color payload");
  dec_tiles.Register(decode);

  // roundtrip
  std::string rt_in, rt_out, rt_predictor = "zero";
  TileArgs rt_tiles;
  auto* roundtrip =
      app.add_subcommand("roundtrip", "Encode, decode and verify symbols");
  roundtrip->add_option("input", rt_in, "PNG or PPM image")->required();
  roundtrip->add_option("-o,--output", rt_out, "Write the reconstruction");
  roundtrip->add_option("--predictor", rt_predictor, "Noise predictor")
      ->check(CLI::IsMember({"zero", "toy"}));
  rt_tiles.Register(roundtrip);

  // inspect
  std::string insp_in;
  auto* inspect = app.add_subcommand(
      "inspect", "Print a container's header and stream table, or weight info");
  inspect->add_option("file", insp_in, "Container or weight file")->required();

  // eval
  std::string ev_dir, ev_report, ev_svg, ev_predictor = "zero";
  std::vector<std::string> ev_weights, ev_lambdas;
  auto* eval = app.add_subcommand("eval", "Evaluate a directory of images");
  eval->add_option("dir", ev_dir, "Image directory")->required();
  eval->add_option("--model", ev_weights,
                   "Weight file per rate point (repeatable; default --weights)");
  eval->add_option("--lambda", ev_lambdas, "Label per --model");
  eval->add_option("--report", ev_report, "TSV output (default stdout)");
  eval->add_option("--svg", ev_svg, "Rate-PSNR chart output");
  eval->add_option("--predictor", ev_predictor, "Noise predictor")
      ->check(CLI::IsMember({"zero", "toy"}));

  // bench
  std::string bench_in, bench_predictor = "zero";
  int bench_runs = 10, bench_warmup = 1;
  auto* bench = app.add_subcommand("bench", "Per-stage timing");
  bench->add_option("input", bench_in, "PNG or PPM image")->required();
  bench->add_option("--runs", bench_runs, "Timed runs")
      ->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bench_warmup, "Untimed runs")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--predictor", bench_predictor, "Noise predictor")
      ->check(CLI::IsMember({"zero", "toy"}));

  // init-weights
  std::string init_out, init_arch;
  uint64_t init_seed = 1;
  auto* init = app.add_subcommand("init-weights",
                                  "Write deterministic random weights");
  init->add_option("output", init_out, "Weight file")->required();
  init->add_option("--seed", init_seed, "Generator seed");
  init->add_option("--arch", init_arch, "Architecture key=value file");

  // schema
  std::string schema_arch;
  auto* schema =
      app.add_subcommand("schema", "List every parameter the networks need");
  schema->add_option("--arch", schema_arch, "Architecture key=value file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  SetThreadLimit(g.threads);

  auto report_timings = [&](const StageTimings& t) {
    if (!g.verbose) return;
    for (const auto& [stage, secs] : t.entries()) {
      std::cerr << stage << "\t" << Fixed(secs * 1e3, 2) << " ms\n";
    }
  };
  auto arch = [](const std::string& path) {
    if (path.empty()) return TransformConfig{};
    return TransformConfig::FromKeyValues(LoadKeyValueFile(path));
  };

  if (*encode) {
    const auto nets = LoadNets(g);
    EncodeOptions opt;
    opt.color_fix = !enc_no_color;
    opt.timestep = enc_timestep;
    opt.tiles = enc_tiles.Get();
    const EncodeResult r = EncodeImage(ReadImage(enc_in), *nets, opt);
    WriteFileBytes(enc_out, r.bytes);
    PrintEncodeStats(r);
    report_timings(r.timings);
  } else if (*decode) {
    const auto nets = LoadNets(g);
    const auto predictor =
        MakePredictor(dec_predictor, *nets->epsilon, kDefaultScheduleSteps);
    DecodeOptions opt;
    opt.predictor = predictor.get();
    opt.tiles = dec_tiles.Get();
    opt.apply_color_fix = !dec_no_color;
    const DecodeResult r = DecodeImage(ReadFileBytes(dec_in), *nets, opt);
    WriteImage(dec_out, r.image);
    std::cout << "width=" << r.image.w() << " height=" << r.image.h() << "\n";
    report_timings(r.timings);
  } else if (*roundtrip) {
    const auto nets = LoadNets(g);
    const auto predictor =
        MakePredictor(rt_predictor, *nets->epsilon, kDefaultScheduleSteps);
    const Tensor image = ReadImage(rt_in);
    EncodeOptions eopt;
    eopt.tiles = rt_tiles.Get();
    const EncodeResult enc = EncodeImage(image, *nets, eopt);
    DecodeOptions dopt;
    dopt.predictor = predictor.get();
    dopt.tiles = eopt.tiles;
    const DecodeResult dec = DecodeImage(enc.bytes, *nets, dopt);
    const bool lossless = enc.symbols == dec.symbols;
    PrintEncodeStats(enc);
    std::cout << "symbols: " << (lossless ? "LOSSLESS" : "MISMATCH") << "\n"
              << "psnr=" << Fixed(Psnr(image, QuantizeTo8Bit(dec.image)), 4)
              << " dB\n";
    if (!rt_out.empty()) WriteImage(rt_out, dec.image);
    report_timings(enc.timings);
    report_timings(dec.timings);
    if (!lossless) return kExitFormat;
  } else if (*inspect) {
    const Bytes bytes = ReadFileBytes(insp_in);
    if (bytes.size() >= 4 && bytes[0] == 'S' && bytes[1] == 'C' &&
        bytes[2] == 'W' && bytes[3] == 'T') {
      PrintWeightInfo(WeightStore::Deserialize(bytes));
    } else {
      PrintHeader(ReadContainer(bytes), bytes.size());
    }
  } else if (*eval) {
    if (ev_weights.empty()) {
      if (g.weights.empty()) {
        Fail(ErrorKind::kConfig, "eval needs --model or --weights");
      }
      ev_weights.push_back(g.weights);
    }
    if (!ev_lambdas.empty() && ev_lambdas.size() != ev_weights.size()) {
      Fail(ErrorKind::kConfig, "give one --lambda per --model");
    }
    std::vector<std::shared_ptr<const CodecNets>> nets;
    std::vector<std::unique_ptr<EpsilonPredictor>> predictors;
    std::vector<EvalModel> models;
    for (size_t i = 0; i < ev_weights.size(); ++i) {
      GlobalArgs one = g;
      one.weights = ev_weights[i];
      nets.push_back(LoadNets(one));
      models.push_back({ev_lambdas.empty() ? std::to_string(i) : ev_lambdas[i],
                        nets.back().get()});
    }
    if (ev_predictor == "toy" && nets.size() > 1) {
      Fail(ErrorKind::kConfig, "--predictor toy supports a single model");
    }
    predictors.push_back(
        MakePredictor(ev_predictor, *nets[0]->epsilon, kDefaultScheduleSteps));
    EvalOptions opt;
    opt.decode.predictor = predictors[0].get();
    opt.warn = [](const std::string& msg) {
      std::cerr << "warning: skipped " << msg << "\n";
    };
    const EvalReport report = EvalCorpus(ev_dir, models, opt);
    if (ev_report.empty()) {
      WriteReportTsv(report, std::cout);
    } else {
      std::ofstream out(ev_report);
      if (!out) Fail(ErrorKind::kIo, "cannot write '" + ev_report + "'");
      WriteReportTsv(report, out);
    }
    if (!ev_svg.empty()) {
      std::ofstream out(ev_svg);
      if (!out) Fail(ErrorKind::kIo, "cannot write '" + ev_svg + "'");
      out << RateCurveSvg({{"scodec", PsnrCurve(report)}}, "PSNR (dB)");
    }
  } else if (*bench) {
    const auto nets = LoadNets(g);
    const auto predictor =
        MakePredictor(bench_predictor, *nets->epsilon, kDefaultScheduleSteps);
    const Tensor image = ReadImage(bench_in);
    DecodeOptions dopt;
    dopt.predictor = predictor.get();
    std::vector<StageTimings> runs;
    for (int i = 0; i < bench_warmup + bench_runs; ++i) {
      const EncodeResult enc = EncodeImage(image, *nets);
      const DecodeResult dec = DecodeImage(enc.bytes, *nets, dopt);
      if (i < bench_warmup) continue;
      StageTimings t = enc.timings;
      for (const auto& [stage, secs] : dec.timings.entries()) t.Add(stage, secs);
      runs.push_back(std::move(t));
    }
    std::cout << "stage\tmean_ms\tstd_ms\n";
    for (const char* stage : {"g_a", "entropy-encode", "entropy-decode", "g_s",
                              "denoise", "aux", "pixel-decode"}) {
      double sum = 0.0, sq = 0.0;
      for (const auto& t : runs) {
        const double ms = t.Get(stage) * 1e3;
        sum += ms;
        sq += ms * ms;
      }
      const double n = static_cast<double>(runs.size());
      const double mean = sum / n;
      const double var = std::max(0.0, sq / n - mean * mean);
      std::cout << stage << "\t" << Fixed(mean, 3) << "\t"
                << Fixed(std::sqrt(var), 3) << "\n";
    }
  } else if (*init) {
    const WeightStore store = RandomWeights(arch(init_arch), init_seed);
    SaveWeights(store, init_out);
    std::cout << "model_id=" << ModelIdHex(store.model_id()) << "\n";
  } else if (*schema) {
    for (const auto& [name, t] : WeightSchema(arch(schema_arch))) {
      std::cout << name << "\t" << t.shape().ToString() << "\n";
    }
  }
  return 0;
}

}  // namespace
}  // namespace scodec

int main(int argc, char** argv) {
  try {
    return scodec::Run(argc, argv);
  } catch (const scodec::Error& e) {
    std::cerr << "scodec: " << e.what() << "\n";
    return scodec::ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "scodec: " << e.what() << "\n";
    return scodec::kExitIo;
  }
}
