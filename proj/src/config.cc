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

#include "scodec/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "scodec/error.h"

namespace scodec {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

int64_t ParseInt(const std::string& key, const std::string& value) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    Fail(ErrorKind::kConfig,
         "key '" + key + "': '" + value + "' is not an integer");
  }
  return v;
}

std::vector<int64_t> ParseIntList(const std::string& key,
                                  const std::string& value) {
  std::vector<int64_t> out;
  for (const auto& item : SplitList(value)) out.push_back(ParseInt(key, item));
  return out;
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

void ValidateStages(const char* name, const StageConfig& stages,
                    size_t expected) {
  if (stages.channels <= 0) {
    Fail(ErrorKind::kConfig, std::string(name) + ".channels must be positive");
  }
  if (stages.depths.size() != expected || stages.kinds.size() != expected) {
    Fail(ErrorKind::kConfig, std::string(name) + " needs exactly " +
                                 std::to_string(expected) +
                                 " stages (depths and kinds) to reach its "
                                 "resolution ratio");
  }
  for (int64_t d : stages.depths) {
    if (d < 0) {
      Fail(ErrorKind::kConfig, std::string(name) + ".depths must be >= 0");
    }
  }
}

}  // namespace

KeyValues ParseKeyValues(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorKind::kConfig,
           "line " + std::to_string(line_no) + ": expected key = value");
    }
    kv[Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues LoadKeyValueFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseKeyValues(ss.str());
}

BlockKind ParseBlockKind(const std::string& name) {
  if (name == "inception-dw") return BlockKind::kInceptionDw;
  if (name == "gated-cnn") return BlockKind::kGatedCnn;
  if (name == "plain-conv") return BlockKind::kPlainConv;
  Fail(ErrorKind::kConfig, "unknown block kind '" + name + "'");
}

const char* BlockKindName(BlockKind kind) {
  switch (kind) {
    case BlockKind::kInceptionDw: return "inception-dw";
    case BlockKind::kGatedCnn: return "gated-cnn";
    case BlockKind::kPlainConv: return "plain-conv";
  }
  return "?";
}

void TransformConfig::Validate() const {
  auto positive = [](const char* key, int64_t v) {
    if (v <= 0) {
      Fail(ErrorKind::kConfig, std::string(key) + " must be positive");
    }
  };
  positive("latent_channels", latent_channels);
  positive("code_channels", code_channels);
  positive("hyper_code_channels", hyper_code_channels);
  positive("diffusion_channels", diffusion_channels);
  positive("aux_source_channels", aux_source_channels);
  positive("phi_channels", phi_channels);
  positive("hyper_channels", hyper_channels);
  positive("context_channels", context_channels);
  positive("lrp_channels", lrp_channels);
  positive("predictor_channels", predictor_channels);
  positive("mlp_ratio", mlp_ratio);
  positive("gated_expand", gated_expand);
  if (latent_channels % 2 != 0) {
    Fail(ErrorKind::kConfig,
         "latent_channels must be even (split between the two adapters)");
  }
  if (band_kernel <= 0 || band_kernel % 2 == 0) {
    Fail(ErrorKind::kConfig, "band_kernel must be a positive odd number");
  }
  if (gated_kernel <= 0 || gated_kernel % 2 == 0) {
    Fail(ErrorKind::kConfig, "gated_kernel must be a positive odd number");
  }
  // Two stride-2 stages take l (1/16) to y (1/64); three upsampling stages
  // take y (1/64) to l_T (1/8).
  ValidateStages("analysis", analysis, 3);
  ValidateStages("synthesis", synthesis, 4);
  ValidateStages("aux_decoder", aux_decoder, 4);
  if (decoder_channels.size() != 4) {
    Fail(ErrorKind::kConfig, "decoder_channels needs 4 widths (1/8 .. 1/1)");
  }
  for (int64_t c : decoder_channels) positive("decoder_channels", c);
}

std::string TransformConfig::Serialize() const {
  std::ostringstream os;
  auto ints = [](const std::vector<int64_t>& v) {
    return JoinList(v, [](int64_t x) { return std::to_string(x); });
  };
  auto kinds = [](const std::vector<BlockKind>& v) {
    return JoinList(v, [](BlockKind k) { return std::string(BlockKindName(k)); });
  };
  auto stages = [&](const char* name, const StageConfig& s) {
    os << name << ".channels = " << s.channels << "\n";
    os << name << ".depths = " << ints(s.depths) << "\n";
    os << name << ".kinds = " << kinds(s.kinds) << "\n";
  };
  os << "latent_channels = " << latent_channels << "\n";
  os << "code_channels = " << code_channels << "\n";
  os << "hyper_code_channels = " << hyper_code_channels << "\n";
  os << "diffusion_channels = " << diffusion_channels << "\n";
  os << "aux_source_channels = " << aux_source_channels << "\n";
  os << "phi_channels = " << phi_channels << "\n";
  stages("analysis", analysis);
  stages("synthesis", synthesis);
  stages("aux_decoder", aux_decoder);
  os << "hyper_channels = " << hyper_channels << "\n";
  os << "context_channels = " << context_channels << "\n";
  os << "lrp_channels = " << lrp_channels << "\n";
  os << "decoder_channels = " << ints(decoder_channels) << "\n";
  os << "predictor_channels = " << predictor_channels << "\n";
  os << "band_kernel = " << band_kernel << "\n";
  os << "mlp_ratio = " << mlp_ratio << "\n";
  os << "gated_expand = " << gated_expand << "\n";
  os << "gated_kernel = " << gated_kernel << "\n";
  return os.str();
}

TransformConfig TransformConfig::FromKeyValues(const KeyValues& kv) {
  TransformConfig cfg;
  const std::map<std::string, int64_t*> scalars = {
      {"latent_channels", &cfg.latent_channels},
      {"code_channels", &cfg.code_channels},
      {"hyper_code_channels", &cfg.hyper_code_channels},
      {"diffusion_channels", &cfg.diffusion_channels},
      {"aux_source_channels", &cfg.aux_source_channels},
      {"phi_channels", &cfg.phi_channels},
      {"analysis.channels", &cfg.analysis.channels},
      {"synthesis.channels", &cfg.synthesis.channels},
      {"aux_decoder.channels", &cfg.aux_decoder.channels},
      {"hyper_channels", &cfg.hyper_channels},
      {"context_channels", &cfg.context_channels},
      {"lrp_channels", &cfg.lrp_channels},
      {"predictor_channels", &cfg.predictor_channels},
      {"band_kernel", &cfg.band_kernel},
      {"mlp_ratio", &cfg.mlp_ratio},
      {"gated_expand", &cfg.gated_expand},
      {"gated_kernel", &cfg.gated_kernel},
  };
  const std::map<std::string, StageConfig*> stage_sets = {
      {"analysis", &cfg.analysis},
      {"synthesis", &cfg.synthesis},
      {"aux_decoder", &cfg.aux_decoder},
  };
  for (const auto& [key, value] : kv) {
    if (auto it = scalars.find(key); it != scalars.end()) {
      *it->second = ParseInt(key, value);
      continue;
    }
    if (key == "decoder_channels") {
      cfg.decoder_channels = ParseIntList(key, value);
      continue;
    }
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      auto it = stage_sets.find(key.substr(0, dot));
      const std::string field = key.substr(dot + 1);
      if (it != stage_sets.end() && field == "depths") {
        it->second->depths = ParseIntList(key, value);
        continue;
      }
      if (it != stage_sets.end() && field == "kinds") {
        it->second->kinds.clear();
        for (const auto& k : SplitList(value)) {
          it->second->kinds.push_back(ParseBlockKind(k));
        }
        continue;
      }
    }
    Fail(ErrorKind::kConfig, "unknown transform config key '" + key + "'");
  }
  cfg.Validate();
  return cfg;
}

TransformConfig TransformConfig::Parse(const std::string& text) {
  return FromKeyValues(ParseKeyValues(text));
}

}  // namespace scodec
