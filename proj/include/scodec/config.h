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

#ifndef SCODEC_CONFIG_H_
#define SCODEC_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scodec {

// Parsed `key = value` text. Blank lines and lines starting with '#' are
// ignored; later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(const std::string& text);
KeyValues LoadKeyValueFile(const std::string& path);

enum class BlockKind { kInceptionDw, kGatedCnn, kPlainConv };

BlockKind ParseBlockKind(const std::string& name);
const char* BlockKindName(BlockKind kind);

// Widths and depths of one multi-stage transform. Stage k runs at
// 2^k times coarser (analysis) or finer (synthesis) resolution than stage 0.
struct StageConfig {
  int64_t channels = 0;
  std::vector<int64_t> depths;
  std::vector<BlockKind> kinds;

  bool operator==(const StageConfig&) const = default;
};

// Architecture of every network in a weight file. Serialized verbatim into
// the weight file header, so the file alone determines the model.
struct TransformConfig {
  int64_t latent_channels = 128;      // l, at 1/16
  int64_t code_channels = 320;        // y, at 1/64
  int64_t hyper_code_channels = 160;  // z, at 1/256
  int64_t diffusion_channels = 4;     // l_T / l_0, at 1/8
  int64_t aux_source_channels = 192;  // auxiliary latent source, at 1/16
  int64_t phi_channels = 256;         // hyperprior features, at 1/64

  StageConfig analysis{128, {1, 1, 1},
                       {BlockKind::kInceptionDw, BlockKind::kInceptionDw,
                        BlockKind::kGatedCnn}};
  StageConfig synthesis{96, {1, 1, 1, 1},
                        {BlockKind::kGatedCnn, BlockKind::kGatedCnn,
                         BlockKind::kInceptionDw, BlockKind::kInceptionDw}};
  StageConfig aux_decoder{96, {1, 1, 1, 1},
                          {BlockKind::kGatedCnn, BlockKind::kGatedCnn,
                           BlockKind::kInceptionDw, BlockKind::kInceptionDw}};

  int64_t hyper_channels = 128;
  int64_t context_channels = 192;
  int64_t lrp_channels = 128;
  // Pixel decoder widths at 1/8, 1/4, 1/2 and full resolution.
  std::vector<int64_t> decoder_channels{64, 32, 16, 16};
  int64_t predictor_channels = 32;

  int64_t band_kernel = 11;  // inception-dw 1xk / kx1 branches
  int64_t mlp_ratio = 2;     // inception-dw channel MLP
  int64_t gated_expand = 2;  // gated-cnn expansion ratio
  int64_t gated_kernel = 7;  // gated-cnn depthwise kernel

  // Throws kConfig when a value is out of range or the stage counts do not
  // give the 1/16 -> 1/64 (analysis) and 1/64 -> 1/8 (synthesis) ratios.
  void Validate() const;

  std::string Serialize() const;
  static TransformConfig Parse(const std::string& text);
  static TransformConfig FromKeyValues(const KeyValues& kv);

  bool operator==(const TransformConfig&) const = default;
};

}  // namespace scodec

#endif  // SCODEC_CONFIG_H_
