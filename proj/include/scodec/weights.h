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

#ifndef SCODEC_WEIGHTS_H_
#define SCODEC_WEIGHTS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "scodec/bytes.h"
#include "scodec/config.h"
#include "scodec/tensor.h"

namespace scodec {

using ModelId = std::array<uint8_t, 8>;

inline constexpr uint16_t kWeightFormatVersion = 1;

// Named parameter archive ("SCWT" files). Immutable once built; the
// model_id is the first 8 bytes of SHA-256 over the config block and the
// rank-4 parameter records, see FORMAT.md.
class WeightStore {
 public:
  WeightStore(TransformConfig config, std::map<std::string, Tensor> params);
  // Keeps `config_text` verbatim; it must parse to a valid config.
  WeightStore(std::string config_text, std::map<std::string, Tensor> params);

  const TransformConfig& config() const { return config_; }
  const std::string& config_text() const { return config_text_; }
  const std::map<std::string, Tensor>& params() const { return params_; }
  const ModelId& model_id() const { return model_id_; }

  // Throws kSchema naming the parameter when it is absent or has a
  // different shape.
  const Tensor& Get(const std::string& name, const Shape& expected) const;
  bool Contains(const std::string& name) const {
    return params_.count(name) != 0;
  }

  Bytes Serialize() const;
  static WeightStore Deserialize(std::span<const uint8_t> bytes);

 private:
  TransformConfig config_;
  std::string config_text_;
  std::map<std::string, Tensor> params_;
  ModelId model_id_{};
};

WeightStore LoadWeights(const std::filesystem::path& path);
void SaveWeights(const WeightStore& store, const std::filesystem::path& path);

std::string ModelIdHex(const ModelId& id);

}  // namespace scodec

#endif  // SCODEC_WEIGHTS_H_
