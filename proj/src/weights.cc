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

#include "scodec/weights.h"

#include <algorithm>
#include <limits>

#include "scodec/error.h"

namespace scodec {
namespace {

constexpr char kMagic[4] = {'S', 'C', 'W', 'T'};
constexpr uint8_t kDtypeReal32 = 0;

// Serialized config block plus parameter records: the digest input.
Bytes DigestBody(const std::string& config_text,
                 const std::map<std::string, Tensor>& params) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(config_text.size()));
  w.Raw(config_text);
  w.U32(static_cast<uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    if (name.size() > std::numeric_limits<uint16_t>::max()) {
      Fail(ErrorKind::kConfig, "parameter name too long: " + name);
    }
    w.U16(static_cast<uint16_t>(name.size()));
    w.Raw(name);
    w.U8(kDtypeReal32);
    w.U8(4);
    w.U32(static_cast<uint32_t>(t.n()));
    w.U32(static_cast<uint32_t>(t.c()));
    w.U32(static_cast<uint32_t>(t.h()));
    w.U32(static_cast<uint32_t>(t.w()));
    for (float v : t.span()) w.F32(v);
  }
  return w.Take();
}

ModelId DigestToId(std::span<const uint8_t> body) {
  const auto full = Sha256(body);
  ModelId id;
  std::copy_n(full.begin(), id.size(), id.begin());
  return id;
}

}  // namespace

WeightStore::WeightStore(TransformConfig config,
                         std::map<std::string, Tensor> params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.Validate();
  config_text_ = config_.Serialize();
  model_id_ = DigestToId(DigestBody(config_text_, params_));
}

WeightStore::WeightStore(std::string config_text,
                         std::map<std::string, Tensor> params)
    : config_(TransformConfig::Parse(config_text)),
      config_text_(std::move(config_text)),
      params_(std::move(params)) {
  model_id_ = DigestToId(DigestBody(config_text_, params_));
}

const Tensor& WeightStore::Get(const std::string& name,
                               const Shape& expected) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    Fail(ErrorKind::kSchema, "missing parameter '" + name + "'");
  }
  if (!(it->second.shape() == expected)) {
    Fail(ErrorKind::kSchema, "parameter '" + name + "' has shape " +
                                 it->second.shape().ToString() +
                                 ", expected " + expected.ToString());
  }
  return it->second;
}

Bytes WeightStore::Serialize() const {
  ByteWriter w;
  w.Raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kMagic), 4));
  w.U16(kWeightFormatVersion);
  const Bytes body = DigestBody(config_text_, params_);
  w.Raw(body);
  w.Raw(model_id_);
  return w.Take();
}

WeightStore WeightStore::Deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Raw(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    Fail(ErrorKind::kFormat, "not a weight file (bad magic at offset 0)");
  }
  const uint16_t version = r.U16("version");
  if (version != kWeightFormatVersion) {
    Fail(ErrorKind::kFormat,
         "unsupported weight file version " + std::to_string(version));
  }
  const uint32_t config_len = r.U32("config length");
  const std::string config_text = r.String(config_len, "config block");
  const uint32_t count = r.U32("parameter count");
  std::map<std::string, Tensor> params;
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t name_len = r.U16("parameter name length");
    std::string name = r.String(name_len, "parameter name");
    const uint8_t dtype = r.U8("dtype");
    if (dtype != kDtypeReal32) {
      Fail(ErrorKind::kFormat, "parameter '" + name + "': unknown dtype " +
                                   std::to_string(dtype) + " at offset " +
                                   std::to_string(r.offset() - 1));
    }
    const uint8_t rank = r.U8("rank");
    if (rank > 4) {
      Fail(ErrorKind::kFormat, "parameter '" + name + "': rank " +
                                   std::to_string(rank) + " > 4");
    }
    // Lower ranks are left-padded with unit extents.
    int64_t ext[4] = {1, 1, 1, 1};
    for (int k = 0; k < rank; ++k) ext[4 - rank + k] = r.U32("extent");
    const Shape shape{ext[0], ext[1], ext[2], ext[3]};
    const auto elements = static_cast<uint64_t>(shape.elements());
    if (elements * 4 > r.remaining()) {
      Fail(ErrorKind::kFormat, "parameter '" + name +
                                   "': payload truncated at offset " +
                                   std::to_string(r.offset()));
    }
    std::vector<float> data(elements);
    for (auto& v : data) v = r.F32("payload");
    if (!params.emplace(name, Tensor(shape, std::move(data))).second) {
      Fail(ErrorKind::kFormat, "duplicate parameter '" + name + "'");
    }
  }
  auto stored = r.Raw(8, "model id");
  if (r.remaining() != 0) {
    Fail(ErrorKind::kFormat, "trailing bytes after model id at offset " +
                                 std::to_string(r.offset()));
  }
  // The digest is over the canonical rank-4 records, so a file written with
  // lower-rank extents verifies the same way.
  WeightStore store(config_text, std::move(params));
  if (!std::equal(stored.begin(), stored.end(), store.model_id_.begin())) {
    Fail(ErrorKind::kCorrupt, "weight digest mismatch: stored " +
                                  HexString(stored) + ", computed " +
                                  HexString(store.model_id_));
  }
  return store;
}

WeightStore LoadWeights(const std::filesystem::path& path) {
  return WeightStore::Deserialize(ReadFileBytes(path));
}

void SaveWeights(const WeightStore& store, const std::filesystem::path& path) {
  WriteFileBytes(path, store.Serialize());
}

std::string ModelIdHex(const ModelId& id) { return HexString(id); }

}  // namespace scodec
