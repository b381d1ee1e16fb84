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

// RGB images are (1, 3, H, W) tensors with values in [0, 1].

#ifndef SCODEC_IMAGE_H_
#define SCODEC_IMAGE_H_

#include <cstdint>
#include <filesystem>

#include "scodec/tensor.h"

namespace scodec {

// PNG (any libpng-readable layout, converted to 8-bit RGB) or binary PPM.
Tensor ReadImage(const std::filesystem::path& path);
// Format chosen by extension: ".ppm" writes P6, anything else PNG. Values
// are clamped and rounded to 8 bits.
void WriteImage(const std::filesystem::path& path, const Tensor& image);

Tensor ReadPpm(const std::filesystem::path& path);
void WritePpm(const std::filesystem::path& path, const Tensor& image);

// Edge-replicating pad on the bottom and right to multiples of `multiple`.
Tensor PadReplicate(const Tensor& image, int64_t multiple);
int64_t RoundUp(int64_t value, int64_t multiple);

// Quantizes to 8 bits and back, as a PNG/PPM round trip would.
Tensor QuantizeTo8Bit(const Tensor& image);

}  // namespace scodec

#endif  // SCODEC_IMAGE_H_
