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

#include "scodec/image.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "scodec/bytes.h"
#include "scodec/error.h"

namespace scodec {
namespace {

uint8_t To8Bit(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<uint8_t>(std::lround(c * 255.0f));
}

Tensor FromInterleaved(const uint8_t* rgb, int64_t width, int64_t height) {
  Tensor out({1, 3, height, width});
  for (int64_t y = 0; y < height; ++y) {
    for (int64_t x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(0, c, y, x) = rgb[(y * width + x) * 3 + c] / 255.0f;
      }
    }
  }
  return out;
}

std::vector<uint8_t> ToInterleaved(const Tensor& image) {
  if (image.n() != 1 || image.c() != 3) {
    Fail(ErrorKind::kConfig, "image tensor must be (1, 3, H, W), got " +
                                 image.shape().ToString());
  }
  std::vector<uint8_t> rgb(static_cast<size_t>(image.h() * image.w() * 3));
  for (int64_t y = 0; y < image.h(); ++y) {
    for (int64_t x = 0; x < image.w(); ++x) {
      for (int c = 0; c < 3; ++c) {
        rgb[(y * image.w() + x) * 3 + c] = To8Bit(image.at(0, c, y, x));
      }
    }
  }
  return rgb;
}

bool HasPpmExtension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".ppm";
}

Tensor ReadPng(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    Fail(ErrorKind::kFormat, "'" + path.string() + "': " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<uint8_t> rgb(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, rgb.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    Fail(ErrorKind::kFormat, "'" + path.string() + "': " + msg);
  }
  return FromInterleaved(rgb.data(), img.width, img.height);
}

void WritePng(const std::filesystem::path& path, const Tensor& image) {
  const std::vector<uint8_t> rgb = ToInterleaved(image);
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.w());
  img.height = static_cast<png_uint_32>(image.h());
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, rgb.data(), 0,
                               nullptr)) {
    Fail(ErrorKind::kIo, "cannot write '" + path.string() + "': " +
                             img.message);
  }
}

}  // namespace

Tensor ReadPpm(const std::filesystem::path& path) {
  const Bytes bytes = ReadFileBytes(path);
  size_t pos = 0;
  auto bad = [&](const std::string& what) {
    Fail(ErrorKind::kFormat, "'" + path.string() + "': " + what +
                                 " at offset " + std::to_string(pos));
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> int64_t {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) bad("expected number");
    int64_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1 << 24)) bad("number too large");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') bad("not a P6 PPM");
  pos = 2;
  const int64_t width = number();
  const int64_t height = number();
  const int64_t maxval = number();
  if (maxval != 255) bad("only maxval 255 is supported");
  if (width <= 0 || height <= 0) bad("empty image");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) bad("missing separator");
  ++pos;
  if (bytes.size() - pos < static_cast<size_t>(width * height * 3)) {
    bad("truncated pixel data");
  }
  return FromInterleaved(bytes.data() + pos, width, height);
}

void WritePpm(const std::filesystem::path& path, const Tensor& image) {
  const std::vector<uint8_t> rgb = ToInterleaved(image);
  ByteWriter w;
  w.Raw("P6\n" + std::to_string(image.w()) + " " + std::to_string(image.h()) +
        "\n255\n");
  w.Raw(rgb);
  WriteFileBytes(path, w.bytes());
}

Tensor ReadImage(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  in.close();
  if (magic[0] == 'P' && magic[1] == '6') return ReadPpm(path);
  return ReadPng(path);
}

void WriteImage(const std::filesystem::path& path, const Tensor& image) {
  if (HasPpmExtension(path)) {
    WritePpm(path, image);
  } else {
    WritePng(path, image);
  }
}

int64_t RoundUp(int64_t value, int64_t multiple) {
  return (value + multiple - 1) / multiple * multiple;
}

Tensor PadReplicate(const Tensor& image, int64_t multiple) {
  const int64_t h = RoundUp(image.h(), multiple);
  const int64_t w = RoundUp(image.w(), multiple);
  if (h == image.h() && w == image.w()) return image;
  Tensor out({image.n(), image.c(), h, w});
  for (int64_t n = 0; n < image.n(); ++n) {
    for (int64_t c = 0; c < image.c(); ++c) {
      for (int64_t y = 0; y < h; ++y) {
        const int64_t sy = std::min(y, image.h() - 1);
        for (int64_t x = 0; x < w; ++x) {
          out.at(n, c, y, x) = image.at(n, c, sy, std::min(x, image.w() - 1));
        }
      }
    }
  }
  return out;
}

Tensor QuantizeTo8Bit(const Tensor& image) {
  Tensor out = image;
  for (float& v : out.span()) v = To8Bit(v) / 255.0f;
  return out;
}

}  // namespace scodec
