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

// Corpus evaluation: every image of a directory through every model.

#ifndef SCODEC_EVAL_H_
#define SCODEC_EVAL_H_

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "scodec/codec.h"
#include "scodec/metrics.h"

namespace scodec {

struct EvalModel {
  std::string lambda;  // label written to the report
  const CodecNets* nets = nullptr;
};

struct EvalRow {
  std::string image;  // file name
  std::string lambda;
  int64_t width = 0;
  int64_t height = 0;
  size_t bytes = 0;
  double bpp = 0.0;
  double psnr = 0.0;
  double ms_ssim = 0.0;  // NaN when the image is too small
};

struct EvalReport {
  std::vector<EvalRow> rows;     // sorted by image name, then model order
  std::vector<EvalRow> summary;  // one MEAN row per model
  std::vector<std::string> skipped;
};

struct EvalOptions {
  EncodeOptions encode;
  DecodeOptions decode;
  // Receives one line per skipped file.
  std::function<void(const std::string&)> warn;
};

// Images are the *.png and *.ppm files directly inside `dir`. Unreadable
// images are skipped with a warning; throws kIo when the directory has no
// images or none could be evaluated.
EvalReport EvalCorpus(const std::filesystem::path& dir,
                      const std::vector<EvalModel>& models,
                      const EvalOptions& options = {});

// Means over rows of one lambda. PSNR means include +inf when present;
// NaN MS-SSIM values are left out.
EvalRow MeanRow(const std::vector<EvalRow>& rows, const std::string& lambda);

// Tab-separated report: header, per-image rows, MEAN rows. See README.
void WriteReportTsv(const EvalReport& report, std::ostream& out);

// Mean bpp/PSNR of each model, in model order.
Curve PsnrCurve(const EvalReport& report);

// Minimal SVG line chart of one or more curves (bpp on x, quality on y).
std::string RateCurveSvg(const std::vector<std::pair<std::string, Curve>>& curves,
                         const std::string& quality_label);

}  // namespace scodec

#endif  // SCODEC_EVAL_H_
