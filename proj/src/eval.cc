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

#include "scodec/eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "scodec/error.h"
#include "scodec/image.h"

namespace scodec {
namespace {

bool IsImageFile(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".ppm";
}

std::string Number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

EvalRow MeanRow(const std::vector<EvalRow>& rows, const std::string& lambda) {
  EvalRow mean;
  mean.image = "MEAN";
  mean.lambda = lambda;
  double bytes = 0.0;
  size_t count = 0;
  size_t ssim_count = 0;
  for (const EvalRow& r : rows) {
    if (r.lambda != lambda) continue;
    ++count;
    bytes += static_cast<double>(r.bytes);
    mean.bpp += r.bpp;
    mean.psnr += r.psnr;
    if (!std::isnan(r.ms_ssim)) {
      mean.ms_ssim += r.ms_ssim;
      ++ssim_count;
    }
  }
  if (count == 0) return mean;
  mean.bytes = static_cast<size_t>(std::llround(bytes / count));
  mean.bpp /= static_cast<double>(count);
  mean.psnr /= static_cast<double>(count);
  mean.ms_ssim = ssim_count > 0 ? mean.ms_ssim / ssim_count
                                : std::numeric_limits<double>::quiet_NaN();
  return mean;
}

EvalReport EvalCorpus(const std::filesystem::path& dir,
                      const std::vector<EvalModel>& models,
                      const EvalOptions& options) {
  if (models.empty()) Fail(ErrorKind::kConfig, "eval needs at least one model");
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    Fail(ErrorKind::kIo, "'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && IsImageFile(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) {
    Fail(ErrorKind::kIo, "no .png or .ppm images in '" + dir.string() + "'");
  }

  EvalReport report;
  for (const auto& file : files) {
    Tensor image;
    try {
      image = ReadImage(file);
    } catch (const Error& e) {
      report.skipped.push_back(file.filename().string());
      if (options.warn) options.warn(file.filename().string() + ": " + e.what());
      continue;
    }
    const bool ssim_ok =
        image.h() >= kMsSsimMinExtent && image.w() >= kMsSsimMinExtent;
    for (const EvalModel& m : models) {
      const EncodeResult enc = EncodeImage(image, *m.nets, options.encode);
      const DecodeResult dec = DecodeImage(enc.bytes, *m.nets, options.decode);
      const Tensor rec = QuantizeTo8Bit(dec.image);
      EvalRow row;
      row.image = file.filename().string();
      row.lambda = m.lambda;
      row.width = image.w();
      row.height = image.h();
      row.bytes = enc.bytes.size();
      row.bpp = BitsPerPixel(enc.bytes.size(), static_cast<uint32_t>(image.w()),
                             static_cast<uint32_t>(image.h()));
      row.psnr = Psnr(image, rec);
      row.ms_ssim = ssim_ok ? MsSsim(image, rec)
                            : std::numeric_limits<double>::quiet_NaN();
      report.rows.push_back(row);
    }
  }
  if (report.rows.empty()) {
    Fail(ErrorKind::kIo, "none of the " + std::to_string(files.size()) +
                             " images in '" + dir.string() +
                             "' could be read");
  }
  for (const EvalModel& m : models) {
    report.summary.push_back(MeanRow(report.rows, m.lambda));
  }
  return report;
}

void WriteReportTsv(const EvalReport& report, std::ostream& out) {
  out << "image\tlambda\twidth\theight\tbytes\tbpp\tpsnr\tms_ssim\n";
  auto write = [&](const EvalRow& r, bool summary) {
    out << r.image << '\t' << r.lambda << '\t'
        << (summary ? "-" : std::to_string(r.width)) << '\t'
        << (summary ? "-" : std::to_string(r.height)) << '\t' << r.bytes
        << '\t' << Number(r.bpp, 9) << '\t' << Number(r.psnr, 6) << '\t'
        << Number(r.ms_ssim, 6) << '\n';
  };
  for (const EvalRow& r : report.rows) write(r, false);
  for (const EvalRow& r : report.summary) write(r, true);
}

Curve PsnrCurve(const EvalReport& report) {
  Curve c;
  for (const EvalRow& r : report.summary) c.push_back({r.bpp, r.psnr});
  return c;
}

std::string RateCurveSvg(
    const std::vector<std::pair<std::string, Curve>>& curves,
    const std::string& quality_label) {
  constexpr double kW = 640, kH = 420, kLeft = 60, kRight = 20, kTop = 20,
                   kBottom = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& [name, curve] : curves) {
    for (const RatePoint& p : curve) {
      if (!std::isfinite(p.quality)) continue;
      xmin = std::min(xmin, p.bpp);
      xmax = std::max(xmax, p.bpp);
      ymin = std::min(ymin, p.quality);
      ymax = std::max(ymax, p.quality);
    }
  }
  if (!(xmax >= xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kW - kLeft - kRight);
  };
  auto py = [&](double y) {
    return kH - kBottom - (y - ymin) / (ymax - ymin) * (kH - kTop - kBottom);
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
    << "\" height=\"" << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
    << kW - kRight << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">bpp (" << Number(xmin, 4) << " to "
    << Number(xmax, 4) << ")</text>\n";
  s << "<text x=\"15\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 15 "
    << kH / 2 << ")\" text-anchor=\"middle\">" << quality_label << " ("
    << Number(ymin, 3) << " to " << Number(ymax, 3) << ")</text>\n";
  size_t index = 0;
  for (const auto& [name, curve] : curves) {
    const char* color = kColors[index % std::size(kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const RatePoint& p : curve) {
      if (std::isfinite(p.quality)) {
        s << Number(px(p.bpp), 2) << ',' << Number(py(p.quality), 2) << ' ';
      }
    }
    s << "\"/>\n";
    s << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 15 * (index + 1)
      << "\" fill=\"" << color << "\">" << name << "</text>\n";
    ++index;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace scodec
