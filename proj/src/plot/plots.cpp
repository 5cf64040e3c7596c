// sasv/plot/plots.cpp

// Copyright 2026  SASVKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sasv/plot/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>

#include "sasv/plot/png.hpp"

namespace sasv::plot {

namespace {

namespace fs = std::filesystem;

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMarginLeft = 40;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 16;
constexpr int kMarginBottom = 32;
constexpr int kBins = 48;

const Rgb kBackground{255, 255, 255};
const Rgb kAxis{40, 40, 40};
const std::array<Rgb, 4> kTypeColours = {Rgb{40, 150, 60},   // T1 green
                                         Rgb{50, 90, 200},   // T2 blue
                                         Rgb{235, 140, 30},  // T3 orange
                                         Rgb{210, 40, 40}};  // T4 red
const Rgb kFarColour{210, 40, 40};
const Rgb kFrrColour{50, 90, 200};

struct Frame {
  int x0 = kMarginLeft, y0 = kMarginTop;
  int x1 = kWidth - kMarginRight, y1 = kHeight - kMarginBottom;

  int MapX(double t) const {  // t in [0,1]
    return x0 + static_cast<int>(std::lround(t * (x1 - x0)));
  }
  int MapY(double t) const {  // t in [0,1], 0 at the bottom
    return y1 - static_cast<int>(std::lround(t * (y1 - y0)));
  }
};

void DrawAxes(Canvas* canvas, const Frame& f) {
  canvas->Line(f.x0, f.y0, f.x0, f.y1, kAxis);
  canvas->Line(f.x0, f.y1, f.x1, f.y1, kAxis);
  for (int i = 0; i <= 4; ++i) {  // quarter ticks
    const int x = f.MapX(i / 4.0);
    const int y = f.MapY(i / 4.0);
    canvas->Line(x, f.y1, x, f.y1 + 4, kAxis);
    canvas->Line(f.x0 - 4, y, f.x0, y, kAxis);
  }
}

double StreamScore(const eval::ScoreRecord& r, int stream) {
  switch (stream) {
    case 0: return r.full_score;
    case 1: return r.asv_score;
    default: return r.cm_score;
  }
}

void RenderHistogram(const std::vector<eval::ScoreRecord>& records, int stream,
                     const std::string& path) {
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& r : records) {
    const double s = StreamScore(r, stream);
    lo = first ? s : std::min(lo, s);
    hi = first ? s : std::max(hi, s);
    first = false;
  }
  if (hi - lo < 1e-12) hi = lo + 1e-12;

  std::array<std::array<int, kBins>, 4> counts{};
  std::array<int, 4> totals{};
  for (const auto& r : records) {
    const double s = StreamScore(r, stream);
    int bin = static_cast<int>((s - lo) / (hi - lo) * kBins);
    bin = std::clamp(bin, 0, kBins - 1);
    const int type = static_cast<int>(r.trial.type);
    counts[static_cast<std::size_t>(type)][static_cast<std::size_t>(bin)] += 1;
    totals[static_cast<std::size_t>(type)] += 1;
  }
  int peak = 1;
  for (const auto& per_type : counts) {
    for (int c : per_type) peak = std::max(peak, c);
  }

  Canvas canvas(kWidth, kHeight, kBackground);
  Frame f;
  DrawAxes(&canvas, f);
  for (int type = 0; type < 4; ++type) {
    if (totals[static_cast<std::size_t>(type)] == 0) {
      LogWarn("plots: no records of type T" + std::to_string(type + 1) +
              ", series omitted");
      continue;
    }
    const Rgb colour = kTypeColours[static_cast<std::size_t>(type)];
    // One thin bar per (bin, type), types side by side within the bin.
    const double bin_width = 1.0 / kBins;
    for (int b = 0; b < kBins; ++b) {
      const int c = counts[static_cast<std::size_t>(type)][static_cast<std::size_t>(b)];
      if (c == 0) continue;
      const double x_lo = b * bin_width + type * bin_width / 4.0;
      const double x_hi = x_lo + bin_width / 4.0;
      const double height = static_cast<double>(c) / peak;
      canvas.FillRect(f.MapX(x_lo), f.MapY(height), f.MapX(x_hi), f.MapY(0.0),
                      colour);
    }
  }
  WritePng(canvas, path);
}

void RenderFarFrr(const std::vector<eval::ScoreRecord>& records, int stream,
                  const std::string& path) {
  // Positive class: T1; negatives: T2 and T3 (T4 is never assessed).
  std::vector<double> pos, neg;
  for (const auto& r : records) {
    const double s = StreamScore(r, stream);
    switch (r.trial.type) {
      case protocol::TrialType::kT1: pos.push_back(s); break;
      case protocol::TrialType::kT2:
      case protocol::TrialType::kT3: neg.push_back(s); break;
      case protocol::TrialType::kT4: break;
    }
  }
  Canvas canvas(kWidth, kHeight, kBackground);
  Frame f;
  DrawAxes(&canvas, f);
  if (pos.empty() || neg.empty()) {
    LogWarn("plots: missing positive or negative trials, FAR/FRR curve left "
            "empty");
    WritePng(canvas, path);
    return;
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const double lo = std::min(pos.front(), neg.front());
  const double hi = std::max(pos.back(), neg.back());
  const double span = std::max(hi - lo, 1e-12);

  int prev_x = -1, prev_far_y = -1, prev_frr_y = -1;
  const int steps = f.x1 - f.x0;
  for (int i = 0; i <= steps; ++i) {
    const double t = lo + span * i / steps;
    const auto n_far =
        neg.end() - std::lower_bound(neg.begin(), neg.end(), t);
    const auto n_frr =
        std::lower_bound(pos.begin(), pos.end(), t) - pos.begin();
    const double far = static_cast<double>(n_far) / neg.size();
    const double frr = static_cast<double>(n_frr) / pos.size();
    const int x = f.x0 + i;
    const int far_y = f.MapY(far);
    const int frr_y = f.MapY(frr);
    if (prev_x >= 0) {
      canvas.Line(prev_x, prev_far_y, x, far_y, kFarColour);
      canvas.Line(prev_x, prev_frr_y, x, frr_y, kFrrColour);
    }
    prev_x = x;
    prev_far_y = far_y;
    prev_frr_y = frr_y;
  }
  WritePng(canvas, path);
}

}  // namespace

std::vector<std::string> EmitPlots(
    const std::vector<eval::ScoreRecord>& records, const std::string& prefix,
    const std::string& out_dir) {
  if (records.empty()) throw DataError("plots: no score records");
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (int stream = 0; stream < 3; ++stream) {
    const std::string stem =
        (fs::path(out_dir) /
         (prefix + "_" + eval::kStreamNames[static_cast<std::size_t>(stream)]))
            .string();
    RenderHistogram(records, stream, stem + "_hist.png");
    written.push_back(stem + "_hist.png");
    RenderFarFrr(records, stream, stem + "_far_frr.png");
    written.push_back(stem + "_far_frr.png");
  }
  return written;
}

std::vector<std::string> EmitPlotsForFile(const std::string& score_file,
                                          const std::string& out_dir) {
  const auto records = eval::ParseScores(score_file);
  return EmitPlots(records, fs::path(score_file).stem().string(), out_dir);
}

}  // namespace sasv::plot
