// Copyright 2026 The VerMCTS Authors
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

#include "vermcts/export.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vermcts {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string curves_csv(std::span<const PassCurve> curves) {
  std::string out = kCurveCsvHeader;
  out += '\n';
  for (const auto& c : curves)
    for (const auto& p : c.points)
      out += c.problem + "," + c.method + "," + std::to_string(p.tokens) + "," +
             fmt(p.pass_rate) + "," + fmt(p.wilson_lo) + "," + fmt(p.wilson_hi) + "\n";
  return out;
}

std::string tree_stats_csv(std::span<const TreeStatPoint> series) {
  std::string out = kTreeCsvHeader;
  out += '\n';
  for (const auto& p : series)
    out += p.problem + "," + std::to_string(p.tokens) + "," + fmt(p.nodes, 3) + "," +
           fmt(p.depth, 3) + "," + fmt(p.width, 3) + "\n";
  return out;
}

std::string curves_svg(std::span<const PassCurve> curves, const std::string& problem) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 150, kTop = 30, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  std::size_t max_t = 1;
  for (const auto& c : curves)
    if (c.problem == problem)
      for (const auto& p : c.points) max_t = std::max(max_t, p.tokens);
  auto x = [&](std::size_t t) { return kLeft + plot_w * static_cast<double>(t) / static_cast<double>(max_t); };
  auto y = [&](double r) { return kTop + plot_h * (1.0 - r); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW, 0) + "\" height=\"" +
       fmt(kH, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(kLeft, 0) + "\" y=\"20\" font-size=\"14\">pass@T: " +
       xml_escape(problem) + "</text>\n";
  s += "<rect x=\"" + fmt(kLeft, 1) + "\" y=\"" + fmt(kTop, 1) + "\" width=\"" + fmt(plot_w, 1) +
       "\" height=\"" + fmt(plot_h, 1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double r = i / 4.0;
    s += "<line x1=\"" + fmt(kLeft - 4, 1) + "\" y1=\"" + fmt(y(r), 1) + "\" x2=\"" +
         fmt(kLeft, 1) + "\" y2=\"" + fmt(y(r), 1) + "\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + fmt(kLeft - 8, 1) + "\" y=\"" + fmt(y(r) + 4, 1) +
         "\" text-anchor=\"end\">" + fmt(r, 2) + "</text>\n";
    const auto t = static_cast<std::size_t>(static_cast<double>(max_t) * r);
    s += "<text x=\"" + fmt(x(t), 1) + "\" y=\"" + fmt(kTop + plot_h + 18, 1) +
         "\" text-anchor=\"middle\">" + std::to_string(t) + "</text>\n";
  }
  s += "<text x=\"" + fmt(kLeft + plot_w / 2, 1) + "\" y=\"" + fmt(kH - 10, 1) +
       "\" text-anchor=\"middle\">tokens (T)</text>\n";

  std::size_t index = 0;
  for (const auto& c : curves) {
    if (c.problem != problem || c.points.empty()) continue;
    const char* color = kPalette[index % kPalette.size()];
    std::string band;
    for (const auto& p : c.points) band += fmt(x(p.tokens), 1) + "," + fmt(y(p.wilson_hi), 1) + " ";
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band += fmt(x(it->tokens), 1) + "," + fmt(y(it->wilson_lo), 1) + " ";
    s += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    std::string line;
    for (const auto& p : c.points) line += fmt(x(p.tokens), 1) + "," + fmt(y(p.pass_rate), 1) + " ";
    s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(index);
    s += "<line x1=\"" + fmt(kW - kRight + 10, 1) + "\" y1=\"" + fmt(ly, 1) + "\" x2=\"" +
         fmt(kW - kRight + 30, 1) + "\" y2=\"" + fmt(ly, 1) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt(kW - kRight + 35, 1) + "\" y=\"" + fmt(ly + 4, 1) + "\">" +
         xml_escape(c.method) + "</text>\n";
    ++index;
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> export_curves(std::span<const PassCurve> curves,
                                                 std::span<const TreeStatPoint> series,
                                                 const std::filesystem::path& out_dir,
                                                 bool plot) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  written.push_back(out_dir / "curves.csv");
  write_text(written.back(), curves_csv(curves));
  written.push_back(out_dir / "tree_stats.csv");
  write_text(written.back(), tree_stats_csv(series));
  if (plot) {
    std::vector<std::string> problems;
    for (const auto& c : curves)
      if (std::find(problems.begin(), problems.end(), c.problem) == problems.end())
        problems.push_back(c.problem);
    for (const auto& p : problems) {
      written.push_back(out_dir / ("pass_at_T_" + p + ".svg"));
      write_text(written.back(), curves_svg(curves, p));
    }
  }
  return written;
}

}  // namespace vermcts
