// Copyright 2026 The nesyrl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nesyrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nesyrl::cli {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Piecewise-linear y at x; series points must cover x.
double interp(const std::vector<std::pair<double, double>>& pts, double x) {
  if (pts.size() == 1) return pts[0].second;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (x <= pts[i].first) {
      double x0 = pts[i - 1].first, y0 = pts[i - 1].second;
      double x1 = pts[i].first, y1 = pts[i].second;
      if (x1 == x0) return y1;
      double f = (x - x0) / (x1 - x0);
      return y0 + f * (y1 - y0);
    }
  }
  return pts.back().second;
}

}  // namespace

std::string learning_curve_svg(const std::vector<Series>& seeds,
                               const std::string& title,
                               const std::string& xlabel,
                               const std::string& ylabel) {
  if (seeds.empty()) throw ConfigError("plot: no series");
  for (const Series& s : seeds)
    if (s.points.empty()) throw ConfigError("plot: empty series " + s.name);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : seeds) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  double ypad = (ymax == ymin) ? std::max(1.0, std::abs(ymax) * 0.1)
                               : 0.08 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
  };
  auto sy = [&](double y) {
    return kHeight - kBottom -
           (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"16\">" << title
     << "</text>\n";

  // Axes with a few ticks.
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom
     << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
     << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double x = xmin + (xmax - xmin) * t / 4.0;
    double y = ymin + (ymax - ymin) * t / 4.0;
    os << "<text x=\"" << sx(x) << "\" y=\"" << kHeight - kBottom + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << fmt(x) << "</text>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(y) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << fmt(y) << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
     << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << xlabel << "</text>\n";
  os << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel << "</text>\n";

  // Min/max envelope across seeds, evaluated on the shared x range.
  if (seeds.size() > 1) {
    std::set<double> xs;
    double lo = -1e300, hi = 1e300;
    for (const Series& s : seeds) {
      lo = std::max(lo, s.points.front().first);
      hi = std::min(hi, s.points.back().first);
      for (auto [x, y] : s.points) xs.insert(x);
    }
    std::vector<double> grid;
    for (double x : xs)
      if (x >= lo && x <= hi) grid.push_back(x);
    if (grid.size() >= 1) {
      std::ostringstream band;
      band << "<path d=\"";
      for (size_t i = 0; i < grid.size(); ++i) {
        double top = -1e300;
        for (const Series& s : seeds)
          top = std::max(top, interp(s.points, grid[i]));
        band << (i == 0 ? "M" : "L") << fmt(sx(grid[i])) << " "
             << fmt(sy(top)) << " ";
      }
      for (size_t i = grid.size(); i-- > 0;) {
        double bot = 1e300;
        for (const Series& s : seeds)
          bot = std::min(bot, interp(s.points, grid[i]));
        band << "L" << fmt(sx(grid[i])) << " " << fmt(sy(bot)) << " ";
      }
      band << "Z\" fill=\"#1f77b4\" opacity=\"0.15\" stroke=\"none\"/>";
      os << band.str() << "\n";
    }
  }

  for (size_t k = 0; k < seeds.size(); ++k) {
    const Series& s = seeds[k];
    const char* color = kColors[k % 8];
    if (s.points.size() == 1) {
      os << "<circle cx=\"" << fmt(sx(s.points[0].first)) << "\" cy=\""
         << fmt(sy(s.points[0].second)) << "\" r=\"4\" fill=\"" << color
         << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"";
      for (auto [x, y] : s.points)
        os << fmt(sx(x)) << "," << fmt(sy(y)) << " ";
      os << "\"/>\n";
    }
    os << "<text x=\"" << kWidth - kRight - 4 << "\" y=\""
       << kTop + 16 * (k + 1)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\" fill=\""
       << color << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_learning_curve_svg(const std::string& path,
                              const std::vector<Series>& seeds,
                              const std::string& title,
                              const std::string& xlabel,
                              const std::string& ylabel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write plot: " + path);
  out << learning_curve_svg(seeds, title, xlabel, ylabel);
}

}  // namespace nesyrl::cli
