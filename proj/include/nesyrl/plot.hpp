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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nesyrl/common.hpp"

namespace nesyrl::cli {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

/// Learning-curve SVG: per-seed mean line with a min/max envelope band when
/// several series are given; single points render as markers.
std::string learning_curve_svg(const std::vector<Series>& seeds,
                               const std::string& title,
                               const std::string& xlabel,
                               const std::string& ylabel);

void write_learning_curve_svg(const std::string& path,
                              const std::vector<Series>& seeds,
                              const std::string& title,
                              const std::string& xlabel,
                              const std::string& ylabel);

}  // namespace nesyrl::cli
