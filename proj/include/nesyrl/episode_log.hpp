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

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nesyrl/common.hpp"

namespace nesyrl::cli {

/// Append-only line-delimited JSON records; crashes lose at most one line.
/// Episode indices must be non-decreasing.
class EpisodeLog {
 public:
  explicit EpisodeLog(const std::string& path);

  void write(const nlohmann::json& record);

 private:
  std::ofstream out_;
  long last_episode_ = -1;
};

/// Parse a log file; malformed lines raise ConfigError with the line number.
std::vector<nlohmann::json> read_log(const std::string& path);

}  // namespace nesyrl::cli
