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

#include "nesyrl/episode_log.hpp"

namespace nesyrl::cli {

EpisodeLog::EpisodeLog(const std::string& path)
    : out_(path, std::ios::binary | std::ios::app) {
  if (!out_) throw ConfigError("cannot open log for writing: " + path);
}

void EpisodeLog::write(const nlohmann::json& record) {
  if (record.contains("episode")) {
    long ep = record.at("episode").get<long>();
    if (ep < last_episode_)
      throw ContractError("episode log: episode index went backwards");
    last_episode_ = ep;
  }
  out_ << record.dump() << "\n";
  out_.flush();
}

std::vector<nlohmann::json> read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open log: " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": bad log record: " + e.what());
    }
  }
  return out;
}

}  // namespace nesyrl::cli
