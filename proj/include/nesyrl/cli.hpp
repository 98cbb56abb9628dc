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

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nesyrl/checkpoint.hpp"
#include "nesyrl/envs.hpp"
#include "nesyrl/policy.hpp"
#include "nesyrl/runconfig.hpp"

namespace nesyrl::cli {

/// Exit codes: 0 success, 2 config error, 3 incompatibility, 4 capacity.
constexpr int kOk = 0;
constexpr int kErrOther = 1;
constexpr int kErrConfig = 2;
constexpr int kErrIncompatible = 3;
constexpr int kErrCapacity = 4;

/// Directory consulted for relative --config paths that do not resolve
/// against the working directory.
constexpr const char* kConfigDirEnvVar = "NESYRL_CONFIG_DIR";

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string checkpoint_path;
  std::string out_path;
  long episodes = -1;   // eval override
  long states = 100;    // rules sample size
  int topk = 10;
  bool force_onehot = false;
  bool ground = false;
  std::vector<std::string> overrides;   // --section.key=value
  std::vector<std::string> positional;  // plot log files
};

CliArgs parse_cli(const std::vector<std::string>& args);

/// Config resolution: file (if any) then overrides, then validate.
RunConfig resolve_config(const CliArgs& args);

policy::ModelConfig model_config(const RunConfig& config);

/// Environment factory. `training` keeps the configured relabeling;
/// otherwise relabeling is off. KeyDoor eval environments count bonus
/// rewards instead of decision penalties.
std::unique_ptr<policy::Env> make_env(const RunConfig& config, bool training,
                                      bool eval_rewards,
                                      std::uint64_t seed_stream);

int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_eval(const CliArgs& args, std::ostream& out);
int cmd_oracle(const RunConfig& config, std::ostream& out);
int cmd_rules(const CliArgs& args, std::ostream& out);
int cmd_plot(const CliArgs& args, std::ostream& out);

/// Full dispatch with exception-to-exit-code mapping.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace nesyrl::cli
