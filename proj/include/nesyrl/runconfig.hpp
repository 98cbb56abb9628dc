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

/// Run configuration: line-delimited `section.key = value` text with
/// `--section.key=value` command-line overrides.
struct RunConfig {
  std::uint64_t seed = 1;

  // env
  std::string env_domain = "blocks";  // blocks | keydoor
  std::string env_task = "unstack";   // unstack | stack | on
  std::string env_variant = "training";
  std::string env_piles;  // explicit pile tuple, overrides the variant
  std::string env_goal_on = "a,b";
  bool env_relabel = true;
  int env_horizon = 0;  // 0 = domain default
  bool env_mask_invalid = false;
  double env_success_prob = 1.0;
  bool env_train_bonus = true;  // keydoor: bonuses in training rewards

  // model
  int model_reasoning_steps = 4;
  int model_layers = 2;
  int model_heads = 4;
  int model_hidden = 64;
  int model_head_hidden = 64;
  int model_critic_hidden = 20;

  // trainer
  std::string trainer_algorithm = "ppo";  // ppo | dqn
  double trainer_lr = 1e-4;
  double trainer_gamma = 0.0;  // 0 = algorithm default (ppo 1.0, dqn 0.99)
  double trainer_lambda = 0.95;
  double trainer_clip = 0.2;
  int trainer_epochs = 4;
  int trainer_minibatch = 0;
  long trainer_episodes = 2000;
  int trainer_batch_episodes = 32;
  double trainer_value_coef = 0.5;
  double trainer_entropy_coef = 0.01;
  long trainer_steps = 30000;
  int trainer_buffer_capacity = 100000;
  int trainer_batch = 64;
  int trainer_target_sync = 1000;
  int trainer_train_every = 4;
  double trainer_eps_start = 1.0;
  double trainer_eps_end = 0.05;
  double trainer_eps_fraction = 0.4;
  long trainer_eval_every = 250;
  long trainer_eval_every_updates = 2;
  int trainer_eval_episodes = 0;  // 0 = algorithm default (ppo 100, dqn 1)
  std::string trainer_eval_mode;  // greedy | softmax; empty = default
  double trainer_reward_scale = 1.0;
  double trainer_stop_return = -1e300;
  long trainer_checkpoint_every = 0;

  // io
  std::string io_checkpoint = "checkpoint.nesyrl";
  std::string io_log = "train.log";

  /// Checks ranges (lr > 0, gamma in (0,1], T >= 1, ...).
  void validate() const;

  double effective_gamma() const;
  int effective_eval_episodes() const;
  std::string effective_eval_mode() const;
};

/// All recognized keys in sorted order.
std::vector<std::string> config_keys();

/// Canonical `key = value` lines (sorted keys, normalized values).
std::vector<std::pair<std::string, std::string>> to_key_values(
    const RunConfig& config);

/// Apply one key/value; context names the source for error anchoring.
void apply_key_value(RunConfig& config, const std::string& key,
                     const std::string& value, const std::string& context);

/// Parse a config file; errors carry file:line anchors.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text,
                            const std::string& name = "<config>");

/// `--key=value` tokens applied on top of a base config.
void apply_overrides(RunConfig& config,
                     const std::vector<std::string>& overrides);

/// Canonical double formatting used across config and checkpoint text
/// (round-trips exactly).
std::string format_double(double v);

}  // namespace nesyrl::cli
