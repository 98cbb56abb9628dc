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

#include "nesyrl/runconfig.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nesyrl::cli {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

long parse_long(const std::string& v, const std::string& ctx) {
  try {
    size_t pos;
    long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(ctx + ": expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, const std::string& ctx) {
  try {
    size_t pos;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(ctx + ": expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& ctx) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(ctx + ": expected true/false, got '" + v + "'");
}

std::map<std::string, Field> build_registry() {
  std::map<std::string, Field> r;
  auto add_str = [&](const std::string& key, std::string RunConfig::*mem) {
    r[key] = {[mem](const RunConfig& c) { return c.*mem; },
              [mem](RunConfig& c, const std::string& v, const std::string&) {
                c.*mem = v;
              }};
  };
  auto add_int = [&](const std::string& key, int RunConfig::*mem) {
    r[key] = {[mem](const RunConfig& c) { return std::to_string(c.*mem); },
              [mem](RunConfig& c, const std::string& v,
                    const std::string& ctx) {
                c.*mem = static_cast<int>(parse_long(v, ctx));
              }};
  };
  auto add_long = [&](const std::string& key, long RunConfig::*mem) {
    r[key] = {[mem](const RunConfig& c) { return std::to_string(c.*mem); },
              [mem](RunConfig& c, const std::string& v,
                    const std::string& ctx) { c.*mem = parse_long(v, ctx); }};
  };
  auto add_double = [&](const std::string& key, double RunConfig::*mem) {
    r[key] = {[mem](const RunConfig& c) { return format_double(c.*mem); },
              [mem](RunConfig& c, const std::string& v,
                    const std::string& ctx) { c.*mem = parse_double(v, ctx); }};
  };
  auto add_bool = [&](const std::string& key, bool RunConfig::*mem) {
    r[key] = {[mem](const RunConfig& c) {
                return std::string(c.*mem ? "true" : "false");
              },
              [mem](RunConfig& c, const std::string& v,
                    const std::string& ctx) { c.*mem = parse_bool(v, ctx); }};
  };

  r["seed"] = {[](const RunConfig& c) { return std::to_string(c.seed); },
               [](RunConfig& c, const std::string& v, const std::string& ctx) {
                 c.seed = static_cast<std::uint64_t>(parse_long(v, ctx));
               }};
  add_str("env.domain", &RunConfig::env_domain);
  add_str("env.task", &RunConfig::env_task);
  add_str("env.variant", &RunConfig::env_variant);
  add_str("env.piles", &RunConfig::env_piles);
  add_str("env.goal_on", &RunConfig::env_goal_on);
  add_bool("env.relabel", &RunConfig::env_relabel);
  add_int("env.horizon", &RunConfig::env_horizon);
  add_bool("env.mask_invalid", &RunConfig::env_mask_invalid);
  add_double("env.success_prob", &RunConfig::env_success_prob);
  add_bool("env.train_bonus", &RunConfig::env_train_bonus);

  add_int("model.reasoning_steps", &RunConfig::model_reasoning_steps);
  add_int("model.layers", &RunConfig::model_layers);
  add_int("model.heads", &RunConfig::model_heads);
  add_int("model.hidden", &RunConfig::model_hidden);
  add_int("model.head_hidden", &RunConfig::model_head_hidden);
  add_int("model.critic_hidden", &RunConfig::model_critic_hidden);

  add_str("trainer.algorithm", &RunConfig::trainer_algorithm);
  add_double("trainer.lr", &RunConfig::trainer_lr);
  add_double("trainer.gamma", &RunConfig::trainer_gamma);
  add_double("trainer.lambda", &RunConfig::trainer_lambda);
  add_double("trainer.clip", &RunConfig::trainer_clip);
  add_int("trainer.epochs", &RunConfig::trainer_epochs);
  add_int("trainer.minibatch", &RunConfig::trainer_minibatch);
  add_long("trainer.episodes", &RunConfig::trainer_episodes);
  add_int("trainer.batch_episodes", &RunConfig::trainer_batch_episodes);
  add_double("trainer.value_coef", &RunConfig::trainer_value_coef);
  add_double("trainer.entropy_coef", &RunConfig::trainer_entropy_coef);
  add_long("trainer.steps", &RunConfig::trainer_steps);
  add_int("trainer.buffer_capacity", &RunConfig::trainer_buffer_capacity);
  add_int("trainer.batch", &RunConfig::trainer_batch);
  add_int("trainer.target_sync", &RunConfig::trainer_target_sync);
  add_int("trainer.train_every", &RunConfig::trainer_train_every);
  add_double("trainer.eps_start", &RunConfig::trainer_eps_start);
  add_double("trainer.eps_end", &RunConfig::trainer_eps_end);
  add_double("trainer.eps_fraction", &RunConfig::trainer_eps_fraction);
  add_long("trainer.eval_every", &RunConfig::trainer_eval_every);
  add_long("trainer.eval_every_updates",
           &RunConfig::trainer_eval_every_updates);
  add_int("trainer.eval_episodes", &RunConfig::trainer_eval_episodes);
  add_str("trainer.eval_mode", &RunConfig::trainer_eval_mode);
  add_double("trainer.reward_scale", &RunConfig::trainer_reward_scale);
  add_double("trainer.stop_return", &RunConfig::trainer_stop_return);
  add_long("trainer.checkpoint_every", &RunConfig::trainer_checkpoint_every);

  add_str("io.checkpoint", &RunConfig::io_checkpoint);
  add_str("io.log", &RunConfig::io_log);
  return r;
}

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> r = build_registry();
  return r;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::validate() const {
  if (env_domain != "blocks" && env_domain != "keydoor")
    throw ConfigError("env.domain must be blocks or keydoor");
  if (trainer_algorithm != "ppo" && trainer_algorithm != "dqn")
    throw ConfigError("trainer.algorithm must be ppo or dqn");
  if (trainer_lr <= 0.0) throw ConfigError("trainer.lr must be > 0");
  double g = effective_gamma();
  if (g <= 0.0 || g > 1.0)
    throw ConfigError("trainer.gamma must be in (0, 1]");
  if (model_reasoning_steps < 1)
    throw ConfigError("model.reasoning_steps must be >= 1");
  if (model_layers < 1) throw ConfigError("model.layers must be >= 1");
  if (model_heads < 1) throw ConfigError("model.heads must be >= 1");
  if (trainer_lambda < 0.0 || trainer_lambda > 1.0)
    throw ConfigError("trainer.lambda must be in [0, 1]");
  if (trainer_clip <= 0.0) throw ConfigError("trainer.clip must be > 0");
  if (trainer_reward_scale <= 0.0)
    throw ConfigError("trainer.reward_scale must be > 0");
  if (trainer_epochs < 1) throw ConfigError("trainer.epochs must be >= 1");
  if (trainer_batch_episodes < 1)
    throw ConfigError("trainer.batch_episodes must be >= 1");
  if (trainer_batch < 1) throw ConfigError("trainer.batch must be >= 1");
  if (trainer_buffer_capacity < trainer_batch)
    throw ConfigError("trainer.buffer_capacity must hold a batch");
  if (trainer_train_every < 1)
    throw ConfigError("trainer.train_every must be >= 1");
  if (trainer_target_sync < 1)
    throw ConfigError("trainer.target_sync must be >= 1");
  if (trainer_eps_start < 0 || trainer_eps_start > 1 || trainer_eps_end < 0 ||
      trainer_eps_end > 1)
    throw ConfigError("trainer.eps_start/eps_end must be in [0, 1]");
  if (trainer_eps_fraction <= 0 || trainer_eps_fraction > 1)
    throw ConfigError("trainer.eps_fraction must be in (0, 1]");
  if (env_success_prob <= 0.0 || env_success_prob > 1.0)
    throw ConfigError("env.success_prob must be in (0, 1]");
  if (env_horizon < 0) throw ConfigError("env.horizon must be >= 0");
  if (!trainer_eval_mode.empty() && trainer_eval_mode != "greedy" &&
      trainer_eval_mode != "softmax")
    throw ConfigError("trainer.eval_mode must be greedy or softmax");
  if (env_domain == "blocks") {
    // "all" is accepted by the oracle command only.
    if (env_task != "unstack" && env_task != "stack" && env_task != "on" &&
        env_task != "all")
      throw ConfigError("env.task must be unstack, stack or on");
  }
}

double RunConfig::effective_gamma() const {
  if (trainer_gamma > 0.0) return trainer_gamma;
  return trainer_algorithm == "dqn" ? 0.99 : 1.0;
}

int RunConfig::effective_eval_episodes() const {
  if (trainer_eval_episodes > 0) return trainer_eval_episodes;
  return trainer_algorithm == "dqn" ? 1 : 100;
}

std::string RunConfig::effective_eval_mode() const {
  if (!trainer_eval_mode.empty()) return trainer_eval_mode;
  return trainer_algorithm == "dqn" ? "greedy" : "softmax";
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : registry()) keys.push_back(k);
  return keys;
}

std::vector<std::pair<std::string, std::string>> to_key_values(
    const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, f] : registry()) out.emplace_back(k, f.get(config));
  return out;
}

void apply_key_value(RunConfig& config, const std::string& key,
                     const std::string& value, const std::string& context) {
  auto it = registry().find(key);
  if (it == registry().end())
    throw ConfigError(context + ": unknown key '" + key + "'");
  it->second.set(config, value, context + ": " + key);
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig config;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string ctx = name + ":" + std::to_string(lineno);
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ctx + ": expected 'key = value', got '" + s + "'");
    std::string key = strip(s.substr(0, eq));
    std::string value = strip(s.substr(eq + 1));
    apply_key_value(config, key, value, ctx);
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_overrides(RunConfig& config,
                     const std::vector<std::string>& overrides) {
  for (const std::string& token : overrides) {
    if (token.rfind("--", 0) != 0)
      throw ConfigError("override must look like --key=value: " + token);
    size_t eq = token.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like --key=value: " + token);
    std::string key = token.substr(2, eq - 2);
    std::string value = token.substr(eq + 1);
    apply_key_value(config, key, value, "override " + token);
  }
}

}  // namespace nesyrl::cli
