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

#include "nesyrl/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nesyrl/episode_log.hpp"
#include "nesyrl/plot.hpp"
#include "nesyrl/rules.hpp"
#include "nesyrl/trainers.hpp"

namespace nesyrl::cli {

using nlohmann::json;

CliArgs parse_cli(const std::vector<std::string>& args) {
  CliArgs out;
  if (args.empty()) throw ConfigError("usage: nesyrl <command> [options]");
  out.command = args[0];
  for (size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto take_value = [&](const std::string& flag) {
      if (a.size() > flag.size() && a[flag.size()] == '=')
        return a.substr(flag.size() + 1);
      if (++i >= args.size()) throw ConfigError(flag + " needs a value");
      return args[i];
    };
    if (a.rfind("--config", 0) == 0 &&
        (a.size() == 8 || a[8] == '=')) {
      out.config_path = take_value("--config");
    } else if (a.rfind("--checkpoint", 0) == 0 &&
               (a.size() == 12 || a[12] == '=')) {
      out.checkpoint_path = take_value("--checkpoint");
    } else if (a.rfind("--out", 0) == 0 && (a.size() == 5 || a[5] == '=')) {
      out.out_path = take_value("--out");
    } else if (a.rfind("--episodes", 0) == 0 &&
               (a.size() == 10 || a[10] == '=')) {
      out.episodes = std::stol(take_value("--episodes"));
    } else if (a.rfind("--states", 0) == 0 &&
               (a.size() == 8 || a[8] == '=')) {
      out.states = std::stol(take_value("--states"));
    } else if (a.rfind("--topk", 0) == 0 && (a.size() == 6 || a[6] == '=')) {
      out.topk = static_cast<int>(std::stol(take_value("--topk")));
    } else if (a == "--force-onehot") {
      out.force_onehot = true;
    } else if (a == "--ground") {
      out.ground = true;
    } else if (a.rfind("--", 0) == 0) {
      out.overrides.push_back(a);
    } else {
      out.positional.push_back(a);
    }
  }
  return out;
}

namespace {

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (!fs::path(path).is_absolute()) {
    const char* dir = std::getenv(kConfigDirEnvVar);
    if (dir != nullptr) {
      fs::path candidate = fs::path(dir) / path;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  throw ConfigError("config file not found: " + path);
}

std::uint64_t env_seed(const RunConfig& config, std::uint64_t stream) {
  return splitmix64(config.seed ^ splitmix64(stream));
}

std::pair<int, int> parse_goal(const RunConfig& config,
                               const symbolic::Vocabulary& vocab) {
  std::string text = config.env_goal_on;
  size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw ConfigError("env.goal_on must look like a,b");
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    return s;
  };
  return {vocab.entity_id(strip(text.substr(0, comma))),
          vocab.entity_id(strip(text.substr(comma + 1)))};
}

envs::BlocksConfig blocks_config_of(const RunConfig& config, bool training,
                                    std::uint64_t seed_stream) {
  envs::BlocksTask task = envs::blocks_task_from_name(config.env_task);
  envs::BlocksConfig bc;
  if (config.env_piles.empty()) {
    bc = envs::blocks_variant_config(task, config.env_variant);
  } else {
    bc.task = task;
    symbolic::Vocabulary vocab =
        envs::blocks_vocabulary(task == envs::BlocksTask::On);
    bc.piles = envs::parse_piles(config.env_piles, vocab);
    if (task == envs::BlocksTask::On) bc.goal_on = parse_goal(config, vocab);
  }
  bc.relabel = training && config.env_relabel;
  if (config.env_horizon > 0) bc.horizon = config.env_horizon;
  bc.mask_invalid = config.env_mask_invalid;
  bc.seed = env_seed(config, seed_stream);
  return bc;
}

envs::KeyDoorConfig keydoor_config_of(const RunConfig& config,
                                      bool eval_rewards,
                                      std::uint64_t seed_stream) {
  envs::KeyDoorConfig kc;
  kc.success_prob = config.env_success_prob;
  if (config.env_horizon > 0) kc.horizon = config.env_horizon;
  kc.eval_rewards = eval_rewards;
  kc.train_bonus_rewards = config.env_train_bonus;
  kc.mask_invalid = config.env_mask_invalid;
  kc.seed = env_seed(config, seed_stream);
  return kc;
}

policy::ActMode act_mode_of(const RunConfig& config) {
  return config.effective_eval_mode() == "greedy"
             ? policy::ActMode::GreedyEpsilon
             : policy::ActMode::Softmax;
}

json eval_record(long episode, long steps, const policy::EvalSummary& es,
                 const RunConfig& config) {
  return json{{"kind", "eval"},       {"episode", episode},
              {"steps", steps},       {"return", es.mean},
              {"return_std", es.stddev}, {"eval_episodes", es.episodes},
              {"task", config.env_task}, {"variant", config.env_variant}};
}

}  // namespace

RunConfig resolve_config(const CliArgs& args) {
  RunConfig config;
  if (!args.config_path.empty())
    config = parse_config_file(resolve_config_path(args.config_path));
  apply_overrides(config, args.overrides);
  config.validate();
  return config;
}

policy::ModelConfig model_config(const RunConfig& config) {
  policy::ModelConfig mc;
  mc.attn.steps = config.model_reasoning_steps;
  mc.attn.layers = config.model_layers;
  mc.attn.heads = config.model_heads;
  mc.attn.hidden = config.model_hidden;
  mc.head_hidden = config.model_head_hidden;
  mc.critic_hidden = config.model_critic_hidden;
  mc.with_critic = config.trainer_algorithm == "ppo";
  return mc;
}

std::unique_ptr<policy::Env> make_env(const RunConfig& config, bool training,
                                      bool eval_rewards,
                                      std::uint64_t seed_stream) {
  if (config.env_domain == "blocks")
    return std::make_unique<envs::BlocksEnv>(
        blocks_config_of(config, training, seed_stream));
  if (config.env_domain == "keydoor")
    return std::make_unique<envs::KeyDoorEnv>(
        keydoor_config_of(config, eval_rewards, seed_stream));
  throw ConfigError("unknown env.domain: " + config.env_domain);
}

int cmd_train(const RunConfig& config, std::ostream& out) {
  auto train_env = make_env(config, /*training=*/true, /*eval_rewards=*/false,
                            11);
  auto curve_env = make_env(config, /*training=*/true, /*eval_rewards=*/true,
                            12);
  policy::PolicyParams params = policy::PolicyParams::init(
      train_env->vocab(), model_config(config), config.seed);
  numerics::Adam opt(config.trainer_lr);
  Rng rng = Rng::stream(config.seed, 21);
  EpisodeLog log(config.io_log);

  TrainerState ts;
  ts.algorithm = config.trainer_algorithm;
  auto write_checkpoint = [&](long episode, long step, double eps) {
    ts.episode = episode;
    ts.step = step;
    ts.epsilon = eps;
    ts.adam_t = opt.t();
    ts.version = params.version;
    Checkpoint ck = make_checkpoint(config, params, ts, rng.serialize());
    for (const auto& e : params.store.entries()) {
      auto m1 = opt.m1().find(e.name);
      if (m1 != opt.m1().end()) ck.moment1.emplace_back(e.name, m1->second);
      auto m2 = opt.m2().find(e.name);
      if (m2 != opt.m2().end()) ck.moment2.emplace_back(e.name, m2->second);
    }
    save_checkpoint(ck, config.io_checkpoint);
  };

  long last_step = 0;
  policy::TrainHooks hooks;
  hooks.on_episode = [&](const policy::EpisodeRecord& r) {
    last_step = r.total_steps;
    log.write(json{{"kind", "episode"},
                   {"episode", r.episode},
                   {"steps", r.total_steps},
                   {"return", r.episode_return},
                   {"length", r.length},
                   {"task", config.env_task},
                   {"variant", config.env_variant}});
  };
  hooks.on_eval = [&](const policy::EvalRecord& r) {
    policy::EvalSummary es{r.mean_return, r.std_return, r.episodes};
    log.write(eval_record(r.episode, r.total_steps, es, config));
  };
  hooks.on_checkpoint = [&](long episode) {
    write_checkpoint(episode, last_step, 0.0);
  };

  if (config.trainer_algorithm == "dqn") {
    policy::DqnHyper h;
    h.steps = config.trainer_steps;
    h.gamma = config.effective_gamma();
    h.reward_scale = config.trainer_reward_scale;
    h.buffer_capacity = config.trainer_buffer_capacity;
    h.batch = config.trainer_batch;
    h.target_sync = config.trainer_target_sync;
    h.train_every = config.trainer_train_every;
    h.eps_start = config.trainer_eps_start;
    h.eps_end = config.trainer_eps_end;
    h.eps_fraction = config.trainer_eps_fraction;
    h.eval_every = config.trainer_eval_every;
    h.eval_episodes = config.effective_eval_episodes();
    h.eval_mode = act_mode_of(config);
    if (config.trainer_stop_return > -1e299)
      h.stop_return = config.trainer_stop_return;
    h.checkpoint_every_episodes = config.trainer_checkpoint_every;
    policy::DqnResult r =
        policy::dqn_train(*train_env, *curve_env, params, opt, h, rng, hooks);
    write_checkpoint(r.episodes, r.steps_run, h.eps_end);
    out << "trained dqn: " << r.steps_run << " steps, " << r.episodes
        << " episodes" << (r.stopped_early ? " (stopped early)" : "") << "\n";
  } else {
    policy::PpoHyper h;
    h.episodes = config.trainer_episodes;
    h.batch_episodes = config.trainer_batch_episodes;
    h.reward_scale = config.trainer_reward_scale;
    h.settings.clip = config.trainer_clip;
    h.settings.epochs = config.trainer_epochs;
    h.settings.minibatch = config.trainer_minibatch;
    h.settings.gamma = config.effective_gamma();
    h.settings.lambda = config.trainer_lambda;
    h.settings.value_coef = config.trainer_value_coef;
    h.settings.entropy_coef = config.trainer_entropy_coef;
    h.eval_every_updates = config.trainer_eval_every_updates;
    h.eval_episodes = config.effective_eval_episodes();
    h.eval_mode = act_mode_of(config);
    if (config.trainer_stop_return > -1e299)
      h.stop_return = config.trainer_stop_return;
    h.checkpoint_every_episodes = config.trainer_checkpoint_every;
    policy::PpoResult r =
        policy::ppo_train(*train_env, *curve_env, params, opt, h, rng, hooks);
    write_checkpoint(r.episodes, 0, 0.0);
    out << "trained ppo: " << r.episodes << " episodes, " << r.updates
        << " updates" << (r.stopped_early ? " (stopped early)" : "") << "\n";
  }
  return kOk;
}

int cmd_eval(const CliArgs& args, std::ostream& out) {
  if (args.checkpoint_path.empty())
    throw ConfigError("eval: --checkpoint is required");
  Checkpoint ck = load_checkpoint(args.checkpoint_path);
  RunConfig config = config_from_checkpoint(ck);
  apply_overrides(config, args.overrides);
  config.validate();

  int episodes =
      args.episodes >= 0 ? static_cast<int>(args.episodes)
                         : config.effective_eval_episodes();
  if (episodes <= 0) throw ConfigError("eval: episodes must be > 0");

  auto env = make_env(config, /*training=*/config.env_relabel,
                      /*eval_rewards=*/true, 31);
  if (!(env->vocab() == ck.vocab))
    throw IncompatibilityError(
        "checkpoint vocabulary does not match the environment");
  policy::PolicyParams params = params_from_checkpoint(ck);
  Rng rng = Rng::stream(config.seed, 22);
  policy::EvalSummary es =
      policy::evaluate(*env, params, act_mode_of(config), 0.0, episodes, rng);

  char line[160];
  std::snprintf(line, sizeof(line),
                "eval return %.4f ± %.4f over %d episodes (%s/%s)", es.mean,
                es.stddev, es.episodes, config.env_task.c_str(),
                config.env_variant.c_str());
  out << line << "\n";
  EpisodeLog log(config.io_log);
  log.write(eval_record(ck.trainer.episode, ck.trainer.step, es, config));
  return kOk;
}

int cmd_oracle(const RunConfig& config, std::ostream& out) {
  char line[160];
  if (config.env_domain == "keydoor") {
    out << "domain  mode      states  optimal_return\n";
    for (bool eval_rewards : {false, true}) {
      envs::KeyDoorConfig kc = keydoor_config_of(config, eval_rewards, 0);
      envs::EnumeratedMdp mdp = envs::enumerate_keydoor(kc);
      envs::ViResult vi = envs::value_iteration(mdp);
      std::snprintf(line, sizeof(line), "keydoor %-9s %6d  %.9f",
                    eval_rewards ? "eval" : "training", mdp.num_states,
                    vi.optimal_return);
      out << line << "\n";
    }
    return kOk;
  }
  std::vector<envs::BlocksTask> tasks;
  if (config.env_task == "all") {
    tasks = {envs::BlocksTask::Unstack, envs::BlocksTask::Stack,
             envs::BlocksTask::On};
  } else {
    tasks = {envs::blocks_task_from_name(config.env_task)};
  }
  out << "task     variant       states  optimal_return\n";
  for (envs::BlocksTask task : tasks) {
    for (const std::string& variant : envs::blocks_variant_names(task)) {
      envs::BlocksConfig bc = envs::blocks_variant_config(task, variant);
      if (config.env_horizon > 0) bc.horizon = config.env_horizon;
      envs::EnumeratedMdp mdp = envs::enumerate_blocks(bc);
      envs::ViResult vi = envs::value_iteration(mdp);
      std::snprintf(line, sizeof(line), "%-8s %-13s %6d  %.9f",
                    envs::blocks_task_name(task).c_str(), variant.c_str(),
                    mdp.num_states, vi.optimal_return);
      out << line << "\n";
    }
  }
  return kOk;
}

int cmd_rules(const CliArgs& args, std::ostream& out) {
  if (args.checkpoint_path.empty())
    throw ConfigError("rules: --checkpoint is required");
  if (args.states <= 0) throw ConfigError("rules: --states must be > 0");
  Checkpoint ck = load_checkpoint(args.checkpoint_path);
  RunConfig config = config_from_checkpoint(ck);
  apply_overrides(config, args.overrides);
  config.validate();

  auto env = make_env(config, /*training=*/config.env_relabel,
                      /*eval_rewards=*/false, 41);
  if (!(env->vocab() == ck.vocab))
    throw IncompatibilityError(
        "checkpoint vocabulary does not match the environment");
  policy::PolicyParams params = params_from_checkpoint(ck);
  Rng rng = Rng::stream(config.seed, 23);

  // Sample visited states with the stochastic policy.
  std::vector<symbolic::SymbolicState> states;
  policy::QEvaluator actor(params);
  while (states.size() < static_cast<size_t>(args.states)) {
    symbolic::SymbolicState s = env->reset();
    const auto& cands = env->action_atoms();
    bool done = false;
    while (!done && states.size() < static_cast<size_t>(args.states)) {
      states.push_back(s);
      const auto& e = actor.lookup(s, cands);
      int idx = policy::act_index(e.q, policy::ActMode::Softmax, 0.0, rng);
      policy::StepOut step = env->step(cands[idx]);
      s = std::move(step.next);
      done = step.done;
    }
  }

  std::vector<std::vector<rules::ChainConfidence>> per_state;
  per_state.reserve(states.size());
  for (const auto& s : states) {
    reasoning::AttentionWeights w = attention::forward_weights(
        params.attn, params.store, symbolic::flatten(s));
    if (args.force_onehot) w = rules::force_one_hot(w);
    per_state.push_back(rules::chain_confidences(w));
  }

  json rule_records = json::array();
  for (int head : params.vocab.action_predicate_ids()) {
    std::vector<rules::ChainRule> ranked = rules::aggregate(per_state, head);
    int k = std::min<int>(args.topk, static_cast<int>(ranked.size()));
    out << "top " << k << " rules for head "
        << params.vocab.predicate(head).name << " (aggregated over "
        << states.size() << " states):\n";
    for (int i = 0; i < k; ++i) {
      std::string clause = rules::render(ranked[i], params.vocab);
      char conf[32];
      std::snprintf(conf, sizeof(conf), "%.4f", ranked[i].confidence);
      out << conf << "  " << clause << "\n";
      if (args.ground) {
        Matrix kap = reasoning::kappa(
            attention::forward_weights(params.attn, params.store,
                                       symbolic::flatten(states.front())),
            states.front());
        auto binding =
            rules::ground_chain(ranked[i], states.front(), kap, params.vocab);
        if (binding)
          out << "        "
              << rules::render_grounded(ranked[i], *binding, params.vocab)
              << "\n";
      }
      rule_records.push_back(json{{"confidence", ranked[i].confidence},
                                  {"clause", clause},
                                  {"support", ranked[i].support}});
    }
  }
  EpisodeLog log(config.io_log);
  log.write(json{{"kind", "rules"},
                 {"episode", ck.trainer.episode},
                 {"steps", ck.trainer.step},
                 {"task", config.env_task},
                 {"variant", config.env_variant},
                 {"rules", rule_records}});
  return kOk;
}

int cmd_plot(const CliArgs& args, std::ostream& out) {
  if (args.positional.empty())
    throw ConfigError("plot: give at least one log file");
  std::string out_path = args.out_path.empty() ? "curve.svg" : args.out_path;
  std::vector<Series> seeds;
  for (const std::string& path : args.positional) {
    Series s;
    s.name = std::filesystem::path(path).filename().string();
    for (const json& rec : read_log(path)) {
      if (rec.value("kind", "") != "eval") continue;
      s.points.emplace_back(rec.at("steps").get<double>(),
                            rec.at("return").get<double>());
    }
    if (s.points.empty()) {
      // Fall back to per-episode returns when a log has no eval records.
      for (const json& rec : read_log(path)) {
        if (rec.value("kind", "") != "episode") continue;
        s.points.emplace_back(rec.at("steps").get<double>(),
                              rec.at("return").get<double>());
      }
    }
    if (s.points.empty())
      throw ConfigError("plot: no usable records in " + path);
    std::sort(s.points.begin(), s.points.end());
    seeds.push_back(std::move(s));
  }
  write_learning_curve_svg(out_path, seeds, "learning curve", "env steps",
                           "return");
  out << "wrote " << out_path << "\n";
  return kOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  try {
    CliArgs cli = parse_cli(args);
    if (cli.command == "train") return cmd_train(resolve_config(cli), out);
    if (cli.command == "eval") return cmd_eval(cli, out);
    if (cli.command == "oracle") return cmd_oracle(resolve_config(cli), out);
    if (cli.command == "rules") return cmd_rules(cli, out);
    if (cli.command == "plot") return cmd_plot(cli, out);
    throw ConfigError("unknown command: " + cli.command +
                      " (expected train, eval, oracle, rules or plot)");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kErrConfig;
  } catch (const IncompatibilityError& e) {
    err << "incompatibility: " << e.what() << "\n";
    return kErrIncompatible;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kErrCapacity;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kErrOther;
  }
}

}  // namespace nesyrl::cli
