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

#include <functional>
#include <limits>
#include <memory>

#include "nesyrl/policy.hpp"

namespace nesyrl::policy {

struct StepOut {
  SymbolicState next;
  double reward = 0.0;
  bool done = false;
};

/// Episodic symbolic environment. Candidate action atoms are fixed per
/// instance and sorted by (predicate, subject, object).
class Env {
 public:
  virtual ~Env() = default;
  virtual const Vocabulary& vocab() const = 0;
  virtual const std::vector<GroundAtom>& action_atoms() const = 0;
  virtual SymbolicState reset() = 0;
  virtual StepOut step(const GroundAtom& action) = 0;
  /// Valid atoms in the current state, for invalid-action masking.
  virtual std::vector<GroundAtom> valid_atoms() const { return action_atoms(); }
  virtual bool mask_invalid() const { return false; }
};

struct EpisodeRecord {
  long episode = 0;
  long total_steps = 0;
  double episode_return = 0.0;
  int length = 0;
};

struct EvalRecord {
  long episode = 0;
  long total_steps = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  int episodes = 0;
};

struct TrainHooks {
  std::function<void(const EpisodeRecord&)> on_episode;
  std::function<void(const EvalRecord&)> on_eval;
  std::function<void(long episode)> on_checkpoint;
};

struct EvalSummary {
  double mean = 0.0;
  double stddev = 0.0;
  int episodes = 0;
};

/// Runs `episodes` rollouts under the given mode (shared Q cache across
/// episodes; parameters are frozen during evaluation).
EvalSummary evaluate(Env& env, const PolicyParams& params, ActMode mode,
                     double epsilon, int episodes, Rng& rng);

/// Rollouts under an arbitrary scripted policy (tests and oracles).
EvalSummary evaluate_policy(
    Env& env,
    const std::function<GroundAtom(const SymbolicState&, Rng&)>& pick,
    int episodes, Rng& rng);

constexpr double kNoStopReturn = -std::numeric_limits<double>::infinity();

struct DqnHyper {
  long steps = 30000;
  double gamma = 0.99;
  /// Multiplies rewards as they enter the replay buffer (training signal
  /// only; episode records and evaluation stay in env units).
  double reward_scale = 1.0;
  int buffer_capacity = 100000;
  int batch = 64;
  int target_sync = 1000;
  int train_every = 4;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.4;  // of total steps spent decaying
  long eval_every = 250;      // env steps between evaluations (0 = never)
  int eval_episodes = 1;
  ActMode eval_mode = ActMode::GreedyEpsilon;
  double stop_return = kNoStopReturn;
  long checkpoint_every_episodes = 0;  // 0 = only by the caller at the end
};

struct DqnResult {
  long steps_run = 0;
  long episodes = 0;
  bool stopped_early = false;
};

/// Standard loop: epsilon-greedy act, store, sample, Double-Q loss, Adam
/// step, periodic target sync. Deterministic given the rng.
DqnResult dqn_train(Env& env, Env& eval_env, PolicyParams& params,
                    numerics::Adam& opt, const DqnHyper& hyper, Rng& rng,
                    const TrainHooks& hooks = {});

struct PpoHyper {
  long episodes = 2000;
  int batch_episodes = 32;
  PpoSettings settings;
  /// Multiplies rewards entering GAE (training signal only).
  double reward_scale = 1.0;
  long eval_every_updates = 2;  // 0 = never
  int eval_episodes = 100;
  ActMode eval_mode = ActMode::Softmax;
  double stop_return = kNoStopReturn;
  long checkpoint_every_episodes = 0;
};

struct PpoResult {
  long episodes = 0;
  long updates = 0;
  bool stopped_early = false;
};

/// Collect batches of softmax-policy episodes and run clipped-surrogate
/// updates with GAE advantages.
PpoResult ppo_train(Env& env, Env& eval_env, PolicyParams& params,
                    numerics::Adam& opt, const PpoHyper& hyper, Rng& rng,
                    const TrainHooks& hooks = {});

}  // namespace nesyrl::policy
