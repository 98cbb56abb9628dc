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

#include "nesyrl/symbolic.hpp"
#include "nesyrl/trainers.hpp"

namespace nesyrl::envs {

using policy::Env;
using policy::StepOut;
using symbolic::GroundAtom;
using symbolic::SymbolicState;
using symbolic::Vocabulary;

// --------------------------------------------------------------------------
// Blocks World
// --------------------------------------------------------------------------

enum class BlocksTask { Unstack, Stack, On };

BlocksTask blocks_task_from_name(const std::string& name);
std::string blocks_task_name(BlocksTask task);

/// Entities a..g plus floor (capacity 8); predicates On, Top (diagonal),
/// optionally GoalOn, and the action predicate Move.
Vocabulary blocks_vocabulary(bool with_goal_on);

struct BlocksConfig {
  BlocksTask task = BlocksTask::Unstack;
  /// Initial piles, bottom-first, canonical entity ids.
  std::vector<std::vector<int>> piles;
  /// ON goal template (subject, object).
  std::pair<int, int> goal_on = {0, 1};
  /// Training mode: each reset substitutes a random set of blocks for the
  /// template blocks.
  bool relabel = false;
  double step_penalty = -0.02;
  double success_reward = 1.0;
  int horizon = 50;
  bool mask_invalid = false;
  std::uint64_t seed = 0;
};

/// The per-task variants evaluated in the generalization table:
/// unstack: training, swap_top_2, two_columns, five/six/seven_blocks;
/// stack:   training, swap_right_2, two_columns, five/six/seven_blocks;
/// on:      training, swap_top_2, swap_mid_2, five/six/seven_blocks.
std::vector<std::string> blocks_variant_names(BlocksTask task);
BlocksConfig blocks_variant_config(BlocksTask task,
                                   const std::string& variant);

/// Parse pile tuple notation, e.g. ((a,b,c),(d)).
std::vector<std::vector<int>> parse_piles(const std::string& text,
                                          const Vocabulary& vocab);
std::string format_piles(const std::vector<std::vector<int>>& piles,
                         const Vocabulary& vocab);

class BlocksEnv : public Env {
 public:
  explicit BlocksEnv(BlocksConfig config);

  const Vocabulary& vocab() const override { return vocab_; }
  const std::vector<GroundAtom>& action_atoms() const override {
    return candidates_;
  }
  SymbolicState reset() override;
  StepOut step(const GroundAtom& action) override;
  std::vector<GroundAtom> valid_atoms() const override;
  bool mask_invalid() const override { return config_.mask_invalid; }

  const BlocksConfig& config() const { return config_; }
  const std::vector<int>& active_entities() const { return active_; }
  const SymbolicState& state() const { return state_; }

 private:
  BlocksConfig config_;
  Vocabulary vocab_;
  Rng rng_;
  SymbolicState state_;
  std::vector<int> active_;  // active blocks + floor
  std::vector<GroundAtom> candidates_;
  std::pair<int, int> goal_;  // episode goal (relabeled for ON)
  int steps_ = 0;
  bool done_ = true;
};

namespace blocks {

/// Pure transition pieces shared by the env and the MDP enumerator.
SymbolicState encode_piles(const std::vector<std::vector<int>>& piles,
                           const Vocabulary& vocab, BlocksTask task,
                           std::pair<int, int> goal_on);
bool move_valid(const SymbolicState& state, const Vocabulary& vocab,
                int mover, int dest);
SymbolicState apply_move(const SymbolicState& state, const Vocabulary& vocab,
                         int mover, int dest);
bool goal_holds(const SymbolicState& state, const Vocabulary& vocab,
                BlocksTask task, std::pair<int, int> goal,
                const std::vector<int>& active_blocks);

}  // namespace blocks

// --------------------------------------------------------------------------
// KeyDoor (desk-scale abstraction of the first Montezuma room)
// --------------------------------------------------------------------------

/// Entities man, key and six locations; predicates AtSpot, WithObject,
/// WithoutObject, PathExist, KeyToDoor and the action predicate Move.
Vocabulary keydoor_vocabulary();

struct KeyDoorConfig {
  /// Symmetric path edges between location entities. Empty = the default
  /// room route: middle_ladder - left_of_skulls - lower_left_ladder -
  /// lower_right_ladder - key_spot, plus middle_ladder - door.
  std::vector<std::pair<int, int>> adjacency;
  double decision_penalty = -0.5;
  double key_reward = 100.0;
  double door_reward = 300.0;
  double success_prob = 1.0;
  int horizon = 20;
  /// Evaluation reward mode: returns count the key/door bonuses instead of
  /// the per-decision penalty.
  bool eval_rewards = false;
  /// Training rewards include the key/door bonuses on top of the decision
  /// penalty. Without them the episode carries no learnable signal (random
  /// exploration essentially never completes the full loop), so this is on
  /// by default; turn it off for penalty-only training returns.
  bool train_bonus_rewards = true;
  bool mask_invalid = false;
  std::uint64_t seed = 0;
};

std::vector<std::pair<int, int>> keydoor_default_adjacency();

class KeyDoorEnv : public Env {
 public:
  explicit KeyDoorEnv(KeyDoorConfig config);

  const Vocabulary& vocab() const override { return vocab_; }
  const std::vector<GroundAtom>& action_atoms() const override {
    return candidates_;
  }
  SymbolicState reset() override;
  StepOut step(const GroundAtom& action) override;
  std::vector<GroundAtom> valid_atoms() const override;
  bool mask_invalid() const override { return config_.mask_invalid; }

  const KeyDoorConfig& config() const { return config_; }

 private:
  SymbolicState make_state(int man_loc, bool has_key) const;

  KeyDoorConfig config_;
  Vocabulary vocab_;
  Rng rng_;
  std::vector<GroundAtom> candidates_;
  int man_loc_ = -1;
  bool has_key_ = false;
  int steps_ = 0;
  bool done_ = true;
};

// --------------------------------------------------------------------------
// Exhaustive MDP enumeration and value iteration
// --------------------------------------------------------------------------

struct Outcome {
  int next = -1;
  double prob = 1.0;
  double reward = 0.0;
  bool done = false;
};

/// Reachable states (breadth-first from the initial state) with one action
/// set shared by every state.
struct EnumeratedMdp {
  int num_states = 0;
  int initial = 0;
  std::vector<GroundAtom> actions;
  std::vector<std::vector<std::vector<Outcome>>> transitions;  // [s][a]
  double gamma = 1.0;
  int horizon = 0;  // 0 = infinite horizon
};

constexpr size_t kDefaultStateCap = 1'000'000;

EnumeratedMdp enumerate_blocks(const BlocksConfig& config,
                               size_t max_states = kDefaultStateCap);
EnumeratedMdp enumerate_keydoor(const KeyDoorConfig& config,
                                size_t max_states = kDefaultStateCap);

struct ViResult {
  std::vector<double> values;
  double optimal_return = 0.0;
  long iterations = 0;
};

/// Finite-horizon runs exactly `horizon` backups; infinite-horizon iterates
/// to the sup-norm tolerance.
ViResult value_iteration(const EnumeratedMdp& mdp, double tolerance = 1e-12);

}  // namespace nesyrl::envs
