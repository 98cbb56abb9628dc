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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nesyrl/attention.hpp"
#include "nesyrl/nn.hpp"
#include "nesyrl/reasoning.hpp"
#include "nesyrl/symbolic.hpp"

namespace nesyrl::policy {

using numerics::Adam;
using numerics::GraphParams;
using numerics::Mlp;
using numerics::ParamStore;
using numerics::Var;
using symbolic::GroundAtom;
using symbolic::SymbolicState;
using symbolic::Vocabulary;

using AtomList = std::vector<GroundAtom>;
using AtomListPtr = std::shared_ptr<const AtomList>;

struct ModelConfig {
  attention::Config attn;
  int head_hidden = 64;    // MLP_a hidden width
  int critic_hidden = 20;  // critic hidden width
  bool with_critic = false;
};

/// Attention parameters plus one value head MLP per action predicate and an
/// optional critic over the flattened state.
struct PolicyParams {
  Vocabulary vocab;
  ModelConfig cfg;
  ParamStore store;
  attention::Params attn;
  std::vector<Mlp> heads;     // aligned with vocab.action_predicate_ids()
  std::optional<Mlp> critic;  // input: N * |X|^2 flattened state
  std::uint64_t version = 0;  // bumped on every parameter change

  static PolicyParams init(const Vocabulary& vocab, const ModelConfig& cfg,
                           std::uint64_t seed);

  int capacity() const { return vocab.capacity(); }
  int d_model() const { return vocab.capacity() * vocab.capacity(); }
};

/// Differentiable pieces of one state's forward pass.
struct PolicyForward {
  attention::ForwardVars attn;
  Var kappa;
  std::vector<Var> head_out;  // per action predicate: |X| x |X| value matrix
  Var critic_value;           // 1x1 when requested
};

/// kappa is computed once per state; each head flattens it to a row, runs
/// MLP_a, and reshapes back so Q(Act_a(x,x')) reads entry (x,x').
PolicyForward policy_forward(GraphParams& gp, const PolicyParams& params,
                             const SymbolicState& state, bool with_critic);

/// Q for every (action predicate, x, x') triple over the given entities
/// (defaults to every vocabulary entity). Gradient-free.
std::map<GroundAtom, double> q_values(const SymbolicState& state,
                                      const PolicyParams& params,
                                      std::span<const int> entities = {});

// --------------------------------------------------------------------------
// Action selection
// --------------------------------------------------------------------------

enum class ActMode { GreedyEpsilon, Softmax };

/// Caches the Q row (aligned with the candidate list supplied per state)
/// and the critic value until the parameter version moves. Candidate lists
/// must be a function of the state, which holds for the bundled envs.
class QEvaluator {
 public:
  explicit QEvaluator(const PolicyParams& params, bool with_value = false);

  struct Entry {
    RowVector q;
    double value = 0.0;
  };

  const Entry& lookup(const SymbolicState& state,
                      std::span<const GroundAtom> candidates);

 private:
  const PolicyParams& params_;
  bool with_value_;
  std::uint64_t seen_version_;
  std::unordered_map<std::vector<std::uint64_t>, Entry, symbolic::BitKeyHash>
      cache_;
};

/// Greedy-epsilon picks the argmax with probability 1-eps, otherwise uniform;
/// softmax samples proportionally to exp(Q). Ties break toward the lowest
/// (predicate, subject, object) atom, which is the candidate order.
int act_index(const RowVector& q, ActMode mode, double epsilon, Rng& rng);

GroundAtom act(const SymbolicState& state, const PolicyParams& params,
               std::span<const GroundAtom> candidates, ActMode mode,
               double epsilon, Rng& rng);

/// Softmax probabilities over a Q row (max-subtracted).
RowVector softmax_probs(const RowVector& q);

// --------------------------------------------------------------------------
// Replay and trajectories
// --------------------------------------------------------------------------

struct Transition {
  SymbolicState state;
  GroundAtom action;
  double reward = 0.0;
  SymbolicState next;
  bool done = false;
  AtomListPtr candidates;  // action atoms available in this episode
};

/// Bounded FIFO with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return data_.size(); }
  const Transition& sample(Rng& rng) const;
  const Transition& at(size_t i) const { return data_[i]; }

 private:
  size_t capacity_;
  size_t head_ = 0;
  std::vector<Transition> data_;
};

struct TrajectoryStep {
  SymbolicState state;
  int action_index = -1;  // into the trajectory's candidate list
  double reward = 0.0;
  bool done = false;
  double log_prob = 0.0;  // behavior policy at collection time
  double value = 0.0;     // critic at collection time
};

/// Contiguous episode fragment with per-step log-probs and critic values.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  AtomListPtr candidates;
};

// --------------------------------------------------------------------------
// Losses and updates
// --------------------------------------------------------------------------

/// Mean squared TD error with a Double-Q target: the online net picks the
/// argmax action at s', the target net evaluates it. Terminal transitions
/// use target = r.
double q_loss(std::span<const Transition> batch, const PolicyParams& params,
              const PolicyParams& target_params, double gamma);

/// Same loss with gradients for an optimizer step. States are deduplicated
/// so each unique state runs one forward.
struct QLossGrads {
  double loss = 0.0;
  std::map<std::string, Matrix> grads;
};
QLossGrads q_loss_grads(std::span<const Transition> batch,
                        const PolicyParams& params,
                        const PolicyParams& target_params, double gamma);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value
};

/// Standard recursive generalized advantage estimation. Raw values; batch
/// normalization happens inside ppo_update.
GaeResult gae(const Trajectory& traj, double gamma, double lambda);

struct PpoSettings {
  double clip = 0.2;
  int epochs = 4;
  int minibatch = 0;  // transitions per gradient step; 0 = whole batch
  double gamma = 1.0;
  double lambda = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  bool normalize_advantages = true;
};

struct PpoDiagnostics {
  double first_loss = 0.0;  // total loss of the first gradient step
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  int gradient_steps = 0;
};

/// Clipped-surrogate update: policy loss + value_coef * value loss -
/// entropy_coef * entropy, minimized over `epochs` passes.
PpoDiagnostics ppo_update(std::span<const Trajectory> trajectories,
                          PolicyParams& params, Adam& opt,
                          const PpoSettings& settings, Rng& rng);

}  // namespace nesyrl::policy
