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

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "nesyrl/envs.hpp"

namespace nesyrl::envs {

namespace {

/// Generic breadth-first enumeration over a deterministic-or-branching
/// transition model on symbolic states.
struct Branch {
  SymbolicState next;
  double prob;
  double reward;
  bool done;
};

template <typename OutcomeFn>
EnumeratedMdp enumerate_generic(const SymbolicState& initial,
                                std::vector<GroundAtom> actions,
                                OutcomeFn&& outcomes, double gamma,
                                int horizon, size_t max_states) {
  EnumeratedMdp mdp;
  mdp.actions = std::move(actions);
  mdp.gamma = gamma;
  mdp.horizon = horizon;

  std::unordered_map<std::vector<std::uint64_t>, int, symbolic::BitKeyHash>
      index;
  std::vector<SymbolicState> states;
  std::deque<int> frontier;

  // Terminal next-states are interned as absorbing states (no outgoing
  // transitions) but never expanded.
  auto intern = [&](const SymbolicState& s, bool terminal) {
    auto key = s.bit_key();
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (states.size() >= max_states)
      throw CapacityError("enumerate: state-space cap exceeded (" +
                          std::to_string(max_states) + ")");
    int id = static_cast<int>(states.size());
    index.emplace(std::move(key), id);
    states.push_back(s);
    if (!terminal) frontier.push_back(id);
    return id;
  };

  mdp.initial = intern(initial, false);
  while (!frontier.empty()) {
    int s = frontier.front();
    frontier.pop_front();
    if (static_cast<size_t>(s) >= mdp.transitions.size())
      mdp.transitions.resize(s + 1);
    mdp.transitions[s].resize(mdp.actions.size());
    for (size_t a = 0; a < mdp.actions.size(); ++a) {
      std::vector<Branch> branches = outcomes(states[s], mdp.actions[a]);
      for (Branch& b : branches) {
        Outcome o;
        o.prob = b.prob;
        o.reward = b.reward;
        o.done = b.done;
        o.next = intern(b.next, b.done);
        mdp.transitions[s][a].push_back(o);
      }
    }
  }
  mdp.num_states = static_cast<int>(states.size());
  mdp.transitions.resize(mdp.num_states);
  return mdp;
}

}  // namespace

EnumeratedMdp enumerate_blocks(const BlocksConfig& config,
                               size_t max_states) {
  BlocksConfig canon = config;
  canon.relabel = false;  // enumeration runs on the canonical labels
  BlocksEnv env(canon);
  SymbolicState initial = env.reset();
  std::vector<GroundAtom> actions = env.action_atoms();
  const Vocabulary& vocab = env.vocab();
  std::vector<int> active_blocks(env.active_entities().begin(),
                                 env.active_entities().end() - 1);

  auto outcomes = [&, canon](const SymbolicState& s, const GroundAtom& a) {
    std::vector<Branch> out;
    Branch b;
    b.prob = 1.0;
    b.reward = canon.step_penalty;
    b.done = false;
    if (blocks::move_valid(s, vocab, a.subject, a.object)) {
      b.next = blocks::apply_move(s, vocab, a.subject, a.object);
      if (blocks::goal_holds(b.next, vocab, canon.task, canon.goal_on,
                             active_blocks)) {
        b.reward += canon.success_reward;
        b.done = true;
      }
    } else {
      b.next = s;
    }
    out.push_back(std::move(b));
    return out;
  };
  // The per-step horizon cut is modelled by finite-horizon value iteration.
  return enumerate_generic(initial, std::move(actions), outcomes,
                           /*gamma=*/1.0, canon.horizon, max_states);
}

EnumeratedMdp enumerate_keydoor(const KeyDoorConfig& config,
                                size_t max_states) {
  KeyDoorConfig canon = config;
  canon.seed = 0;
  if (canon.adjacency.empty()) canon.adjacency = keydoor_default_adjacency();
  KeyDoorEnv env(canon);
  SymbolicState initial = env.reset();
  std::vector<GroundAtom> actions = env.action_atoms();
  const Vocabulary& vocab = env.vocab();

  int at = vocab.predicate_id("AtSpot");
  int with = vocab.predicate_id("WithObject");
  int man = vocab.entity_id("man");
  int key = vocab.entity_id("key");
  int key_spot = vocab.entity_id("key_spot");
  int door = vocab.entity_id("door");

  auto outcomes = [&, canon](const SymbolicState& s, const GroundAtom& a) {
    int loc = -1;
    for (int j = 0; j < s.capacity(); ++j)
      if (s.mats[at](man, j) == 1.0) loc = j;
    bool has_key = s.mats[with](man, key) == 1.0;

    bool connected = false;
    for (auto [u, v] : canon.adjacency)
      if ((u == loc && v == a.object) || (v == loc && u == a.object))
        connected = true;

    double base = canon.eval_rewards ? 0.0 : canon.decision_penalty;
    auto state_for = [&](int man_loc, bool k) {
      std::vector<GroundAtom> atoms;
      atoms.push_back({at, man, man_loc});
      atoms.push_back({k ? with : vocab.predicate_id("WithoutObject"), man,
                       key});
      int path = vocab.predicate_id("PathExist");
      for (auto [u, v] : canon.adjacency) {
        atoms.push_back({path, u, v});
        atoms.push_back({path, v, u});
      }
      atoms.push_back({vocab.predicate_id("KeyToDoor"), key, door});
      return symbolic::encode(atoms, vocab);
    };

    bool bonuses = canon.eval_rewards || canon.train_bonus_rewards;
    auto moved_branch = [&](double prob) {
      Branch b;
      b.prob = prob;
      b.reward = base;
      bool k = has_key;
      int nloc = a.object;
      if (nloc == key_spot && !k) {
        k = true;
        if (bonuses) b.reward += canon.key_reward;
      }
      if (nloc == door && k) {
        if (bonuses) b.reward += canon.door_reward;
        b.done = true;
      } else {
        b.done = false;
      }
      b.next = state_for(nloc, k);
      return b;
    };
    auto stay_branch = [&](double prob) {
      Branch b;
      b.prob = prob;
      b.reward = base;
      b.done = false;
      b.next = state_for(loc, has_key);
      return b;
    };

    std::vector<Branch> out;
    if (!connected) {
      out.push_back(stay_branch(1.0));
    } else if (canon.success_prob >= 1.0) {
      out.push_back(moved_branch(1.0));
    } else {
      out.push_back(moved_branch(canon.success_prob));
      out.push_back(stay_branch(1.0 - canon.success_prob));
    }
    return out;
  };
  return enumerate_generic(initial, std::move(actions), outcomes,
                           /*gamma=*/1.0, canon.horizon, max_states);
}

ViResult value_iteration(const EnumeratedMdp& mdp, double tolerance) {
  if (mdp.gamma > 1.0 || mdp.gamma <= 0.0)
    throw ContractError("value_iteration: gamma must be in (0, 1]");
  if (mdp.horizon <= 0 && mdp.gamma >= 1.0)
    throw ContractError(
        "value_iteration: gamma = 1 requires a finite horizon");
  ViResult res;
  std::vector<double> v(mdp.num_states, 0.0);
  std::vector<double> next(mdp.num_states, 0.0);

  auto backup = [&](int s) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& outs : mdp.transitions[s]) {
      double q = 0.0;
      for (const Outcome& o : outs)
        q += o.prob * (o.reward + (o.done ? 0.0 : mdp.gamma * v[o.next]));
      best = std::max(best, q);
    }
    return mdp.transitions[s].empty() ? 0.0 : best;
  };

  if (mdp.horizon > 0) {
    for (int k = 0; k < mdp.horizon; ++k) {
      for (int s = 0; s < mdp.num_states; ++s) next[s] = backup(s);
      std::swap(v, next);
      ++res.iterations;
    }
  } else {
    for (;;) {
      double delta = 0.0;
      for (int s = 0; s < mdp.num_states; ++s) {
        next[s] = backup(s);
        delta = std::max(delta, std::abs(next[s] - v[s]));
      }
      std::swap(v, next);
      ++res.iterations;
      if (delta < tolerance) break;
    }
  }
  res.values = std::move(v);
  res.optimal_return = res.values[mdp.initial];
  return res;
}

}  // namespace nesyrl::envs
