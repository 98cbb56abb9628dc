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
#include <set>

#include "nesyrl/envs.hpp"

namespace nesyrl::envs {

namespace {

constexpr int kNumBlocks = 7;  // a..g
constexpr int kFloor = 7;

const char* kBlockNames[] = {"a", "b", "c", "d", "e", "f", "g"};

}  // namespace

BlocksTask blocks_task_from_name(const std::string& name) {
  if (name == "unstack") return BlocksTask::Unstack;
  if (name == "stack") return BlocksTask::Stack;
  if (name == "on") return BlocksTask::On;
  throw ConfigError("unknown blocks task: " + name);
}

std::string blocks_task_name(BlocksTask task) {
  switch (task) {
    case BlocksTask::Unstack: return "unstack";
    case BlocksTask::Stack: return "stack";
    case BlocksTask::On: return "on";
  }
  throw ConfigError("bad blocks task");
}

Vocabulary blocks_vocabulary(bool with_goal_on) {
  std::vector<std::string> entities;
  for (const char* n : kBlockNames) entities.emplace_back(n);
  entities.emplace_back("floor");
  std::vector<symbolic::Predicate> preds;
  preds.push_back({"On", false, false});
  preds.push_back({"Top", false, true});
  if (with_goal_on) preds.push_back({"GoalOn", false, false});
  preds.push_back({"Move", true, false});
  return Vocabulary(std::move(entities), std::move(preds));
}

std::vector<std::string> blocks_variant_names(BlocksTask task) {
  switch (task) {
    case BlocksTask::Unstack:
      return {"training",    "swap_top_2", "two_columns",
              "five_blocks", "six_blocks", "seven_blocks"};
    case BlocksTask::Stack:
      return {"training",    "swap_right_2", "two_columns",
              "five_blocks", "six_blocks",   "seven_blocks"};
    case BlocksTask::On:
      return {"training",    "swap_top_2", "swap_mid_2",
              "five_blocks", "six_blocks", "seven_blocks"};
  }
  throw ConfigError("bad blocks task");
}

BlocksConfig blocks_variant_config(BlocksTask task,
                                   const std::string& variant) {
  Vocabulary vocab = blocks_vocabulary(task == BlocksTask::On);
  auto piles = [&](const std::string& text) {
    return parse_piles(text, vocab);
  };
  BlocksConfig cfg;
  cfg.task = task;
  switch (task) {
    case BlocksTask::Unstack:
      if (variant == "training") cfg.piles = piles("((a,b,c,d))");
      else if (variant == "swap_top_2") cfg.piles = piles("((a,b,d,c))");
      else if (variant == "two_columns") cfg.piles = piles("((a,b),(c,d))");
      else if (variant == "five_blocks") cfg.piles = piles("((a,b,c,d,e))");
      else if (variant == "six_blocks") cfg.piles = piles("((a,b,c,d,e,f))");
      else if (variant == "seven_blocks")
        cfg.piles = piles("((a,b,c,d,e,f,g))");
      else throw ConfigError("unknown unstack variant: " + variant);
      break;
    case BlocksTask::Stack:
      if (variant == "training") cfg.piles = piles("((a),(b),(c),(d))");
      else if (variant == "swap_right_2") cfg.piles = piles("((a),(b),(d),(c))");
      else if (variant == "two_columns") cfg.piles = piles("((a,b),(d,c))");
      else if (variant == "five_blocks")
        cfg.piles = piles("((a),(b),(c),(d),(e))");
      else if (variant == "six_blocks")
        cfg.piles = piles("((a),(b),(c),(d),(e),(f))");
      else if (variant == "seven_blocks")
        cfg.piles = piles("((a),(b),(c),(d),(e),(f),(g))");
      else throw ConfigError("unknown stack variant: " + variant);
      break;
    case BlocksTask::On:
      if (variant == "training") cfg.piles = piles("((a,b,c,d))");
      else if (variant == "swap_top_2") cfg.piles = piles("((a,b,d,c))");
      else if (variant == "swap_mid_2") cfg.piles = piles("((a,c,b,d))");
      else if (variant == "five_blocks") cfg.piles = piles("((a,b,c,d,e))");
      else if (variant == "six_blocks") cfg.piles = piles("((a,b,c,d,e,f))");
      else if (variant == "seven_blocks")
        cfg.piles = piles("((a,b,c,d,e,f,g))");
      else throw ConfigError("unknown on variant: " + variant);
      cfg.goal_on = {vocab.entity_id("a"), vocab.entity_id("b")};
      break;
  }
  return cfg;
}

std::vector<std::vector<int>> parse_piles(const std::string& text,
                                          const Vocabulary& vocab) {
  std::vector<std::vector<int>> piles;
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  if (i >= text.size() || text[i] != '(')
    throw ConfigError("piles: expected '(' in " + text);
  ++i;
  while (true) {
    skip_ws();
    if (i < text.size() && text[i] == ')') break;
    if (i >= text.size() || text[i] != '(')
      throw ConfigError("piles: expected '(' starting a pile in " + text);
    ++i;
    std::vector<int> pile;
    std::string name;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c == ',' || c == ')') {
        name.erase(std::remove_if(name.begin(), name.end(), ::isspace),
                   name.end());
        if (name.empty()) throw ConfigError("piles: empty name in " + text);
        pile.push_back(vocab.entity_id(name));
        name.clear();
        if (c == ')') break;
      } else {
        name.push_back(c);
      }
    }
    if (i >= text.size()) throw ConfigError("piles: unterminated pile");
    ++i;  // past ')'
    piles.push_back(std::move(pile));
    skip_ws();
    if (i < text.size() && text[i] == ',') ++i;
  }
  if (piles.empty()) throw ConfigError("piles: no piles in " + text);
  return piles;
}

std::string format_piles(const std::vector<std::vector<int>>& piles,
                         const Vocabulary& vocab) {
  std::string out = "(";
  for (size_t p = 0; p < piles.size(); ++p) {
    if (p) out += ",";
    out += "(";
    for (size_t i = 0; i < piles[p].size(); ++i) {
      if (i) out += ",";
      out += vocab.entity_name(piles[p][i]);
    }
    out += ")";
  }
  out += ")";
  return out;
}

namespace blocks {

SymbolicState encode_piles(const std::vector<std::vector<int>>& piles,
                           const Vocabulary& vocab, BlocksTask task,
                           std::pair<int, int> goal_on) {
  std::vector<GroundAtom> atoms;
  int on = vocab.predicate_id("On");
  int top = vocab.predicate_id("Top");
  for (const auto& pile : piles) {
    if (pile.empty()) throw ConfigError("blocks: empty pile");
    atoms.push_back({on, pile[0], kFloor});
    for (size_t i = 1; i < pile.size(); ++i)
      atoms.push_back({on, pile[i], pile[i - 1]});
    atoms.push_back({top, pile.back(), pile.back()});
  }
  if (task == BlocksTask::On) {
    int goal = vocab.predicate_id("GoalOn");
    atoms.push_back({goal, goal_on.first, goal_on.second});
  }
  return symbolic::encode(atoms, vocab);
}

bool move_valid(const SymbolicState& state, const Vocabulary& vocab,
                int mover, int dest) {
  if (mover == dest) return false;
  if (mover == kFloor || mover >= kNumBlocks) return false;
  int top = vocab.predicate_id("Top");
  if (state.mats[top](mover, mover) != 1.0) return false;
  if (dest == kFloor) return true;
  if (dest >= kNumBlocks || dest < 0) return false;
  return state.mats[top](dest, dest) == 1.0;
}

SymbolicState apply_move(const SymbolicState& state, const Vocabulary& vocab,
                         int mover, int dest) {
  SymbolicState next = state;
  int on = vocab.predicate_id("On");
  int top = vocab.predicate_id("Top");
  int support = -1;
  for (int j = 0; j < state.capacity(); ++j) {
    if (state.mats[on](mover, j) == 1.0) {
      support = j;
      break;
    }
  }
  if (support < 0) throw ContractError("blocks: mover has no On atom");
  if (support == dest) return next;  // re-placing on the same support
  next.mats[on](mover, support) = 0.0;
  next.mats[on](mover, dest) = 1.0;
  if (support != kFloor) next.mats[top](support, support) = 1.0;
  if (dest != kFloor) next.mats[top](dest, dest) = 0.0;
  return next;
}

bool goal_holds(const SymbolicState& state, const Vocabulary& vocab,
                BlocksTask task, std::pair<int, int> goal,
                const std::vector<int>& active_blocks) {
  int on = vocab.predicate_id("On");
  switch (task) {
    case BlocksTask::Unstack: {
      for (int b : active_blocks)
        if (state.mats[on](b, kFloor) != 1.0) return false;
      return true;
    }
    case BlocksTask::Stack: {
      int on_floor = 0;
      for (int b : active_blocks)
        if (state.mats[on](b, kFloor) == 1.0) ++on_floor;
      return on_floor == 1;
    }
    case BlocksTask::On:
      return state.mats[on](goal.first, goal.second) == 1.0;
  }
  return false;
}

}  // namespace blocks

BlocksEnv::BlocksEnv(BlocksConfig config)
    : config_(std::move(config)),
      vocab_(blocks_vocabulary(config_.task == BlocksTask::On)),
      rng_(Rng::stream(config_.seed, 0xB10C)) {
  if (config_.horizon <= 0) throw ConfigError("blocks: horizon must be > 0");
  if (config_.piles.empty()) throw ConfigError("blocks: no initial piles");
  std::set<int> seen;
  for (const auto& pile : config_.piles) {
    if (pile.empty()) throw ConfigError("blocks: empty pile");
    for (int b : pile) {
      if (b < 0 || b >= kNumBlocks)
        throw ConfigError("blocks: pile entry is not a block");
      if (!seen.insert(b).second)
        throw ConfigError("blocks: block appears twice in piles");
    }
  }
  if (config_.task == BlocksTask::On) {
    if (!seen.count(config_.goal_on.first))
      throw ConfigError("blocks: ON goal subject is not an active block");
    if (config_.goal_on.second != kFloor && !seen.count(config_.goal_on.second))
      throw ConfigError("blocks: ON goal object is not active");
  }
}

SymbolicState BlocksEnv::reset() {
  // Identify the template blocks in pile order.
  std::vector<int> tmpl;
  for (const auto& pile : config_.piles)
    for (int b : pile) tmpl.push_back(b);

  std::vector<int> mapping(kNumBlocks, -1);
  if (config_.relabel) {
    // Partial Fisher-Yates draw of |template| distinct blocks from a..g.
    std::vector<int> pool(kNumBlocks);
    std::iota(pool.begin(), pool.end(), 0);
    for (size_t i = 0; i < tmpl.size(); ++i) {
      int j = static_cast<int>(i) +
              rng_.uniform_int(static_cast<int>(pool.size() - i));
      std::swap(pool[i], pool[j]);
      mapping[tmpl[i]] = pool[i];
    }
  } else {
    for (int b : tmpl) mapping[b] = b;
  }

  std::vector<std::vector<int>> piles;
  for (const auto& pile : config_.piles) {
    std::vector<int> mapped;
    for (int b : pile) mapped.push_back(mapping[b]);
    piles.push_back(std::move(mapped));
  }
  goal_ = config_.goal_on;
  if (config_.task == BlocksTask::On) {
    goal_.first = mapping[config_.goal_on.first];
    goal_.second = config_.goal_on.second == kFloor
                       ? kFloor
                       : mapping[config_.goal_on.second];
  }

  active_.clear();
  for (const auto& pile : piles)
    for (int b : pile) active_.push_back(b);
  std::sort(active_.begin(), active_.end());
  active_.push_back(kFloor);

  int move = vocab_.predicate_id("Move");
  candidates_.clear();
  for (int x : active_)
    for (int y : active_)
      if (x != y) candidates_.push_back({move, x, y});
  std::sort(candidates_.begin(), candidates_.end());

  state_ = blocks::encode_piles(piles, vocab_, config_.task, goal_);
  steps_ = 0;
  done_ = false;
  return state_;
}

StepOut BlocksEnv::step(const GroundAtom& action) {
  if (done_) throw ContractError("blocks: step after episode end");
  if (action.predicate != vocab_.predicate_id("Move"))
    throw ContractError("blocks: action predicate must be Move");
  vocab_.check_entity(action.subject);
  vocab_.check_entity(action.object);

  StepOut out;
  out.reward = config_.step_penalty;
  if (blocks::move_valid(state_, vocab_, action.subject, action.object)) {
    state_ = blocks::apply_move(state_, vocab_, action.subject, action.object);
    std::vector<int> active_blocks(active_.begin(), active_.end() - 1);
    if (blocks::goal_holds(state_, vocab_, config_.task, goal_,
                           active_blocks)) {
      out.reward += config_.success_reward;
      done_ = true;
    }
  }
  ++steps_;
  if (steps_ >= config_.horizon) done_ = true;
  out.next = state_;
  out.done = done_;
  return out;
}

std::vector<GroundAtom> BlocksEnv::valid_atoms() const {
  std::vector<GroundAtom> out;
  for (const GroundAtom& a : candidates_)
    if (blocks::move_valid(state_, vocab_, a.subject, a.object))
      out.push_back(a);
  return out;
}

}  // namespace nesyrl::envs
