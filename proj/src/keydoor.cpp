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

#include "nesyrl/envs.hpp"

namespace nesyrl::envs {

namespace {

// Entity ids in declaration order.
constexpr int kMan = 0;
constexpr int kKey = 1;
constexpr int kMiddleLadder = 2;
constexpr int kDoor = 3;
constexpr int kLeftOfSkulls = 4;
constexpr int kLowerLeft = 5;
constexpr int kLowerRight = 6;
constexpr int kKeySpot = 7;

constexpr int kFirstLocation = kMiddleLadder;

}  // namespace

Vocabulary keydoor_vocabulary() {
  std::vector<std::string> entities = {
      "man",          "key",
      "middle_ladder", "door",
      "left_of_skulls", "lower_left_ladder",
      "lower_right_ladder", "key_spot"};
  std::vector<symbolic::Predicate> preds;
  preds.push_back({"AtSpot", false, false});
  preds.push_back({"WithObject", false, false});
  preds.push_back({"WithoutObject", false, false});
  preds.push_back({"PathExist", false, false});
  preds.push_back({"KeyToDoor", false, false});
  preds.push_back({"Move", true, false});
  return Vocabulary(std::move(entities), std::move(preds));
}

std::vector<std::pair<int, int>> keydoor_default_adjacency() {
  return {{kMiddleLadder, kLeftOfSkulls},
          {kLeftOfSkulls, kLowerLeft},
          {kLowerLeft, kLowerRight},
          {kLowerRight, kKeySpot},
          {kMiddleLadder, kDoor}};
}

KeyDoorEnv::KeyDoorEnv(KeyDoorConfig config)
    : config_(std::move(config)),
      vocab_(keydoor_vocabulary()),
      rng_(Rng::stream(config_.seed, 0xD007)) {
  if (config_.horizon <= 0) throw ConfigError("keydoor: horizon must be > 0");
  if (config_.success_prob <= 0.0 || config_.success_prob > 1.0)
    throw ConfigError("keydoor: success_prob must be in (0, 1]");
  if (config_.adjacency.empty())
    config_.adjacency = keydoor_default_adjacency();
  for (auto [u, v] : config_.adjacency)
    if (u < kFirstLocation || u > kKeySpot || v < kFirstLocation ||
        v > kKeySpot)
      throw ConfigError("keydoor: adjacency over non-location entities");
  int move = vocab_.predicate_id("Move");
  for (int loc = kFirstLocation; loc <= kKeySpot; ++loc)
    candidates_.push_back({move, kMan, loc});
  std::sort(candidates_.begin(), candidates_.end());
}

SymbolicState KeyDoorEnv::make_state(int man_loc, bool has_key) const {
  std::vector<GroundAtom> atoms;
  int at = vocab_.predicate_id("AtSpot");
  int with = vocab_.predicate_id("WithObject");
  int without = vocab_.predicate_id("WithoutObject");
  int path = vocab_.predicate_id("PathExist");
  int ktd = vocab_.predicate_id("KeyToDoor");
  atoms.push_back({at, kMan, man_loc});
  atoms.push_back({has_key ? with : without, kMan, kKey});
  for (auto [u, v] : config_.adjacency) {
    atoms.push_back({path, u, v});
    atoms.push_back({path, v, u});
  }
  atoms.push_back({ktd, kKey, kDoor});
  return symbolic::encode(atoms, vocab_);
}

SymbolicState KeyDoorEnv::reset() {
  man_loc_ = kMiddleLadder;
  has_key_ = false;
  steps_ = 0;
  done_ = false;
  return make_state(man_loc_, has_key_);
}

StepOut KeyDoorEnv::step(const GroundAtom& action) {
  if (done_) throw ContractError("keydoor: step after episode end");
  if (action.predicate != vocab_.predicate_id("Move"))
    throw ContractError("keydoor: action predicate must be Move");
  if (action.subject != kMan)
    throw ContractError("keydoor: only the man moves");
  int target = action.object;
  if (target < kFirstLocation || target > kKeySpot)
    throw ContractError("keydoor: move target must be a location");

  StepOut out;
  out.reward = config_.eval_rewards ? 0.0 : config_.decision_penalty;

  bool connected = false;
  for (auto [u, v] : config_.adjacency)
    if ((u == man_loc_ && v == target) || (v == man_loc_ && u == target))
      connected = true;
  bool moved = connected;
  if (moved && config_.success_prob < 1.0)
    moved = rng_.uniform01() < config_.success_prob;

  bool bonuses = config_.eval_rewards || config_.train_bonus_rewards;
  if (moved) {
    man_loc_ = target;
    if (man_loc_ == kKeySpot && !has_key_) {
      has_key_ = true;
      if (bonuses) out.reward += config_.key_reward;
    }
    if (man_loc_ == kDoor && has_key_) {
      if (bonuses) out.reward += config_.door_reward;
      done_ = true;
    }
  }
  ++steps_;
  if (steps_ >= config_.horizon) done_ = true;
  out.next = make_state(man_loc_, has_key_);
  out.done = done_;
  return out;
}

std::vector<GroundAtom> KeyDoorEnv::valid_atoms() const {
  std::vector<GroundAtom> out;
  for (const GroundAtom& a : candidates_) {
    for (auto [u, v] : config_.adjacency) {
      if ((u == man_loc_ && v == a.object) ||
          (v == man_loc_ && u == a.object)) {
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

}  // namespace nesyrl::envs
