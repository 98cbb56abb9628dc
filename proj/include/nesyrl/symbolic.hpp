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

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "nesyrl/common.hpp"

namespace nesyrl::symbolic {

/// Predicate declaration. Every predicate is binary; unary relations are
/// flagged diagonal and materialize as P(x,x) atoms.
struct Predicate {
  std::string name;
  bool action = false;
  bool diagonal = false;
};

/// Entities and predicates of a domain, in declaration order. Entity
/// capacity is fixed per domain so matrix shapes (and therefore network
/// weights) stay constant while the active entity count varies.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> entities, std::vector<Predicate> preds);

  int capacity() const { return static_cast<int>(entities_.size()); }
  int num_predicates() const { return static_cast<int>(predicates_.size()); }
  int num_action_predicates() const { return n_action_; }

  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<Predicate>& predicates() const { return predicates_; }

  int entity_id(const std::string& name) const;
  int predicate_id(const std::string& name) const;
  const std::string& entity_name(int id) const;
  const Predicate& predicate(int id) const;

  /// Ids of action predicates in declaration order.
  std::vector<int> action_predicate_ids() const;

  void check_entity(int id) const;
  void check_predicate(int id) const;

  bool operator==(const Vocabulary& o) const;

 private:
  std::vector<std::string> entities_;
  std::vector<Predicate> predicates_;
  int n_action_ = 0;
};

struct GroundAtom {
  int predicate = -1;
  int subject = -1;
  int object = -1;

  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

/// One binary capacity x capacity matrix per predicate; entry (i,j) is 1
/// exactly when P(x_i, x_j) holds.
struct SymbolicState {
  std::vector<Matrix> mats;

  int num_predicates() const { return static_cast<int>(mats.size()); }
  int capacity() const {
    return mats.empty() ? 0 : static_cast<int>(mats[0].rows());
  }

  bool operator==(const SymbolicState& o) const {
    if (mats.size() != o.mats.size()) return false;
    for (size_t k = 0; k < mats.size(); ++k)
      if (mats[k] != o.mats[k]) return false;
    return true;
  }

  /// Compact fingerprint: one bitmask word per 64 matrix cells, row-major.
  std::vector<std::uint64_t> bit_key() const;
};

struct BitKeyHash {
  size_t operator()(const std::vector<std::uint64_t>& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : k) h = splitmix64(h ^ w);
    return static_cast<size_t>(h);
  }
};

/// N x capacity^2 matrix; row k is the row-major flattening of M_k.
struct FlatState {
  Matrix m;
};

SymbolicState zero_state(const Vocabulary& vocab);

/// Exactly the listed atoms set to 1.
SymbolicState encode(const std::vector<GroundAtom>& atoms,
                     const Vocabulary& vocab);

/// Exact inverse of encode; atoms in (predicate, subject, object) order.
std::vector<GroundAtom> decode(const SymbolicState& state);

FlatState flatten(const SymbolicState& state);

/// Inverse of flatten (given the vocabulary for shape).
SymbolicState unflatten(const FlatState& flat, const Vocabulary& vocab);

Vector one_hot(int entity_id, const Vocabulary& vocab);

/// Textual atom syntax: Pred(arg1,arg2).
std::string format_atom(const GroundAtom& atom, const Vocabulary& vocab);
GroundAtom parse_atom(const std::string& text, const Vocabulary& vocab);

}  // namespace nesyrl::symbolic
