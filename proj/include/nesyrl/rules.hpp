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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nesyrl/reasoning.hpp"
#include "nesyrl/symbolic.hpp"

namespace nesyrl::rules {

using reasoning::AttentionWeights;
using symbolic::SymbolicState;
using symbolic::Vocabulary;

struct ClauseParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Chain rule: ordered body predicates, an action-predicate head, the
/// attention-product confidence and the number of states aggregated.
struct ChainRule {
  std::vector<int> body;
  int head = -1;
  double confidence = 0.0;
  int support = 0;

  friend bool operator==(const ChainRule& a, const ChainRule& b) {
    return a.body == b.body && a.head == b.head;
  }
};

struct ChainConfidence {
  std::vector<int> body;
  double confidence = 0.0;
};

constexpr size_t kExhaustiveLimit = 100000;
constexpr int kBeamWidth = 256;

/// Confidence of chain (p_1..p_l): s_psi(l) * prod_t s_phi(t, p_t).
/// Exhaustive over all N + N^2 + ... + N^T chains when that count stays
/// within `exhaustive_limit`, otherwise a per-length beam search. Sorted by
/// descending confidence, ties by shorter then lexicographic body.
std::vector<ChainConfidence> chain_confidences(
    const AttentionWeights& weights,
    size_t exhaustive_limit = kExhaustiveLimit, int beam_width = kBeamWidth);

/// Replace every distribution by the one-hot argmax (debug mode for rule
/// extraction sanity checks).
AttentionWeights force_one_hot(const AttentionWeights& weights);

/// Mean confidence per chain across an evaluation-state sample; support is
/// the sample size. Chains a beam missed in some state contribute zero for
/// that state.
std::vector<ChainRule> aggregate(
    std::span<const std::vector<ChainConfidence>> per_state, int head);

/// Chain-variable clause text, e.g.
///   Move(X,Z2) <- On(X,Z1) ∧ On(Z1,Z2)
/// rendered with the arrow/conjunction symbols; diagonal predicates repeat
/// the current variable and do not advance the chain.
std::string render(const ChainRule& rule, const Vocabulary& vocab);

/// Inverse of render (accepts both the symbols and ASCII fallbacks <- and &).
ChainRule parse_clause(const std::string& text, const Vocabulary& vocab);

/// Grounded instantiation: entity binding for X, Z1..Zn realizing the body
/// in `state` (every edge present) that maximizes kappa(x, x_final); ties
/// break lexicographically. Empty when the body has no realized path.
std::optional<std::vector<int>> ground_chain(const ChainRule& rule,
                                             const SymbolicState& state,
                                             const Matrix& kappa,
                                             const Vocabulary& vocab);

std::string render_grounded(const ChainRule& rule,
                            const std::vector<int>& binding,
                            const Vocabulary& vocab);

}  // namespace nesyrl::rules
