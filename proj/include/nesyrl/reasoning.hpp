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

#include <vector>

#include "nesyrl/graph.hpp"
#include "nesyrl/symbolic.hpp"

namespace nesyrl::reasoning {

using numerics::Graph;
using numerics::Var;
using symbolic::SymbolicState;

/// Per-step predicate distributions (row t of s_phi is the step t+1
/// distribution over the N predicates) plus the path-length distribution
/// over lengths 1..T.
struct AttentionWeights {
  Matrix s_phi;      // T x N
  RowVector s_psi;   // 1 x T

  int steps() const { return static_cast<int>(s_phi.rows()); }
  int num_predicates() const { return static_cast<int>(s_phi.cols()); }

  /// Nonnegative entries, each row of s_phi and s_psi summing to 1 +- tol.
  void validate(double tol = 1e-9) const;
};

// --------------------------------------------------------------------------
// Plain (value-level) reasoning. Orientation convention: M_k(i,j) = 1 iff
// P_k(x_i, x_j); chain products compose left to right, so kappa(i,j) counts
// ordered relational paths x_i -> x_j and score(x, x') = v_x^T kappa v_x'.
// --------------------------------------------------------------------------

/// Convex combination sum_k w_k M_k of the state's predicate matrices.
Matrix mix_step(const RowVector& weights, const SymbolicState& state);

/// One reasoning hop: advances a path-feature vector along relation edges
/// (v at x_i flows to x_j when M(i,j) = 1, matching the orientation above).
Vector hop(const Matrix& step_matrix, const Vector& v);

/// kappa = sum_{t'=1..T} s_psi^(t') * (M^(1) ... M^(t')), with partial
/// products built incrementally (T matrix products total).
Matrix kappa(const AttentionWeights& weights, const SymbolicState& state);

double score(int x, int x_prime, const Matrix& kappa_matrix);

// --------------------------------------------------------------------------
// Graph (differentiable) reasoning over a flattened state constant.
// --------------------------------------------------------------------------

/// s_phi_t: 1xN distribution node; flat_state: N x |X|^2 constant.
Var mix_step(Var s_phi_t, Var flat_state, int capacity);

/// s_phi: T nodes of 1xN; s_psi: 1xT node.
Var kappa(const std::vector<Var>& s_phi, Var s_psi, Var flat_state,
          int capacity);

Var score(int x, int x_prime, Var kappa_matrix);

}  // namespace nesyrl::reasoning
