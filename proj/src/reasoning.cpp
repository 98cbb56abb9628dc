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

#include "nesyrl/reasoning.hpp"

namespace nesyrl::reasoning {

void AttentionWeights::validate(double tol) const {
  if (s_psi.cols() != s_phi.rows())
    throw DimensionError("AttentionWeights: s_psi length != steps");
  auto check_row = [&](const RowVector& row, const char* what) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < row.cols(); ++i) {
      if (row(i) < 0.0)
        throw ContractError(std::string(what) + ": negative weight");
      sum += row(i);
    }
    if (std::abs(sum - 1.0) > tol)
      throw ContractError(std::string(what) + ": weights do not sum to 1");
  };
  for (Eigen::Index t = 0; t < s_phi.rows(); ++t)
    check_row(s_phi.row(t), "s_phi");
  check_row(s_psi, "s_psi");
}

Matrix mix_step(const RowVector& weights, const SymbolicState& state) {
  if (weights.cols() != state.num_predicates())
    throw DimensionError("mix_step: weight length != predicate count");
  int cap = state.capacity();
  Matrix out = Matrix::Zero(cap, cap);
  for (int k = 0; k < state.num_predicates(); ++k)
    out += weights(k) * state.mats[k];
  return out;
}

Vector hop(const Matrix& step_matrix, const Vector& v) {
  if (step_matrix.rows() != v.rows() ||
      step_matrix.rows() != step_matrix.cols())
    throw DimensionError("hop: dimensions disagree");
  // Row-vector form of the hop under the adopted orientation: starting mass
  // at x_i flows along edges M(i,j).
  return step_matrix.transpose() * v;
}

Matrix kappa(const AttentionWeights& weights, const SymbolicState& state) {
  if (weights.steps() < 1) throw ContractError("kappa: T must be >= 1");
  int cap = state.capacity();
  Matrix partial;
  Matrix acc = Matrix::Zero(cap, cap);
  for (int t = 0; t < weights.steps(); ++t) {
    Matrix step = mix_step(weights.s_phi.row(t), state);
    partial = (t == 0) ? step : Matrix(partial * step);
    acc += weights.s_psi(t) * partial;
  }
  return acc;
}

double score(int x, int x_prime, const Matrix& kappa_matrix) {
  if (x < 0 || x_prime < 0 || x >= kappa_matrix.rows() ||
      x_prime >= kappa_matrix.cols())
    throw VocabularyError("score: entity id out of range");
  return kappa_matrix(x, x_prime);
}

Var mix_step(Var s_phi_t, Var flat_state, int capacity) {
  const Matrix& w = s_phi_t.g->value(s_phi_t);
  const Matrix& f = flat_state.g->value(flat_state);
  if (w.rows() != 1 || w.cols() != f.rows())
    throw DimensionError("mix_step: weight length != predicate count");
  // Row k of the flat state is the row-major flattening of M_k, so the
  // weighted row combination reshapes back to sum_k w_k M_k.
  return numerics::reshape_rowmajor(numerics::matmul(s_phi_t, flat_state),
                                    capacity, capacity);
}

Var kappa(const std::vector<Var>& s_phi, Var s_psi, Var flat_state,
          int capacity) {
  if (s_phi.empty()) throw ContractError("kappa: T must be >= 1");
  const Matrix& psi = s_psi.g->value(s_psi);
  if (psi.rows() != 1 || psi.cols() != static_cast<Eigen::Index>(s_phi.size()))
    throw DimensionError("kappa: s_psi length != steps");
  Var partial, acc;
  for (size_t t = 0; t < s_phi.size(); ++t) {
    Var step = mix_step(s_phi[t], flat_state, capacity);
    partial = (t == 0) ? step : numerics::matmul(partial, step);
    Var term = numerics::scalar_mul(
        numerics::entry(s_psi, 0, static_cast<int>(t)), partial);
    acc = (t == 0) ? term : numerics::add(acc, term);
  }
  return acc;
}

Var score(int x, int x_prime, Var kappa_matrix) {
  return numerics::entry(kappa_matrix, x, x_prime);
}

}  // namespace nesyrl::reasoning
