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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nesyrl/graph.hpp"

namespace nesyrl::numerics {

/// Named parameter matrices with stable insertion order. The order defines
/// checkpoint layout and optimizer iteration, so runs are reproducible.
class ParamStore {
 public:
  Matrix& add(const std::string& name, Matrix init) {
    if (index_.count(name))
      throw ContractError("ParamStore: duplicate name " + name);
    index_[name] = entries_.size();
    entries_.push_back({name, std::move(init)});
    return entries_.back().value;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  Matrix& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
      throw ContractError("ParamStore: unknown name " + name);
    return entries_[it->second].value;
  }

  const Matrix& at(const std::string& name) const {
    return const_cast<ParamStore*>(this)->at(name);
  }

  struct Entry {
    std::string name;
    Matrix value;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, size_t> index_;
};

/// Leases store parameters onto a graph, as gradient leaves when trainable
/// and as constants otherwise. Each parameter becomes at most one node per
/// graph, so repeated lookups share the node.
class GraphParams {
 public:
  GraphParams(Graph& g, const ParamStore& store, bool trainable)
      : g_(g), store_(store), trainable_(trainable) {}

  Var operator[](const std::string& name) {
    auto it = leased_.find(name);
    if (it != leased_.end()) return it->second;
    const Matrix& m = store_.at(name);
    Var v = trainable_ ? g_.param(m) : g_.constant(m);
    leased_.emplace(name, v);
    return v;
  }

  Graph& graph() { return g_; }

  /// Gradients of every leased parameter after backward().
  std::map<std::string, Matrix> grads() const {
    std::map<std::string, Matrix> out;
    for (const auto& [name, v] : leased_) out.emplace(name, g_.grad(v));
    return out;
  }

 private:
  Graph& g_;
  const ParamStore& store_;
  bool trainable_;
  std::map<std::string, Var> leased_;
};

enum class Activation { Identity, Relu };

/// Feed-forward network: widths[0] inputs through widths.back() outputs.
/// `hidden_act` applies between layers, `output_act` after the last one.
struct MlpSpec {
  std::vector<int> widths;
  Activation hidden_act = Activation::Relu;
  Activation output_act = Activation::Identity;

  void validate() const {
    if (widths.size() < 2)
      throw ConfigError("MlpSpec: need at least one layer");
    for (int w : widths)
      if (w <= 0) throw ConfigError("MlpSpec: widths must be positive");
  }

  int layers() const { return static_cast<int>(widths.size()) - 1; }
};

/// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
inline Matrix uniform_init(int rows, int cols, int fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rng.uniform(-bound, bound);
  return m;
}

/// Binds an MlpSpec to named weight/bias matrices in a ParamStore.
class Mlp {
 public:
  Mlp() = default;

  Mlp(ParamStore& store, std::string prefix, MlpSpec spec, Rng& rng)
      : prefix_(std::move(prefix)), spec_(std::move(spec)) {
    spec_.validate();
    for (int l = 0; l < spec_.layers(); ++l) {
      int in = spec_.widths[l], out = spec_.widths[l + 1];
      store.add(w_name(l), uniform_init(in, out, in, rng));
      store.add(b_name(l), Matrix::Zero(1, out));
    }
  }

  /// x: rows x widths[0]. Parameters register on x's graph through gp.
  Var forward(GraphParams& gp, Var x) const {
    const Matrix& xv = x.g->value(x);
    if (xv.cols() != spec_.widths[0])
      throw DimensionError("Mlp: input width " + std::to_string(xv.cols()) +
                           " != " + std::to_string(spec_.widths[0]));
    Var h = x;
    for (int l = 0; l < spec_.layers(); ++l) {
      h = add_rowvec(matmul(h, gp[w_name(l)]), gp[b_name(l)]);
      Activation act = (l + 1 < spec_.layers()) ? spec_.hidden_act
                                                : spec_.output_act;
      if (act == Activation::Relu) h = relu(h);
    }
    return h;
  }

  const MlpSpec& spec() const { return spec_; }
  const std::string& prefix() const { return prefix_; }

  std::string w_name(int l) const {
    return prefix_ + ".w" + std::to_string(l + 1);
  }
  std::string b_name(int l) const {
    return prefix_ + ".b" + std::to_string(l + 1);
  }

 private:
  std::string prefix_;
  MlpSpec spec_;
};

/// Gradient descent with momentum 0.9 and RMS-style per-parameter scaling
/// (decay 0.999, eps 1e-8), bias-corrected.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& store, const std::map<std::string, Matrix>& grads) {
    ++t_;
    double c1 = 1.0 - std::pow(beta1_, t_);
    double c2 = 1.0 - std::pow(beta2_, t_);
    for (auto& e : store.entries()) {
      auto git = grads.find(e.name);
      if (git == grads.end()) continue;
      const Matrix& g = git->second;
      Matrix& m = moment(m1_, e.name, e.value);
      Matrix& v = moment(m2_, e.name, e.value);
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
      Matrix mhat = m / c1;
      Matrix vhat = v / c2;
      e.value -=
          lr_ * mhat.cwiseQuotient(Matrix(vhat.cwiseSqrt().array() + eps_));
    }
  }

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  long t() const { return t_; }
  void set_t(long t) { t_ = t; }

  std::map<std::string, Matrix>& m1() { return m1_; }
  std::map<std::string, Matrix>& m2() { return m2_; }

 private:
  Matrix& moment(std::map<std::string, Matrix>& ms, const std::string& name,
                 const Matrix& like) {
    auto it = ms.find(name);
    if (it == ms.end())
      it = ms.emplace(name, Matrix::Zero(like.rows(), like.cols())).first;
    return it->second;
  }

  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::map<std::string, Matrix> m1_, m2_;
};

struct MhdpaResult {
  Var attention;  // mean over heads
  Var output;     // projected concatenation of per-head outputs
};

/// Multi-head dot-product attention. Per head: softmax(Q K^T / sqrt(d_h)),
/// output rows are attention-weighted values; heads are concatenated and
/// projected by w_out/b_out. The returned attention matrix is the mean over
/// heads, which is the canonical weight matrix downstream consumers use.
inline MhdpaResult mhdpa(Var q, Var k, Var v, int heads, Var w_out,
                         Var b_out) {
  Graph& g = *q.g;
  Eigen::Index d = g.value(q).cols();
  if (g.value(k).cols() != d || g.value(v).cols() != d)
    throw DimensionError("mhdpa: q/k/v feature widths differ");
  if (g.value(k).rows() != g.value(v).rows())
    throw DimensionError("mhdpa: k/v row counts differ");
  if (heads <= 0 || d % heads != 0)
    throw ConfigError("mhdpa: feature dim " + std::to_string(d) +
                      " not divisible by " + std::to_string(heads) +
                      " heads");
  int dh = static_cast<int>(d) / heads;
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> outs;
  Var attn_sum;
  for (int h = 0; h < heads; ++h) {
    Var qh = cols(q, h * dh, dh);
    Var kh = cols(k, h * dh, dh);
    Var vh = cols(v, h * dh, dh);
    Var logits = scale(matmul(qh, transpose(kh)), inv_sqrt);
    Var a = softmax(logits, Axis::Rows);
    outs.push_back(matmul(a, vh));
    attn_sum = (h == 0) ? a : add(attn_sum, a);
  }
  Var concat = hstack(outs);
  Var out = add_rowvec(matmul(concat, w_out), b_out);
  return {scale(attn_sum, 1.0 / heads), out};
}

}  // namespace nesyrl::numerics
