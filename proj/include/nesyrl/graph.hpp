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
#include <span>
#include <utility>
#include <vector>

#include "nesyrl/common.hpp"

namespace nesyrl::numerics {

using nesyrl::Matrix;

class Graph;

/// Handle to a node on a Graph. Values are dense matrices in 64-bit
/// precision; scalars are 1x1, distributions are 1xN rows.
struct Var {
  Graph* g = nullptr;
  int id = -1;
  bool valid() const { return g != nullptr && id >= 0; }
};

enum class Axis { Rows, Cols };

/// Define-by-run tape. A fresh Graph is built per forward pass; backward
/// walks the recorded nodes once in reverse creation order, which is a
/// topological order by construction. Nodes whose inputs are all constants
/// carry no backward hook, so gradient-free forwards pay no tape cost
/// beyond value storage.
class Graph {
 public:
  using BackFn = std::function<void(Graph&, int self)>;

  Graph() { nodes_.reserve(1024); }
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Matrix value) { return make(std::move(value), false, nullptr); }

  /// Leaf that accumulates a gradient during backward.
  Var param(Matrix value) { return make(std::move(value), true, nullptr); }

  Var make(Matrix value, bool needs_grad, BackFn back) {
    nodes_.push_back(
        Node{std::move(value), Matrix(), std::move(back), needs_grad, false});
    return Var{this, static_cast<int>(nodes_.size()) - 1};
  }

  const Matrix& value(Var v) const { return nodes_[check(v)].value; }
  const Matrix& value(int id) const { return nodes_[id].value; }

  /// Gradient of the last backward() loss w.r.t. this node. Zero if the node
  /// was not reached by the reverse sweep.
  Matrix grad(Var v) const {
    const Node& n = nodes_[check(v)];
    if (n.has_grad) return n.grad;
    return Matrix::Zero(n.value.rows(), n.value.cols());
  }

  const Matrix& grad_ref(int id) const { return nodes_[id].grad; }

  bool needs_grad(Var v) const { return nodes_[check(v)].needs_grad; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  void accumulate(int id, const Matrix& g) {
    Node& n = nodes_[id];
    if (!n.needs_grad) return;
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  /// Reverse pass from a scalar loss. Visits each recorded node at most once.
  void backward(Var loss) {
    int id = check(loss);
    const Matrix& lv = nodes_[id].value;
    if (lv.rows() != 1 || lv.cols() != 1)
      throw ContractError("backward: loss must be a 1x1 scalar");
    for (Node& n : nodes_) {
      n.has_grad = false;
      n.grad.resize(0, 0);
    }
    nodes_[id].grad = Matrix::Ones(1, 1);
    nodes_[id].has_grad = true;
    for (int i = id; i >= 0; --i) {
      Node& n = nodes_[i];
      if (n.has_grad && n.back) n.back(*this, i);
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackFn back;
    bool needs_grad;
    bool has_grad;
  };

  int check(Var v) const {
    if (v.g != this || v.id < 0 || v.id >= size())
      throw ContractError("Var does not belong to this graph");
    return v.id;
  }

  std::vector<Node> nodes_;
};

namespace detail {

inline Graph& same_graph(Var a, Var b) {
  if (!a.valid() || !b.valid() || a.g != b.g)
    throw ContractError("operands must live on the same graph");
  return *a.g;
}

inline Var node1(Var a, Matrix out, Graph::BackFn back) {
  bool ng = a.g->needs_grad(a);
  return a.g->make(std::move(out), ng, ng ? std::move(back) : nullptr);
}

inline Var node2(Var a, Var b, Matrix out, Graph::BackFn back) {
  Graph& g = same_graph(a, b);
  bool ng = g.needs_grad(a) || g.needs_grad(b);
  return g.make(std::move(out), ng, ng ? std::move(back) : nullptr);
}

}  // namespace detail

// --------------------------------------------------------------------------
// Arithmetic
// --------------------------------------------------------------------------

inline Var add(Var a, Var b) {
  Graph& g = detail::same_graph(a, b);
  const Matrix &av = g.value(a), &bv = g.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw DimensionError("add: shape mismatch");
  int ai = a.id, bi = b.id;
  return detail::node2(a, b, av + bv, [ai, bi](Graph& g, int self) {
    g.accumulate(ai, g.grad_ref(self));
    g.accumulate(bi, g.grad_ref(self));
  });
}

inline Var sub(Var a, Var b) {
  Graph& g = detail::same_graph(a, b);
  const Matrix &av = g.value(a), &bv = g.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw DimensionError("sub: shape mismatch");
  int ai = a.id, bi = b.id;
  return detail::node2(a, b, av - bv, [ai, bi](Graph& g, int self) {
    g.accumulate(ai, g.grad_ref(self));
    g.accumulate(bi, -g.grad_ref(self));
  });
}

/// Elementwise product.
inline Var cmul(Var a, Var b) {
  Graph& g = detail::same_graph(a, b);
  const Matrix &av = g.value(a), &bv = g.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw DimensionError("cmul: shape mismatch");
  int ai = a.id, bi = b.id;
  return detail::node2(a, b, av.cwiseProduct(bv),
                       [ai, bi](Graph& g, int self) {
                         const Matrix& go = g.grad_ref(self);
                         g.accumulate(ai, go.cwiseProduct(g.value(bi)));
                         g.accumulate(bi, go.cwiseProduct(g.value(ai)));
                       });
}

inline Var scale(Var a, double s) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a) * s, [ai, s](Graph& g, int self) {
    g.accumulate(ai, g.grad_ref(self) * s);
  });
}

inline Var add_const(Var a, double c) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a).array() + c,
                       [ai](Graph& g, int self) {
                         g.accumulate(ai, g.grad_ref(self));
                       });
}

/// Broadcast-add a 1xC bias row to every row of a.
inline Var add_rowvec(Var a, Var bias) {
  Graph& g = detail::same_graph(a, bias);
  const Matrix &av = g.value(a), &bv = g.value(bias);
  if (bv.rows() != 1 || bv.cols() != av.cols())
    throw DimensionError("add_rowvec: bias must be 1 x cols(a)");
  Matrix out = av;
  out.rowwise() += bv.row(0);
  int ai = a.id, bi = bias.id;
  return detail::node2(a, bias, std::move(out), [ai, bi](Graph& g, int self) {
    const Matrix& go = g.grad_ref(self);
    g.accumulate(ai, go);
    g.accumulate(bi, go.colwise().sum());
  });
}

inline Var matmul(Var a, Var b) {
  Graph& g = detail::same_graph(a, b);
  const Matrix &av = g.value(a), &bv = g.value(b);
  if (av.cols() != bv.rows())
    throw DimensionError("matmul: inner extents disagree");
  int ai = a.id, bi = b.id;
  return detail::node2(a, b, av * bv, [ai, bi](Graph& g, int self) {
    const Matrix& go = g.grad_ref(self);
    g.accumulate(ai, go * g.value(bi).transpose());
    g.accumulate(bi, g.value(ai).transpose() * go);
  });
}

inline Var transpose(Var a) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a).transpose(),
                       [ai](Graph& g, int self) {
                         g.accumulate(ai, g.grad_ref(self).transpose());
                       });
}

/// Multiply a matrix by a 1x1 scalar node.
inline Var scalar_mul(Var s, Var a) {
  Graph& g = detail::same_graph(s, a);
  const Matrix& sv = g.value(s);
  if (sv.rows() != 1 || sv.cols() != 1)
    throw DimensionError("scalar_mul: s must be 1x1");
  int si = s.id, ai = a.id;
  return detail::node2(s, a, sv(0, 0) * g.value(a),
                       [si, ai](Graph& g, int self) {
                         const Matrix& go = g.grad_ref(self);
                         Matrix ds(1, 1);
                         ds(0, 0) = go.cwiseProduct(g.value(ai)).sum();
                         g.accumulate(si, ds);
                         g.accumulate(ai, go * g.value(si)(0, 0));
                       });
}

/// Divide a matrix by a 1x1 scalar node.
inline Var div_by_scalar(Var a, Var s) {
  Graph& g = detail::same_graph(a, s);
  const Matrix& sv = g.value(s);
  if (sv.rows() != 1 || sv.cols() != 1)
    throw DimensionError("div_by_scalar: s must be 1x1");
  int ai = a.id, si = s.id;
  return detail::node2(a, s, g.value(a) / sv(0, 0),
                       [ai, si](Graph& g, int self) {
                         const Matrix& go = g.grad_ref(self);
                         double s0 = g.value(si)(0, 0);
                         g.accumulate(ai, go / s0);
                         Matrix ds(1, 1);
                         ds(0, 0) =
                             -go.cwiseProduct(g.value(ai)).sum() / (s0 * s0);
                         g.accumulate(si, ds);
                       });
}

// --------------------------------------------------------------------------
// Nonlinearities
// --------------------------------------------------------------------------

inline Var relu(Var a) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a).cwiseMax(0.0),
                       [ai](Graph& g, int self) {
                         const Matrix& av = g.value(ai);
                         Matrix mask = (av.array() > 0.0).cast<double>();
                         g.accumulate(ai,
                                      g.grad_ref(self).cwiseProduct(mask));
                       });
}

inline Var exp_elem(Var a) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a).array().exp(),
                       [ai](Graph& g, int self) {
                         g.accumulate(ai, g.grad_ref(self).cwiseProduct(
                                              g.value(self)));
                       });
}

inline Var log_elem(Var a) {
  int ai = a.id;
  return detail::node1(a, a.g->value(a).array().log(),
                       [ai](Graph& g, int self) {
                         g.accumulate(ai, g.grad_ref(self).cwiseQuotient(
                                              g.value(ai)));
                       });
}

/// Clamp to [lo, hi]; gradient passes inside the band (boundary included).
inline Var clamp(Var a, double lo, double hi) {
  int ai = a.id;
  return detail::node1(
      a, a.g->value(a).cwiseMax(lo).cwiseMin(hi),
      [ai, lo, hi](Graph& g, int self) {
        const Matrix& av = g.value(ai);
        Matrix mask =
            ((av.array() >= lo) && (av.array() <= hi)).cast<double>();
        g.accumulate(ai, g.grad_ref(self).cwiseProduct(mask));
      });
}

/// Elementwise minimum; ties route the gradient to a.
inline Var min_elem(Var a, Var b) {
  Graph& g = detail::same_graph(a, b);
  const Matrix &av = g.value(a), &bv = g.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw DimensionError("min_elem: shape mismatch");
  int ai = a.id, bi = b.id;
  return detail::node2(a, b, av.cwiseMin(bv), [ai, bi](Graph& g, int self) {
    const Matrix &av = g.value(ai), &bv = g.value(bi);
    Matrix take_a = (av.array() <= bv.array()).cast<double>();
    const Matrix& go = g.grad_ref(self);
    g.accumulate(ai, go.cwiseProduct(take_a));
    g.accumulate(bi, go.cwiseProduct(Matrix(1.0 - take_a.array())));
  });
}

// --------------------------------------------------------------------------
// Softmax family (max-subtraction for stability)
// --------------------------------------------------------------------------

namespace detail {

inline Matrix softmax_rows_value(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    Eigen::ArrayXd e = (x.row(r).array() - m).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

inline Matrix log_softmax_rows_value(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    Eigen::ArrayXd s = x.row(r).array() - m;
    double lse = std::log(s.exp().sum());
    out.row(r) = s - lse;
  }
  return out;
}

}  // namespace detail

inline Var softmax(Var a, Axis axis = Axis::Rows) {
  if (axis == Axis::Cols) return transpose(softmax(transpose(a), Axis::Rows));
  int ai = a.id;
  return detail::node1(a, detail::softmax_rows_value(a.g->value(a)),
                       [ai](Graph& g, int self) {
                         const Matrix& y = g.value(self);
                         const Matrix& go = g.grad_ref(self);
                         Matrix dx(y.rows(), y.cols());
                         for (Eigen::Index r = 0; r < y.rows(); ++r) {
                           double dot = go.row(r).dot(y.row(r));
                           dx.row(r) = y.row(r).cwiseProduct(
                               Matrix(go.row(r).array() - dot));
                         }
                         g.accumulate(ai, dx);
                       });
}

inline Var log_softmax(Var a, Axis axis = Axis::Rows) {
  if (axis == Axis::Cols)
    return transpose(log_softmax(transpose(a), Axis::Rows));
  int ai = a.id;
  return detail::node1(a, detail::log_softmax_rows_value(a.g->value(a)),
                       [ai](Graph& g, int self) {
                         const Matrix& ls = g.value(self);
                         const Matrix& go = g.grad_ref(self);
                         Matrix dx(ls.rows(), ls.cols());
                         for (Eigen::Index r = 0; r < ls.rows(); ++r) {
                           double gsum = go.row(r).sum();
                           dx.row(r) =
                               go.row(r) -
                               Matrix(ls.row(r).array().exp() * gsum);
                         }
                         g.accumulate(ai, dx);
                       });
}

// --------------------------------------------------------------------------
// Reductions, stacking, indexing, reshape
// --------------------------------------------------------------------------

inline Var sum(Var a) {
  int ai = a.id;
  Matrix out(1, 1);
  out(0, 0) = a.g->value(a).sum();
  return detail::node1(a, std::move(out), [ai](Graph& g, int self) {
    const Matrix& av = g.value(ai);
    g.accumulate(ai, Matrix::Constant(av.rows(), av.cols(),
                                      g.grad_ref(self)(0, 0)));
  });
}

inline Var mean(Var a) {
  int ai = a.id;
  const Matrix& av = a.g->value(a);
  double n = static_cast<double>(av.size());
  Matrix out(1, 1);
  out(0, 0) = av.sum() / n;
  return detail::node1(a, std::move(out), [ai, n](Graph& g, int self) {
    const Matrix& av = g.value(ai);
    g.accumulate(ai, Matrix::Constant(av.rows(), av.cols(),
                                      g.grad_ref(self)(0, 0) / n));
  });
}

/// Mean over the row index: R x C -> 1 x C.
inline Var mean_over_rows(Var a) {
  int ai = a.id;
  const Matrix& av = a.g->value(a);
  double r = static_cast<double>(av.rows());
  return detail::node1(a, av.colwise().mean(), [ai, r](Graph& g, int self) {
    const Matrix& go = g.grad_ref(self);
    g.accumulate(ai, (go / r).replicate(static_cast<Eigen::Index>(r), 1));
  });
}

inline Var vstack(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("vstack: no inputs");
  Graph& g = *parts.front().g;
  Eigen::Index cols = g.value(parts.front()).cols();
  Eigen::Index rows = 0;
  bool ng = false;
  for (Var p : parts) {
    detail::same_graph(parts.front(), p);
    if (g.value(p).cols() != cols) throw DimensionError("vstack: ragged cols");
    rows += g.value(p).rows();
    ng = ng || g.needs_grad(p);
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offs;
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Matrix& pv = g.value(p);
    out.middleRows(at, pv.rows()) = pv;
    ids.push_back(p.id);
    offs.push_back(at);
    at += pv.rows();
  }
  return g.make(std::move(out), ng,
                ng ? Graph::BackFn([ids, offs](Graph& g, int self) {
                  const Matrix& go = g.grad_ref(self);
                  for (size_t k = 0; k < ids.size(); ++k) {
                    Eigen::Index r = g.value(ids[k]).rows();
                    g.accumulate(ids[k], go.middleRows(offs[k], r));
                  }
                })
                   : Graph::BackFn(nullptr));
}

inline Var hstack(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("hstack: no inputs");
  Graph& g = *parts.front().g;
  Eigen::Index rows = g.value(parts.front()).rows();
  Eigen::Index cols = 0;
  bool ng = false;
  for (Var p : parts) {
    detail::same_graph(parts.front(), p);
    if (g.value(p).rows() != rows) throw DimensionError("hstack: ragged rows");
    cols += g.value(p).cols();
    ng = ng || g.needs_grad(p);
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offs;
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Matrix& pv = g.value(p);
    out.middleCols(at, pv.cols()) = pv;
    ids.push_back(p.id);
    offs.push_back(at);
    at += pv.cols();
  }
  return g.make(std::move(out), ng,
                ng ? Graph::BackFn([ids, offs](Graph& g, int self) {
                  const Matrix& go = g.grad_ref(self);
                  for (size_t k = 0; k < ids.size(); ++k) {
                    Eigen::Index c = g.value(ids[k]).cols();
                    g.accumulate(ids[k], go.middleCols(offs[k], c));
                  }
                })
                   : Graph::BackFn(nullptr));
}

/// Column slice [start, start+n).
inline Var cols(Var a, int start, int n) {
  const Matrix& av = a.g->value(a);
  if (start < 0 || n <= 0 || start + n > av.cols())
    throw DimensionError("cols: slice out of range");
  int ai = a.id;
  return detail::node1(a, av.middleCols(start, n),
                       [ai, start, n](Graph& g, int self) {
                         const Matrix& av = g.value(ai);
                         Matrix da = Matrix::Zero(av.rows(), av.cols());
                         da.middleCols(start, n) = g.grad_ref(self);
                         g.accumulate(ai, da);
                       });
}

namespace detail {

inline Matrix reshape_rowmajor_value(const Matrix& a, int rows, int cols) {
  Matrix out(rows, cols);
  Eigen::Index c0 = a.cols();
  for (Eigen::Index k = 0; k < a.size(); ++k)
    out(k / cols, k % cols) = a(k / c0, k % c0);
  return out;
}

}  // namespace detail

/// Reshape preserving row-major element order (the project-wide flattening
/// convention, independent of Eigen's internal storage order).
inline Var reshape_rowmajor(Var a, int rows, int cols) {
  const Matrix& av = a.g->value(a);
  if (static_cast<Eigen::Index>(rows) * cols != av.size())
    throw DimensionError("reshape_rowmajor: size mismatch");
  int ai = a.id;
  return detail::node1(a, detail::reshape_rowmajor_value(av, rows, cols),
                       [ai](Graph& g, int self) {
                         const Matrix& av = g.value(ai);
                         g.accumulate(ai, detail::reshape_rowmajor_value(
                                              g.grad_ref(self),
                                              static_cast<int>(av.rows()),
                                              static_cast<int>(av.cols())));
                       });
}

inline Var entry(Var a, int i, int j) {
  const Matrix& av = a.g->value(a);
  if (i < 0 || j < 0 || i >= av.rows() || j >= av.cols())
    throw DimensionError("entry: index out of range");
  int ai = a.id;
  Matrix out(1, 1);
  out(0, 0) = av(i, j);
  return detail::node1(a, std::move(out), [ai, i, j](Graph& g, int self) {
    const Matrix& av = g.value(ai);
    Matrix da = Matrix::Zero(av.rows(), av.cols());
    da(i, j) = g.grad_ref(self)(0, 0);
    g.accumulate(ai, da);
  });
}

/// Gather entries (i_k, j_k) into a 1xK row.
inline Var gather(Var a, std::span<const std::pair<int, int>> idx) {
  const Matrix& av = a.g->value(a);
  Matrix out(1, static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) {
    auto [i, j] = idx[k];
    if (i < 0 || j < 0 || i >= av.rows() || j >= av.cols())
      throw DimensionError("gather: index out of range");
    out(0, static_cast<Eigen::Index>(k)) = av(i, j);
  }
  int ai = a.id;
  std::vector<std::pair<int, int>> ix(idx.begin(), idx.end());
  return detail::node1(a, std::move(out),
                       [ai, ix = std::move(ix)](Graph& g, int self) {
                         const Matrix& av = g.value(ai);
                         Matrix da = Matrix::Zero(av.rows(), av.cols());
                         const Matrix& go = g.grad_ref(self);
                         for (size_t k = 0; k < ix.size(); ++k)
                           da(ix[k].first, ix[k].second) +=
                               go(0, static_cast<Eigen::Index>(k));
                         g.accumulate(ai, da);
                       });
}

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return matmul(a, b); }

// --------------------------------------------------------------------------
// Gradient checking
// --------------------------------------------------------------------------

/// Builds a scalar node from parameter leaves; must be deterministic.
using ScalarFn = std::function<Var(Graph&, const std::vector<Var>&)>;

/// Central-difference check of reverse-mode gradients. Returns the maximum
/// relative error over every parameter entry, with the denominator floored
/// so that finite-difference noise on near-zero gradients does not inflate
/// the ratio.
inline double grad_check(const ScalarFn& f, const std::vector<Matrix>& params,
                         double epsilon) {
  std::vector<Matrix> analytic;
  {
    Graph g;
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (const Matrix& p : params) vars.push_back(g.param(p));
    Var loss = f(g, vars);
    g.backward(loss);
    for (Var v : vars) analytic.push_back(g.grad(v));
  }
  auto eval = [&](const std::vector<Matrix>& ps) {
    Graph g;
    std::vector<Var> vars;
    vars.reserve(ps.size());
    for (const Matrix& p : ps) vars.push_back(g.constant(p));
    return g.value(f(g, vars))(0, 0);
  };
  double max_rel = 0.0;
  std::vector<Matrix> work = params;
  for (size_t p = 0; p < params.size(); ++p) {
    for (Eigen::Index i = 0; i < params[p].rows(); ++i) {
      for (Eigen::Index j = 0; j < params[p].cols(); ++j) {
        double orig = work[p](i, j);
        work[p](i, j) = orig + epsilon;
        double up = eval(work);
        work[p](i, j) = orig - epsilon;
        double down = eval(work);
        work[p](i, j) = orig;
        double fd = (up - down) / (2.0 * epsilon);
        double an = analytic[p](i, j);
        double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
        max_rel = std::max(max_rel, std::abs(fd - an) / denom);
      }
    }
  }
  return max_rel;
}

}  // namespace nesyrl::numerics
