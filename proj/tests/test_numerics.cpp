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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "nesyrl/nn.hpp"

using namespace nesyrl;
using namespace nesyrl::numerics;

namespace {

Matrix random_matrix(int r, int c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Independent oracle: naive triple-loop product.
Matrix matmul_oracle(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

// Independent oracle: softmax at extended precision, no max subtraction.
Matrix softmax_rows_oracle(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    long double sum = 0.0L;
    for (int j = 0; j < x.cols(); ++j) sum += expl((long double)x(i, j));
    for (int j = 0; j < x.cols(); ++j)
      out(i, j) = (double)(expl((long double)x(i, j)) / sum);
  }
  return out;
}

// Independent oracle: per-head attention loop.
void mhdpa_oracle(const Matrix& q, const Matrix& k, const Matrix& v,
                  int heads, const Matrix& w_out, const Matrix& b_out,
                  Matrix& attn, Matrix& out) {
  int d = (int)q.cols(), dh = d / heads;
  attn = Matrix::Zero(q.rows(), k.rows());
  Matrix concat(q.rows(), d);
  for (int h = 0; h < heads; ++h) {
    Matrix qh = q.middleCols(h * dh, dh);
    Matrix kh = k.middleCols(h * dh, dh);
    Matrix vh = v.middleCols(h * dh, dh);
    Matrix logits = qh * kh.transpose() / std::sqrt((double)dh);
    Matrix a = softmax_rows_oracle(logits);
    attn += a / heads;
    concat.middleCols(h * dh, dh) = a * vh;
  }
  out = concat * w_out;
  out.rowwise() += b_out.row(0);
}

}  // namespace

TEST_CASE("matmul identity and one-path composition") {
  Graph g;
  Rng rng(7);
  Matrix m = random_matrix(3, 3, rng);
  Var a = g.constant(Matrix::Identity(3, 3));
  Var b = g.constant(m);
  CHECK(g.value(matmul(a, b)) == m);

  Matrix e1(2, 2), e2(2, 2);
  e1 << 1, 0, 0, 0;
  e2 << 0, 1, 0, 0;
  Var p = matmul(g.constant(e1), g.constant(e2));
  CHECK(g.value(p) == e2);  // single relational path survives
}

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(11);
  Graph g;
  Matrix a = random_matrix(4, 4, rng), b = random_matrix(4, 4, rng);
  Matrix got = g.value(matmul(g.constant(a), g.constant(b)));
  CHECK((got - matmul_oracle(a, b)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matmul shape mismatch throws") {
  Graph g;
  Var a = g.constant(Matrix::Zero(2, 3));
  Var b = g.constant(Matrix::Zero(2, 3));
  CHECK_THROWS_AS(matmul(a, b), DimensionError);
}

TEST_CASE("matmul associativity") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g;
    Var a = g.constant(random_matrix(3, 4, rng));
    Var b = g.constant(random_matrix(4, 5, rng));
    Var c = g.constant(random_matrix(5, 2, rng));
    Matrix left = g.value(matmul(matmul(a, b), c));
    Matrix right = g.value(matmul(a, matmul(b, c)));
    CHECK((left - right).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("softmax symmetric, stable and oracle-exact") {
  Graph g;
  Matrix z(1, 3);
  z << 0, 0, 0;
  Matrix got = g.value(softmax(g.constant(z)));
  for (int j = 0; j < 3; ++j) CHECK(got(0, j) == doctest::Approx(1.0 / 3));

  Matrix big(1, 2);
  big << 1000, 0;
  Matrix s = g.value(softmax(g.constant(big)));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));
  CHECK(std::isfinite(s(0, 0)));

  Matrix x(1, 3);
  x << 1, 2, 3;
  Matrix y = g.value(softmax(g.constant(x)));
  CHECK((y - softmax_rows_oracle(x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("softmax rows are distributions on random input, both axes") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g;
    Matrix x = random_matrix(4, 5, rng, -30, 30);
    Matrix r = g.value(softmax(g.constant(x), Axis::Rows));
    for (int i = 0; i < 4; ++i) {
      CHECK(r.row(i).minCoeff() >= 0.0);
      CHECK(std::abs(r.row(i).sum() - 1.0) < 1e-9);
    }
    Matrix c = g.value(softmax(g.constant(x), Axis::Cols));
    for (int j = 0; j < 5; ++j) CHECK(std::abs(c.col(j).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("mhdpa normalization and uniform cases") {
  Graph g;
  Matrix id = Matrix::Identity(2, 2) * 3.0;
  Var q = g.constant(id), k = g.constant(id), v = g.constant(id);
  Var w = g.constant(Matrix::Identity(2, 2));
  Var b = g.constant(Matrix::Zero(1, 2));
  auto r = mhdpa(q, k, v, 1, w, b);
  for (int i = 0; i < 2; ++i)
    CHECK(g.value(r.attention).row(i).sum() == doctest::Approx(1.0));

  // All-equal keys: every query sees identical logits.
  Rng rng(3);
  Matrix keys = Matrix::Ones(3, 4) * 0.7;
  Var q2 = g.constant(random_matrix(3, 4, rng));
  auto r2 = mhdpa(q2, g.constant(keys), g.constant(random_matrix(3, 4, rng)),
                  2, g.constant(Matrix::Identity(4, 4)),
                  g.constant(Matrix::Zero(1, 4)));
  Matrix attn = g.value(r2.attention);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(attn(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("mhdpa matches per-head loop oracle") {
  Rng rng(23);
  Graph g;
  Matrix qm = random_matrix(3, 4, rng), km = random_matrix(3, 4, rng),
         vm = random_matrix(3, 4, rng), wm = random_matrix(4, 4, rng),
         bm = random_matrix(1, 4, rng);
  auto r = mhdpa(g.constant(qm), g.constant(km), g.constant(vm), 2,
                 g.constant(wm), g.constant(bm));
  Matrix attn_want, out_want;
  mhdpa_oracle(qm, km, vm, 2, wm, bm, attn_want, out_want);
  CHECK((g.value(r.attention) - attn_want).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((g.value(r.output) - out_want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mhdpa rejects an indivisible head split") {
  Graph g;
  Var q = g.constant(Matrix::Zero(2, 6));
  CHECK_THROWS_AS(
      mhdpa(q, q, q, 4, g.constant(Matrix::Zero(6, 6)),
            g.constant(Matrix::Zero(1, 6))),
      ConfigError);
}

TEST_CASE("mlp identity init and clipped bias") {
  ParamStore store;
  Rng rng(5);
  Mlp ident(store, "id", MlpSpec{{3, 3}, Activation::Relu,
                                 Activation::Identity},
            rng);
  store.at("id.w1") = Matrix::Identity(3, 3);
  Graph g;
  GraphParams gp(g, store, false);
  Matrix x(2, 3);
  x << 1, -2, 3, 0.5, 0, -1;
  CHECK(g.value(ident.forward(gp, g.constant(x))) == x);

  // Zero weights, relu output layer: result is the bias clipped at zero.
  ParamStore store2;
  Mlp zeroed(store2, "z",
             MlpSpec{{3, 4}, Activation::Relu, Activation::Relu}, rng);
  store2.at("z.w1").setZero();
  Matrix bias(1, 4);
  bias << -1.0, 0.25, 2.0, -0.5;
  store2.at("z.b1") = bias;
  Graph g2;
  GraphParams gp2(g2, store2, false);
  Matrix got = g2.value(zeroed.forward(gp2, g2.constant(x)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(got(i, j) == doctest::Approx(std::max(0.0, bias(0, j))));
}

TEST_CASE("mlp matches explicit loop oracle") {
  ParamStore store;
  Rng rng(29);
  Mlp mlp(store, "m", MlpSpec{{3, 5, 2}, Activation::Relu,
                              Activation::Identity},
          rng);
  Graph g;
  GraphParams gp(g, store, false);
  Matrix x = random_matrix(4, 3, rng);
  Matrix got = g.value(mlp.forward(gp, g.constant(x)));

  const Matrix &w1 = store.at("m.w1"), &b1 = store.at("m.b1"),
               &w2 = store.at("m.w2"), &b2 = store.at("m.b2");
  for (int r = 0; r < 4; ++r) {
    std::vector<double> h(5, 0.0);
    for (int j = 0; j < 5; ++j) {
      double acc = b1(0, j);
      for (int i = 0; i < 3; ++i) acc += x(r, i) * w1(i, j);
      h[j] = std::max(0.0, acc);
    }
    for (int o = 0; o < 2; ++o) {
      double acc = b2(0, o);
      for (int j = 0; j < 5; ++j) acc += h[j] * w2(j, o);
      CHECK(std::abs(got(r, o) - acc) < 1e-12);
    }
  }
}

TEST_CASE("mlp width mismatch throws") {
  ParamStore store;
  Rng rng(1);
  Mlp mlp(store, "m", MlpSpec{{3, 2}}, rng);
  Graph g;
  GraphParams gp(g, store, false);
  CHECK_THROWS_AS(mlp.forward(gp, g.constant(Matrix::Zero(1, 4))),
                  DimensionError);
}

TEST_CASE("backward: sum and quadratic leaves") {
  {
    Graph g;
    Var x = g.param(Matrix::Ones(2, 3) * 0.5);
    g.backward(sum(x));
    CHECK(g.grad(x) == Matrix::Ones(2, 3));
  }
  {
    Graph g;
    Matrix xv(2, 1);
    xv << 1, 2;
    Var x = g.param(xv);
    Var loss = matmul(transpose(x), x);
    g.backward(loss);
    Matrix want(2, 1);
    want << 2, 4;
    CHECK((g.grad(x) - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("backward rejects a non-scalar loss") {
  Graph g;
  Var x = g.param(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(g.backward(x), ContractError);
}

TEST_CASE("grad_check: quadratic, constant, softmax-composed") {
  Rng rng(31);
  Matrix a = random_matrix(3, 3, rng);
  ScalarFn quad = [a](Graph& g, const std::vector<Var>& ps) {
    Var x = ps[0];
    return matmul(matmul(transpose(x), g.constant(a)), x);
  };
  CHECK(grad_check(quad, {random_matrix(3, 1, rng)}, 1e-5) < 1e-8);

  ScalarFn constant = [](Graph& g, const std::vector<Var>&) {
    return g.constant(Matrix::Ones(1, 1) * 4.2);
  };
  CHECK(grad_check(constant, {random_matrix(2, 2, rng)}, 1e-5) == 0.0);

  ScalarFn soft = [](Graph& g, const std::vector<Var>& ps) {
    Var s = softmax(ps[0]);
    return sum(cmul(s, g.constant(Matrix::Ones(2, 4))) + cmul(s, s));
  };
  CHECK(grad_check(soft, {random_matrix(2, 4, rng)}, 1e-5) < 1e-6);
}

TEST_CASE("finite differences validate every composite op") {
  Rng rng(37);
  // Inputs kept away from relu/clamp/min kinks.
  Matrix base = random_matrix(3, 4, rng, 0.2, 1.2);
  ScalarFn f = [](Graph& g, const std::vector<Var>& ps) {
    Var x = ps[0];
    Var a = add_rowvec(scale(x, 1.3), g.constant(Matrix::Ones(1, 4) * 0.1));
    Var b = relu(a);
    Var c = softmax(b, Axis::Rows);
    Var d = log_softmax(b, Axis::Rows);
    Var e = exp_elem(scale(x, 0.3));
    Var f1 = log_elem(add_const(cmul(x, x), 1.0));
    Var g1 = clamp(x, -0.9, 0.9);
    Var h = min_elem(x, transpose(transpose(scale(x, 0.5))));
    Var stack = vstack(std::vector<Var>{c, d});
    Var wide = hstack(std::vector<Var>{e, f1});
    Var sliced = cols(stack, 1, 2);
    Var reshaped = reshape_rowmajor(wide, 4, 6);
    Var picked = gather(reshaped, std::vector<std::pair<int, int>>{
                                      {0, 1}, {2, 3}, {3, 5}});
    Var sm = scalar_mul(entry(x, 0, 0), g1);
    Var dv = div_by_scalar(h, add_const(sum(cmul(x, x)), 1.0));
    Var pooled = sum(mean_over_rows(reshaped));
    Var total = add(mean(sliced), sum(picked));
    total = add(total, mean(sm));
    total = add(total, sum(dv));
    total = add(total, pooled);
    total = add(total, mean(stack));
    return sub(total, mean(sub(x, g1)));
  };
  CHECK(grad_check(f, {base}, 1e-5) < 1e-6);
}

TEST_CASE("forward and backward are bit-reproducible under a fixed seed") {
  auto run = [] {
    Rng rng(99);
    ParamStore store;
    Mlp mlp(store, "m", MlpSpec{{4, 8, 4}}, rng);
    Graph g;
    GraphParams gp(g, store, true);
    Matrix x = random_matrix(3, 4, rng);
    Var out = mlp.forward(gp, g.constant(x));
    Var loss = mean(cmul(out, out));
    g.backward(loss);
    std::pair<Matrix, Matrix> r{g.value(out), g.grad(gp["m.w1"])};
    return r;
  };
  auto [v1, g1] = run();
  auto [v2, g2] = run();
  CHECK(std::memcmp(v1.data(), v2.data(), sizeof(double) * v1.size()) == 0);
  CHECK(std::memcmp(g1.data(), g2.data(), sizeof(double) * g1.size()) == 0);
}

TEST_CASE("adam with zero learning rate is a parameter identity") {
  ParamStore store;
  Rng rng(41);
  store.add("p", random_matrix(2, 2, rng));
  Matrix before = store.at("p");
  Adam opt(0.0);
  std::map<std::string, Matrix> grads{{"p", random_matrix(2, 2, rng)}};
  opt.step(store, grads);
  CHECK(store.at("p") == before);
}
