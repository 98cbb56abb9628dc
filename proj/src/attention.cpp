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

#include "nesyrl/attention.hpp"

namespace nesyrl::attention {

using numerics::Activation;
using numerics::Graph;
using numerics::MlpSpec;

namespace {

MlpSpec ff_spec(int d_model, int hidden) {
  return MlpSpec{{d_model, hidden, d_model}, Activation::Relu,
                 Activation::Identity};
}

}  // namespace

Params::Params(ParamStore& store, std::string prefix, const Config& cfg,
               int d_model, Rng& rng)
    : cfg_(cfg), d_model_(d_model), prefix_(std::move(prefix)) {
  cfg_.validate(d_model);
  MlpSpec ff = ff_spec(d_model, cfg_.hidden);
  for (int t = 1; t <= cfg_.steps; ++t) {
    std::vector<Block> layer_blocks;
    for (int l = 1; l <= cfg_.layers; ++l) {
      std::string base = prefix_ + ".step" + std::to_string(t) + ".block" +
                         std::to_string(l);
      Block b;
      b.q = Mlp(store, base + ".q", ff, rng);
      b.k = Mlp(store, base + ".k", ff, rng);
      b.v = Mlp(store, base + ".v", ff, rng);
      b.proj_w = base + ".proj.w";
      b.proj_b = base + ".proj.b";
      store.add(b.proj_w,
                numerics::uniform_init(d_model, d_model, d_model, rng));
      store.add(b.proj_b, Matrix::Zero(1, d_model));
      layer_blocks.push_back(std::move(b));
    }
    steps_.push_back(std::move(layer_blocks));
  }
  path_k_ = Mlp(store, prefix_ + ".path.k", ff, rng);
  path_v_ = Mlp(store, prefix_ + ".path.v", ff, rng);
  path_query_ = prefix_ + ".path.query";
  path_proj_w_ = prefix_ + ".path.proj.w";
  path_proj_b_ = prefix_ + ".path.proj.b";
  store.add(path_query_, numerics::uniform_init(1, d_model, d_model, rng));
  store.add(path_proj_w_,
            numerics::uniform_init(d_model, d_model, d_model, rng));
  store.add(path_proj_b_, Matrix::Zero(1, d_model));
}

ForwardVars Params::forward(GraphParams& gp, Var flat) const {
  const Matrix& fv = flat.g->value(flat);
  if (fv.cols() != d_model_)
    throw ConfigError("attention: flat state width " +
                      std::to_string(fv.cols()) + " != configured " +
                      std::to_string(d_model_));
  ForwardVars out;
  Var v = flat;
  out.values.push_back(v);
  for (const auto& blocks : steps_) {
    Var attn;
    for (const Block& b : blocks) {
      Var q = b.q.forward(gp, v);
      Var k = b.k.forward(gp, v);
      Var vv = b.v.forward(gp, v);
      auto r = numerics::mhdpa(q, k, vv, cfg_.heads, gp[b.proj_w],
                               gp[b.proj_b]);
      v = r.output;
      attn = r.attention;
    }
    // Column-mean weighs predicate k by how much every query attends to it;
    // renormalizing keeps an exact distribution under round-off.
    Var col = numerics::mean_over_rows(attn);
    out.s_phi.push_back(numerics::div_by_scalar(col, numerics::sum(col)));
    out.values.push_back(v);
  }

  std::vector<Var> pooled;
  pooled.reserve(out.values.size());
  for (Var step_value : out.values)
    pooled.push_back(numerics::mean_over_rows(step_value));
  Var stacked = numerics::vstack(pooled);  // (T+1) x d_model
  Var k = path_k_.forward(gp, stacked);
  Var vv = path_v_.forward(gp, stacked);
  auto r = numerics::mhdpa(gp[path_query_], k, vv, cfg_.heads,
                           gp[path_proj_w_], gp[path_proj_b_]);
  // Drop the V^(0) slot: path lengths run 1..T.
  Var raw = numerics::cols(r.attention, 1, cfg_.steps);
  out.s_psi = numerics::div_by_scalar(raw, numerics::sum(raw));
  return out;
}

reasoning::AttentionWeights forward_weights(const Params& params,
                                            const ParamStore& store,
                                            const symbolic::FlatState& flat) {
  Graph g;
  GraphParams gp(g, store, /*trainable=*/false);
  Var f = g.constant(flat.m);
  ForwardVars vars = params.forward(gp, f);
  reasoning::AttentionWeights w;
  int n = static_cast<int>(flat.m.rows());
  w.s_phi = Matrix::Zero(params.config().steps, n);
  for (int t = 0; t < params.config().steps; ++t)
    w.s_phi.row(t) = g.value(vars.s_phi[t]).row(0);
  w.s_psi = g.value(vars.s_psi).row(0);
  return w;
}

}  // namespace nesyrl::attention
