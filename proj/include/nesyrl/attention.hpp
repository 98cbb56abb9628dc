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

#include <string>
#include <vector>

#include "nesyrl/nn.hpp"
#include "nesyrl/reasoning.hpp"
#include "nesyrl/symbolic.hpp"

namespace nesyrl::attention {

using numerics::GraphParams;
using numerics::Mlp;
using numerics::ParamStore;
using numerics::Var;

struct Config {
  int steps = 4;    // T, maximum reasoning steps
  int layers = 2;   // stacked MHDPA blocks per step
  int heads = 4;    // attention heads
  int hidden = 64;  // feed-forward hidden width

  void validate(int d_model) const {
    if (steps < 1) throw ConfigError("attention: steps must be >= 1");
    if (layers < 1) throw ConfigError("attention: layers must be >= 1");
    if (heads < 1) throw ConfigError("attention: heads must be >= 1");
    if (hidden < 1) throw ConfigError("attention: hidden must be >= 1");
    if (d_model % heads != 0)
      throw ConfigError("attention: feature dim " + std::to_string(d_model) +
                        " not divisible by " + std::to_string(heads) +
                        " heads");
  }
};

/// Differentiable outputs of one forward pass.
struct ForwardVars {
  std::vector<Var> s_phi;  // T nodes, each 1xN
  Var s_psi;               // 1xT
  std::vector<Var> values; // V^(0)..V^(T), each N x d_model
};

/// Per-step MHDPA blocks producing predicate attentions, plus the path head
/// attending over pooled step values with a learned query row.
class Params {
 public:
  Params() = default;

  /// Registers every tensor in `store` under `prefix`.
  Params(ParamStore& store, std::string prefix, const Config& cfg,
         int d_model, Rng& rng);

  /// flat: N x d_model state constant (or leaf, for sensitivity tests).
  /// Predicate submodule: V^(0) = M_f; per step, L stacked blocks each
  /// computing Q/K/V feed-forwards and MHDPA; the final block's mean-head
  /// attention column-means (renormalized) give s_phi^(t).
  /// Path submodule: row-mean pool V^(0..T), one MHDPA block with a learned
  /// 1 x d_model query; the V^(0) slot is dropped and the rest renormalized.
  ForwardVars forward(GraphParams& gp, Var flat) const;

  const Config& config() const { return cfg_; }
  int d_model() const { return d_model_; }
  const std::string& query_name() const { return path_query_; }

 private:
  struct Block {
    Mlp q, k, v;
    std::string proj_w, proj_b;
  };

  Config cfg_;
  int d_model_ = 0;
  std::string prefix_;
  std::vector<std::vector<Block>> steps_;  // [T][L]
  Mlp path_k_, path_v_;
  std::string path_query_, path_proj_w_, path_proj_b_;
};

/// Runs a gradient-free forward pass and extracts plain weights.
reasoning::AttentionWeights forward_weights(const Params& params,
                                            const ParamStore& store,
                                            const symbolic::FlatState& flat);

}  // namespace nesyrl::attention
