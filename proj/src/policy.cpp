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

#include "nesyrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nesyrl::policy {

using numerics::Activation;
using numerics::Graph;
using numerics::MlpSpec;

PolicyParams PolicyParams::init(const Vocabulary& vocab,
                                const ModelConfig& cfg, std::uint64_t seed) {
  PolicyParams p;
  p.vocab = vocab;
  p.cfg = cfg;
  int d = vocab.capacity() * vocab.capacity();
  Rng rng = Rng::stream(seed, 0xA77);
  p.attn = attention::Params(p.store, "attn", cfg.attn, d, rng);
  for (int pid : vocab.action_predicate_ids()) {
    MlpSpec spec{{d, cfg.head_hidden, d}, Activation::Relu,
                 Activation::Identity};
    p.heads.emplace_back(p.store, "head." + vocab.predicate(pid).name, spec,
                         rng);
  }
  if (cfg.with_critic) {
    int in = vocab.num_predicates() * d;
    MlpSpec spec{{in, cfg.critic_hidden, 1}, Activation::Relu,
                 Activation::Identity};
    p.critic = Mlp(p.store, "critic", spec, rng);
  }
  return p;
}

PolicyForward policy_forward(GraphParams& gp, const PolicyParams& params,
                             const SymbolicState& state, bool with_critic) {
  Graph& g = gp.graph();
  symbolic::FlatState flat = symbolic::flatten(state);
  Var fv = g.constant(flat.m);
  PolicyForward out;
  out.attn = params.attn.forward(gp, fv);
  int cap = params.capacity();
  out.kappa = reasoning::kappa(out.attn.s_phi, out.attn.s_psi, fv, cap);
  Var flat_kappa = numerics::reshape_rowmajor(out.kappa, 1, cap * cap);
  for (const Mlp& head : params.heads) {
    Var h = head.forward(gp, flat_kappa);
    out.head_out.push_back(numerics::reshape_rowmajor(h, cap, cap));
  }
  if (with_critic) {
    if (!params.critic)
      throw ContractError("policy_forward: params have no critic");
    Var cin = numerics::reshape_rowmajor(
        fv, 1, static_cast<int>(flat.m.rows()) * cap * cap);
    out.critic_value = params.critic->forward(gp, cin);
  }
  return out;
}

namespace {

int head_index(const PolicyParams& params, int predicate) {
  std::vector<int> ids = params.vocab.action_predicate_ids();
  auto pos = std::find(ids.begin(), ids.end(), predicate);
  if (pos == ids.end())
    throw ContractError("predicate " +
                        params.vocab.predicate(predicate).name +
                        " is not an action predicate");
  return static_cast<int>(pos - ids.begin());
}

}  // namespace

std::map<GroundAtom, double> q_values(const SymbolicState& state,
                                      const PolicyParams& params,
                                      std::span<const int> entities) {
  std::vector<int> all;
  if (entities.empty()) {
    all.resize(params.capacity());
    std::iota(all.begin(), all.end(), 0);
    entities = all;
  }
  Graph g;
  GraphParams gp(g, params.store, /*trainable=*/false);
  PolicyForward fwd = policy_forward(gp, params, state, false);
  std::map<GroundAtom, double> out;
  std::vector<int> action_ids = params.vocab.action_predicate_ids();
  for (size_t h = 0; h < action_ids.size(); ++h) {
    const Matrix& head = g.value(fwd.head_out[h]);
    for (int x : entities)
      for (int xp : entities) out[{action_ids[h], x, xp}] = head(x, xp);
  }
  return out;
}

QEvaluator::QEvaluator(const PolicyParams& params, bool with_value)
    : params_(params),
      with_value_(with_value),
      seen_version_(params.version) {}

const QEvaluator::Entry& QEvaluator::lookup(
    const SymbolicState& state, std::span<const GroundAtom> candidates) {
  if (params_.version != seen_version_) {
    cache_.clear();
    seen_version_ = params_.version;
  }
  auto key = state.bit_key();
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  Graph g;
  GraphParams gp(g, params_.store, /*trainable=*/false);
  PolicyForward fwd = policy_forward(gp, params_, state, with_value_);
  Entry e;
  e.q.resize(static_cast<Eigen::Index>(candidates.size()));
  for (size_t i = 0; i < candidates.size(); ++i) {
    const GroundAtom& a = candidates[i];
    const Matrix& head = g.value(fwd.head_out[head_index(params_, a.predicate)]);
    e.q(static_cast<Eigen::Index>(i)) = head(a.subject, a.object);
  }
  if (with_value_) e.value = g.value(fwd.critic_value)(0, 0);
  return cache_.emplace(std::move(key), std::move(e)).first->second;
}

RowVector softmax_probs(const RowVector& q) {
  double m = q.maxCoeff();
  Eigen::ArrayXd e = (q.transpose().array() - m).exp();
  return RowVector((e / e.sum()).transpose());
}

int act_index(const RowVector& q, ActMode mode, double epsilon, Rng& rng) {
  if (q.cols() == 0) throw ContractError("act: empty action set");
  int n = static_cast<int>(q.cols());
  if (mode == ActMode::GreedyEpsilon) {
    if (epsilon > 0.0 && rng.uniform01() < epsilon) return rng.uniform_int(n);
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (q(i) > q(best)) best = i;
    return best;
  }
  RowVector p = softmax_probs(q);
  double u = rng.uniform01();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += p(i);
    if (u < acc) return i;
  }
  return n - 1;
}

GroundAtom act(const SymbolicState& state, const PolicyParams& params,
               std::span<const GroundAtom> candidates, ActMode mode,
               double epsilon, Rng& rng) {
  if (candidates.empty()) throw ContractError("act: empty action set");
  QEvaluator eval(params);
  const auto& e = eval.lookup(state, candidates);
  return candidates[act_index(e.q, mode, epsilon, rng)];
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  if (data_.empty()) throw ContractError("ReplayBuffer: empty");
  return data_[rng.uniform_int(static_cast<int>(data_.size()))];
}

namespace {

int candidate_index(std::span<const GroundAtom> candidates,
                    const GroundAtom& a) {
  auto it = std::find(candidates.begin(), candidates.end(), a);
  if (it == candidates.end())
    throw ContractError("action atom is not in the candidate list");
  return static_cast<int>(it - candidates.begin());
}

/// Double-Q target values for a batch, computed gradient-free.
std::vector<double> td_targets(std::span<const Transition> batch,
                               const PolicyParams& params,
                               const PolicyParams& target_params,
                               double gamma) {
  QEvaluator online(params);
  QEvaluator target(target_params);
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const Transition& t : batch) {
    if (t.done) {
      ys.push_back(t.reward);
      continue;
    }
    if (!t.candidates || t.candidates->empty())
      throw ContractError("q_loss: transition lacks candidate atoms");
    const auto& oq = online.lookup(t.next, *t.candidates);
    int best = 0;
    for (int i = 1; i < oq.q.cols(); ++i)
      if (oq.q(i) > oq.q(best)) best = i;
    const auto& tq = target.lookup(t.next, *t.candidates);
    ys.push_back(t.reward + gamma * tq.q(best));
  }
  return ys;
}

struct SharedForward {
  GraphParams& gp;
  const PolicyParams& params;
  bool with_critic;
  std::unordered_map<std::vector<std::uint64_t>, PolicyForward,
                     symbolic::BitKeyHash>
      seen;

  const PolicyForward& get(const SymbolicState& s) {
    auto key = s.bit_key();
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    PolicyForward f = policy_forward(gp, params, s, with_critic);
    return seen.emplace(std::move(key), std::move(f)).first->second;
  }
};

}  // namespace

double q_loss(std::span<const Transition> batch, const PolicyParams& params,
              const PolicyParams& target_params, double gamma) {
  if (batch.empty()) throw ContractError("q_loss: empty batch");
  std::vector<double> ys = td_targets(batch, params, target_params, gamma);
  QEvaluator online(params);
  double acc = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& e = online.lookup(batch[i].state, *batch[i].candidates);
    double q = e.q(candidate_index(*batch[i].candidates, batch[i].action));
    double d = ys[i] - q;
    acc += d * d;
  }
  return acc / static_cast<double>(batch.size());
}

QLossGrads q_loss_grads(std::span<const Transition> batch,
                        const PolicyParams& params,
                        const PolicyParams& target_params, double gamma) {
  if (batch.empty()) throw ContractError("q_loss: empty batch");
  std::vector<double> ys = td_targets(batch, params, target_params, gamma);
  Graph g;
  GraphParams gp(g, params.store, /*trainable=*/true);
  SharedForward shared{gp, params, false, {}};
  Var total;
  for (size_t i = 0; i < batch.size(); ++i) {
    const PolicyForward& fwd = shared.get(batch[i].state);
    const GroundAtom& a = batch[i].action;
    Var q = numerics::entry(fwd.head_out[head_index(params, a.predicate)],
                            a.subject, a.object);
    Var diff = numerics::add_const(numerics::scale(q, -1.0), ys[i]);
    Var sq = numerics::cmul(diff, diff);
    total = (i == 0) ? sq : numerics::add(total, sq);
  }
  Var loss = numerics::scale(total, 1.0 / static_cast<double>(batch.size()));
  g.backward(loss);
  return {g.value(loss)(0, 0), gp.grads()};
}

GaeResult gae(const Trajectory& traj, double gamma, double lambda) {
  size_t n = traj.steps.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_adv = 0.0;
  for (size_t i = n; i-- > 0;) {
    const TrajectoryStep& s = traj.steps[i];
    double next_value =
        (s.done || i + 1 == n) ? 0.0 : traj.steps[i + 1].value;
    double not_done = s.done ? 0.0 : 1.0;
    double delta = s.reward + gamma * next_value * not_done - s.value;
    next_adv = delta + gamma * lambda * not_done * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + s.value;
  }
  return out;
}

PpoDiagnostics ppo_update(std::span<const Trajectory> trajectories,
                          PolicyParams& params, Adam& opt,
                          const PpoSettings& settings, Rng& rng) {
  if (trajectories.empty()) throw ContractError("ppo_update: no trajectories");
  if (!params.critic) throw ContractError("ppo_update: params lack a critic");

  struct Sample {
    const TrajectoryStep* step;
    const AtomList* candidates;
    double advantage;
    double ret;
  };
  std::vector<Sample> samples;
  for (const Trajectory& traj : trajectories) {
    if (!traj.candidates || traj.candidates->empty())
      throw ContractError("ppo_update: trajectory lacks candidate atoms");
    GaeResult g = gae(traj, settings.gamma, settings.lambda);
    for (size_t i = 0; i < traj.steps.size(); ++i)
      samples.push_back({&traj.steps[i], traj.candidates.get(),
                         g.advantages[i], g.returns[i]});
  }
  if (settings.normalize_advantages && samples.size() > 1) {
    double mean = 0.0;
    for (const Sample& s : samples) mean += s.advantage;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const Sample& s : samples) {
      double d = s.advantage - mean;
      var += d * d;
    }
    double sd = std::sqrt(var / static_cast<double>(samples.size()));
    for (Sample& s : samples) s.advantage = (s.advantage - mean) / (sd + 1e-8);
  }

  PpoDiagnostics diag;
  double ratio_sum = 0.0, clip_sum = 0.0;
  long ratio_count = 0;

  int total = static_cast<int>(samples.size());
  int mb =
      settings.minibatch > 0 ? std::min(settings.minibatch, total) : total;
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    for (int i = total - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);
    for (int start = 0; start < total; start += mb) {
      int count = std::min(mb, total - start);
      Graph g;
      GraphParams gp(g, params.store, /*trainable=*/true);
      SharedForward shared{gp, params, true, {}};

      Var policy_sum, value_sum, entropy_sum;
      for (int s = 0; s < count; ++s) {
        const Sample& smp = samples[order[start + s]];
        const PolicyForward& fwd = shared.get(smp.step->state);
        std::vector<std::pair<int, int>> idx;
        idx.reserve(smp.candidates->size());
        int head0 = head_index(params, smp.candidates->front().predicate);
        bool single_head = true;
        for (const GroundAtom& a : *smp.candidates) {
          idx.emplace_back(a.subject, a.object);
          single_head =
              single_head && head_index(params, a.predicate) == head0;
        }
        Var logits;
        if (single_head) {
          logits = numerics::gather(fwd.head_out[head0], idx);
        } else {
          std::vector<Var> parts;
          for (const GroundAtom& a : *smp.candidates)
            parts.push_back(
                numerics::entry(fwd.head_out[head_index(params, a.predicate)],
                                a.subject, a.object));
          logits = numerics::hstack(parts);
        }
        Var logp = numerics::log_softmax(logits);
        Var lp = numerics::entry(logp, 0, smp.step->action_index);
        Var ratio =
            numerics::exp_elem(numerics::add_const(lp, -smp.step->log_prob));
        Var surr1 = numerics::scale(ratio, smp.advantage);
        Var surr2 = numerics::scale(
            numerics::clamp(ratio, 1.0 - settings.clip, 1.0 + settings.clip),
            smp.advantage);
        Var surr = numerics::min_elem(surr1, surr2);
        policy_sum = s == 0 ? surr : numerics::add(policy_sum, surr);

        Var verr = numerics::add_const(fwd.critic_value, -smp.ret);
        Var vsq = numerics::cmul(verr, verr);
        value_sum = s == 0 ? vsq : numerics::add(value_sum, vsq);

        Var probs = numerics::exp_elem(logp);
        Var ent = numerics::scale(numerics::sum(numerics::cmul(probs, logp)),
                                  -1.0);
        entropy_sum = s == 0 ? ent : numerics::add(entropy_sum, ent);

        double r = g.value(ratio)(0, 0);
        ratio_sum += r;
        clip_sum +=
            (r < 1.0 - settings.clip || r > 1.0 + settings.clip) ? 1.0 : 0.0;
        ++ratio_count;
      }
      double inv = 1.0 / static_cast<double>(count);
      Var policy_loss = numerics::scale(policy_sum, -inv);
      Var value_loss = numerics::scale(value_sum, inv);
      Var entropy = numerics::scale(entropy_sum, inv);
      Var loss = numerics::add(
          policy_loss,
          numerics::sub(numerics::scale(value_loss, settings.value_coef),
                        numerics::scale(entropy, settings.entropy_coef)));
      g.backward(loss);
      opt.step(params.store, gp.grads());
      ++params.version;

      if (diag.gradient_steps == 0) diag.first_loss = g.value(loss)(0, 0);
      diag.policy_loss = g.value(policy_loss)(0, 0);
      diag.value_loss = g.value(value_loss)(0, 0);
      diag.entropy = g.value(entropy)(0, 0);
      ++diag.gradient_steps;
    }
  }
  diag.mean_ratio = ratio_count ? ratio_sum / ratio_count : 0.0;
  diag.clip_fraction = ratio_count ? clip_sum / ratio_count : 0.0;
  return diag;
}

}  // namespace nesyrl::policy
