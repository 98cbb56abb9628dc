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

#include "nesyrl/attention.hpp"
#include "nesyrl/envs.hpp"
#include "nesyrl/policy.hpp"
#include "nesyrl/trainers.hpp"

using namespace nesyrl;
using namespace nesyrl::policy;
using symbolic::GroundAtom;
using symbolic::SymbolicState;
using symbolic::Vocabulary;

namespace {

Vocabulary small_vocab() {
  return Vocabulary({"x1", "x2", "x3"},
                    {{"P", false, false},
                     {"Q", false, false},
                     {"Act", true, false}});
}

ModelConfig small_model(bool critic = false) {
  ModelConfig mc;
  mc.attn = attention::Config{2, 1, 3, 8};  // T=2, L=1, H=3 over d_model=9
  mc.head_hidden = 9;
  mc.critic_hidden = 5;
  mc.with_critic = critic;
  return mc;
}

SymbolicState random_state(const Vocabulary& v, Rng& rng) {
  SymbolicState s = symbolic::zero_state(v);
  for (int k = 0; k < v.num_predicates() - 1; ++k)
    for (int i = 0; i < v.capacity(); ++i)
      for (int j = 0; j < v.capacity(); ++j)
        if (rng.uniform01() < 0.4) s.mats[k](i, j) = 1.0;
  return s;
}

/// Heads with w1 = w2 = I, zero bias behave as the identity on kappa
/// (kappa is entrywise nonnegative, so the hidden relu is transparent).
void make_identity_head(PolicyParams& p, const std::string& head) {
  p.store.at("head." + head + ".w1") = Matrix::Identity(9, 9);
  p.store.at("head." + head + ".w2") = Matrix::Identity(9, 9);
  p.store.at("head." + head + ".b1").setZero();
  p.store.at("head." + head + ".b2").setZero();
}

void make_constant_head(PolicyParams& p, const std::string& head,
                        double value) {
  p.store.at("head." + head + ".w1").setZero();
  p.store.at("head." + head + ".w2").setZero();
  p.store.at("head." + head + ".b1").setZero();
  p.store.at("head." + head + ".b2").setConstant(value);
}

std::vector<GroundAtom> act_atoms(const Vocabulary& v) {
  std::vector<GroundAtom> out;
  int act = v.predicate_id("Act");
  for (int i = 0; i < v.capacity(); ++i)
    for (int j = 0; j < v.capacity(); ++j)
      if (i != j) out.push_back({act, i, j});
  return out;
}

AtomListPtr shared_atoms(const Vocabulary& v) {
  return std::make_shared<const AtomList>(act_atoms(v));
}

}  // namespace

TEST_CASE("identity head reads kappa entries exactly") {
  Vocabulary v = small_vocab();
  PolicyParams p = PolicyParams::init(v, small_model(), 7);
  make_identity_head(p, "Act");
  Rng rng(8);
  SymbolicState s = random_state(v, rng);

  reasoning::AttentionWeights w =
      attention::forward_weights(p.attn, p.store, symbolic::flatten(s));
  Matrix kap = reasoning::kappa(w, s);
  auto q = q_values(s, p);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      CHECK(q.at({v.predicate_id("Act"), x, y}) ==
            doctest::Approx(kap(x, y)).epsilon(1e-12));
}

TEST_CASE("zero-weight heads yield the bias everywhere") {
  Vocabulary v = small_vocab();
  PolicyParams p = PolicyParams::init(v, small_model(), 9);
  make_constant_head(p, "Act", -1.25);
  Rng rng(10);
  SymbolicState s = random_state(v, rng);
  for (const auto& [atom, value] : q_values(s, p))
    CHECK(value == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("q_values matches an independent composition oracle") {
  Vocabulary v = small_vocab();
  PolicyParams p = PolicyParams::init(v, small_model(), 11);
  Rng rng(12);
  SymbolicState s = random_state(v, rng);

  // Independent route: plain weights -> plain kappa -> explicit head loops.
  reasoning::AttentionWeights w =
      attention::forward_weights(p.attn, p.store, symbolic::flatten(s));
  Matrix kap = reasoning::kappa(w, s);
  RowVector flat(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) flat(i * 3 + j) = kap(i, j);
  const Matrix& w1 = p.store.at("head.Act.w1");
  const Matrix& b1 = p.store.at("head.Act.b1");
  const Matrix& w2 = p.store.at("head.Act.w2");
  const Matrix& b2 = p.store.at("head.Act.b2");
  RowVector hidden = flat * w1 + b1.row(0);
  hidden = hidden.cwiseMax(0.0);
  RowVector out = hidden * w2 + b2.row(0);

  auto q = q_values(s, p);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      CHECK(q.at({v.predicate_id("Act"), x, y}) ==
            doctest::Approx(out(x * 3 + y)).epsilon(1e-10));
}

TEST_CASE("act: greedy argmax, tie break, saturation, empty set") {
  Rng rng(13);
  RowVector q(4);
  q << 0.3, 1.7, -0.5, 1.69;
  CHECK(act_index(q, ActMode::GreedyEpsilon, 0.0, rng) == 1);

  RowVector ties = RowVector::Zero(5);
  CHECK(act_index(ties, ActMode::GreedyEpsilon, 0.0, rng) == 0);

  RowVector sat(3);
  sat << 1000.0, 0.0, -2.0;
  for (int i = 0; i < 50; ++i)
    CHECK(act_index(sat, ActMode::Softmax, 0.0, rng) == 0);

  Vocabulary v = small_vocab();
  PolicyParams p = PolicyParams::init(v, small_model(), 14);
  SymbolicState s = symbolic::zero_state(v);
  CHECK_THROWS_AS(act(s, p, {}, ActMode::GreedyEpsilon, 0.0, rng),
                  ContractError);
}

TEST_CASE("act: epsilon=1 is uniform over atoms (chi-squared)") {
  Rng rng(15);
  RowVector q(6);
  q << 5, 4, 3, 2, 1, 0;  // argmax never sampled unless by chance
  const int n = 10000;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < n; ++i)
    ++counts[act_index(q, ActMode::GreedyEpsilon, 1.0, rng)];
  double expected = n / 6.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 25.0);  // df=5, far beyond the 0.999 quantile
}

TEST_CASE("softmax probabilities: normalized and shift invariant") {
  RowVector q(4);
  q << 0.2, -1.0, 3.0, 0.0;
  RowVector p = softmax_probs(q);
  CHECK(std::abs(p.sum() - 1.0) < 1e-12);
  RowVector shifted = softmax_probs(q.array() + 123.0);
  CHECK((p - shifted).cwiseAbs().maxCoeff() < 1e-12);

  Rng a(1), b(1);
  CHECK(act_index(q, ActMode::GreedyEpsilon, 0.0, a) ==
        act_index(RowVector(q.array() + 9.0), ActMode::GreedyEpsilon, 0.0,
                  b));
}

TEST_CASE("q_loss: terminal match gives zero, known numbers give 7.84") {
  Vocabulary v = small_vocab();
  PolicyParams online = PolicyParams::init(v, small_model(), 16);
  PolicyParams target = PolicyParams::init(v, small_model(), 17);
  make_constant_head(online, "Act", 0.0);   // every online Q = 0
  make_constant_head(target, "Act", 2.0);   // every target Q = 2
  Rng rng(18);
  SymbolicState s = random_state(v, rng);
  SymbolicState s2 = random_state(v, rng);
  auto cands = shared_atoms(v);

  Transition terminal{s, cands->front(), 0.0, s2, true, cands};
  CHECK(q_loss({&terminal, 1}, online, target, 0.9) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Transition t{s, cands->front(), 1.0, s2, false, cands};
  CHECK(q_loss({&t, 1}, online, target, 0.9) ==
        doctest::Approx(7.84).epsilon(1e-12));
}

TEST_CASE("q_loss matches a transition-by-transition oracle") {
  Vocabulary v = small_vocab();
  PolicyParams online = PolicyParams::init(v, small_model(), 19);
  PolicyParams target = PolicyParams::init(v, small_model(), 20);
  Rng rng(21);
  auto cands = shared_atoms(v);
  std::vector<Transition> batch;
  for (int i = 0; i < 12; ++i) {
    Transition t;
    t.state = random_state(v, rng);
    t.action = (*cands)[rng.uniform_int((int)cands->size())];
    t.reward = rng.uniform(-1, 1);
    t.next = random_state(v, rng);
    t.done = rng.uniform01() < 0.3;
    t.candidates = cands;
    batch.push_back(std::move(t));
  }
  double gamma = 0.9;
  double got = q_loss(batch, online, target, gamma);

  // Oracle: recompute targets through the public q_values route.
  double acc = 0.0;
  for (const Transition& t : batch) {
    double y = t.reward;
    if (!t.done) {
      auto oq = q_values(t.next, online);
      auto tq = q_values(t.next, target);
      const GroundAtom* best = &(*cands)[0];
      for (const GroundAtom& a : *cands)
        if (oq.at(a) > oq.at(*best)) best = &a;
      y += gamma * tq.at(*best);
    }
    auto q = q_values(t.state, online);
    double d = y - q.at(t.action);
    acc += d * d;
  }
  CHECK(got == doctest::Approx(acc / batch.size()).epsilon(1e-12));
}

TEST_CASE("q_loss gradients pass finite differences on a head slice") {
  Vocabulary v = small_vocab();
  PolicyParams online = PolicyParams::init(v, small_model(), 22);
  PolicyParams target = online;
  Rng rng(23);
  auto cands = shared_atoms(v);
  std::vector<Transition> batch;
  for (int i = 0; i < 4; ++i) {
    Transition t;
    t.state = random_state(v, rng);
    t.action = (*cands)[rng.uniform_int((int)cands->size())];
    t.reward = rng.uniform(-1, 1);
    t.next = random_state(v, rng);
    t.done = i % 2 == 0;
    t.candidates = cands;
    batch.push_back(std::move(t));
  }
  QLossGrads qg = q_loss_grads(batch, online, target, 0.9);
  CHECK(qg.loss == doctest::Approx(q_loss(batch, online, target, 0.9))
                       .epsilon(1e-12));

  const double eps = 1e-5;
  double max_rel = 0.0;
  for (const auto& name :
       {std::string("head.Act.w2"), std::string("attn.path.query")}) {
    Matrix& m = online.store.at(name);
    const Matrix& an = qg.grads.at(name);
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        double orig = m(i, j);
        m(i, j) = orig + eps;
        ++online.version;
        double up = q_loss(batch, online, target, 0.9);
        m(i, j) = orig - eps;
        ++online.version;
        double down = q_loss(batch, online, target, 0.9);
        m(i, j) = orig;
        ++online.version;
        double fd = (up - down) / (2 * eps);
        double denom = std::max({std::abs(fd), std::abs(an(i, j)), 1e-3});
        max_rel = std::max(max_rel, std::abs(fd - an(i, j)) / denom);
      }
    }
  }
  CHECK(max_rel < 1e-3);
}

TEST_CASE("gae reductions and explicit-sum oracle") {
  Trajectory traj;
  traj.candidates = shared_atoms(small_vocab());
  Rng rng(24);
  for (int i = 0; i < 5; ++i) {
    TrajectoryStep s;
    s.reward = rng.uniform(-1, 1);
    s.value = rng.uniform(-1, 1);
    s.done = (i == 4);
    traj.steps.push_back(s);
  }

  // lambda = 0: one-step TD advantages.
  GaeResult g0 = gae(traj, 0.9, 0.0);
  for (int i = 0; i < 5; ++i) {
    double next_v = (i == 4) ? 0.0 : traj.steps[i + 1].value;
    double delta = traj.steps[i].reward + 0.9 * next_v - traj.steps[i].value;
    CHECK(g0.advantages[i] == doctest::Approx(delta).epsilon(1e-12));
  }

  // lambda = 1, gamma = 1: empirical return minus value.
  GaeResult g1 = gae(traj, 1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    double ret = 0.0;
    for (int j = i; j < 5; ++j) ret += traj.steps[j].reward;
    CHECK(g1.advantages[i] ==
          doctest::Approx(ret - traj.steps[i].value).epsilon(1e-12));
    CHECK(g1.returns[i] == doctest::Approx(ret).epsilon(1e-12));
  }

  // Random middle ground: explicit forward sum oracle.
  double gamma = 0.97, lambda = 0.6;
  GaeResult gm = gae(traj, gamma, lambda);
  for (int i = 0; i < 5; ++i) {
    double acc = 0.0;
    for (int j = i; j < 5; ++j) {
      double next_v = (j == 4) ? 0.0 : traj.steps[j + 1].value;
      double delta =
          traj.steps[j].reward + gamma * next_v - traj.steps[j].value;
      acc += std::pow(gamma * lambda, j - i) * delta;
    }
    CHECK(gm.advantages[i] == doctest::Approx(acc).epsilon(1e-12));
  }
}

namespace {

/// Deterministic three-state chain for Bellman-targeted checks:
/// s0 -Act(x1,x2)-> s1 (r=0); s1 -Act(x1,x2)-> terminal (r=1);
/// Act(x2,x1) terminates immediately (r=0.5 from s0, r=0 from s1).
class ChainEnv : public Env {
 public:
  ChainEnv()
      : vocab_({"x1", "x2"},
               {{"S", false, false}, {"Act", true, false}}) {
    int act = vocab_.predicate_id("Act");
    atoms_ = {{act, 0, 1}, {act, 1, 0}};
  }

  const Vocabulary& vocab() const override { return vocab_; }
  const std::vector<GroundAtom>& action_atoms() const override {
    return atoms_;
  }

  SymbolicState reset() override {
    stage_ = 0;
    return state_for_stage();
  }

  StepOut step(const GroundAtom& a) override {
    StepOut out;
    bool advance = a.subject == 0;
    if (stage_ == 0) {
      if (advance) {
        stage_ = 1;
        out.reward = 0.0;
        out.done = false;
      } else {
        out.reward = 0.5;
        out.done = true;
      }
    } else {
      out.reward = advance ? 1.0 : 0.0;
      out.done = true;
    }
    out.next = state_for_stage();
    return out;
  }

  SymbolicState state_for_stage() const {
    SymbolicState s = symbolic::zero_state(vocab_);
    int marker = vocab_.predicate_id("S");
    s.mats[marker](stage_, stage_) = 1.0;
    return s;
  }

  int stage_ = 0;

 private:
  Vocabulary vocab_;
  std::vector<GroundAtom> atoms_;
};

ModelConfig chain_model() {
  ModelConfig mc;
  mc.attn = attention::Config{2, 1, 2, 8};  // d_model = 4
  mc.head_hidden = 8;
  mc.critic_hidden = 5;
  return mc;
}

}  // namespace

TEST_CASE("dqn_train: zero steps is an identity") {
  ChainEnv env, eval_env;
  PolicyParams p = PolicyParams::init(env.vocab(), chain_model(), 30);
  std::string before = [&] {
    std::string s;
    for (const auto& e : p.store.entries())
      s.append((const char*)e.value.data(), sizeof(double) * e.value.size());
    return s;
  }();
  numerics::Adam opt(1e-3);
  DqnHyper h;
  h.steps = 0;
  Rng rng(31);
  dqn_train(env, eval_env, p, opt, h, rng);
  std::string after = [&] {
    std::string s;
    for (const auto& e : p.store.entries())
      s.append((const char*)e.value.data(), sizeof(double) * e.value.size());
    return s;
  }();
  CHECK(before == after);
}

TEST_CASE("dqn_train solves the deterministic chain MDP") {
  ChainEnv env, eval_env;
  PolicyParams p = PolicyParams::init(env.vocab(), chain_model(), 32);
  numerics::Adam opt(3e-3);
  DqnHyper h;
  h.steps = 3000;
  h.gamma = 0.9;
  h.batch = 16;
  h.train_every = 1;
  h.target_sync = 100;
  h.eps_start = 1.0;
  h.eps_end = 0.3;
  h.eval_every = 0;
  Rng rng(33);
  dqn_train(env, eval_env, p, opt, h, rng);

  // Bellman solution: Q*(s0, advance) = 0.9, Q*(s0, stop) = 0.5,
  //                   Q*(s1, advance) = 1.0, Q*(s1, stop) = 0.0.
  env.reset();
  SymbolicState s0 = env.state_for_stage();
  env.stage_ = 1;
  SymbolicState s1 = env.state_for_stage();
  QEvaluator eval(p);
  const auto& q0 = eval.lookup(s0, env.action_atoms());
  const auto& q1 = eval.lookup(s1, env.action_atoms());
  CHECK(q0.q(0) == doctest::Approx(0.9).epsilon(0.02));
  CHECK(q0.q(1) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(q1.q(0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(q1.q(1) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
}

TEST_CASE("ppo_update: zero advantages leave policy parameters unchanged") {
  ChainEnv env;
  ModelConfig mc = chain_model();
  mc.with_critic = true;
  PolicyParams p = PolicyParams::init(env.vocab(), mc, 34);

  Trajectory traj;
  traj.candidates = std::make_shared<const AtomList>(env.action_atoms());
  QEvaluator eval(p, true);
  SymbolicState s = env.reset();
  Rng rng(35);
  for (int i = 0; i < 4; ++i) {
    const auto& e = eval.lookup(s, *traj.candidates);
    TrajectoryStep ts;
    ts.state = s;
    ts.action_index = i % 2;
    ts.reward = 0.0;  // zero rewards + zero values => zero advantages
    ts.value = 0.0;
    ts.done = (i == 3);
    ts.log_prob = std::log(softmax_probs(e.q)(ts.action_index));
    traj.steps.push_back(ts);
    s = env.reset();
  }
  // Force collected values to zero by zeroing the critic output layer.
  p.store.at("critic.w2").setZero();
  p.store.at("critic.b2").setZero();

  std::map<std::string, Matrix> before;
  for (const auto& e : p.store.entries()) before[e.name] = e.value;

  numerics::Adam opt(1e-2);
  PpoSettings st;
  st.epochs = 2;
  st.entropy_coef = 0.0;  // isolate the advantage-driven policy term
  st.value_coef = 0.5;
  Rng urng(36);
  PpoDiagnostics diag = ppo_update({&traj, 1}, p, opt, st, urng);
  CHECK(diag.policy_loss == doctest::Approx(0.0).epsilon(1e-12));

  for (const auto& e : p.store.entries()) {
    if (e.name.rfind("critic", 0) == 0) continue;  // value loss may move it
    CHECK(e.value == before[e.name]);
  }
}

TEST_CASE("ppo_update first loss matches a hand-computed oracle") {
  ChainEnv env;
  ModelConfig mc = chain_model();
  mc.with_critic = true;
  PolicyParams p = PolicyParams::init(env.vocab(), mc, 37);

  Trajectory traj;
  traj.candidates = std::make_shared<const AtomList>(env.action_atoms());
  QEvaluator eval(p, true);
  SymbolicState s = env.reset();
  bool done = false;
  while (!done) {
    const auto& e = eval.lookup(s, *traj.candidates);
    int idx = 0;  // always advance: a deterministic two-step episode
    StepOut out = env.step((*traj.candidates)[idx]);
    TrajectoryStep ts;
    ts.state = s;
    ts.action_index = idx;
    ts.reward = out.reward;
    ts.done = out.done;
    ts.log_prob = std::log(softmax_probs(e.q)(idx));
    ts.value = e.value;
    traj.steps.push_back(ts);
    s = out.next;
    done = out.done;
  }

  PpoSettings st;
  st.epochs = 1;
  st.gamma = 0.9;
  st.lambda = 0.8;

  // Oracle: with unchanged parameters every ratio is 1, so the policy term
  // is -mean(adv), the value term mean((V - R)^2), entropy from the probs.
  GaeResult g = gae(traj, st.gamma, st.lambda);
  std::vector<double> adv = g.advantages;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= adv.size();
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  double sd = std::sqrt(var / adv.size());
  double ploss = 0.0, vloss = 0.0, ent = 0.0;
  for (size_t i = 0; i < traj.steps.size(); ++i) {
    double a = (adv[i] - mean) / (sd + 1e-8);
    ploss += -a;
    const auto& e = eval.lookup(traj.steps[i].state, *traj.candidates);
    double verr = e.value - g.returns[i];
    vloss += verr * verr;
    RowVector probs = softmax_probs(e.q);
    for (int k = 0; k < probs.cols(); ++k)
      ent -= probs(k) * std::log(probs(k));
  }
  double n = (double)traj.steps.size();
  double expect =
      ploss / n + st.value_coef * (vloss / n) - st.entropy_coef * (ent / n);

  numerics::Adam opt(1e-3);
  Rng urng(39);
  PpoDiagnostics diag = ppo_update({&traj, 1}, p, opt, st, urng);
  CHECK(diag.first_loss == doctest::Approx(expect).epsilon(1e-10));
  CHECK(diag.mean_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(diag.clip_fraction == doctest::Approx(0.0));
}

TEST_CASE("trainers with zero learning rate are parameter identities") {
  ChainEnv env, eval_env;
  ModelConfig mc = chain_model();
  mc.with_critic = true;
  PolicyParams p = PolicyParams::init(env.vocab(), mc, 40);
  std::map<std::string, Matrix> before;
  for (const auto& e : p.store.entries()) before[e.name] = e.value;

  numerics::Adam opt(0.0);
  PpoHyper h;
  h.episodes = 6;
  h.batch_episodes = 3;
  h.eval_every_updates = 0;
  Rng rng(41);
  ppo_train(env, eval_env, p, opt, h, rng);
  for (const auto& e : p.store.entries()) CHECK(e.value == before[e.name]);

  numerics::Adam opt2(0.0);
  DqnHyper dh;
  dh.steps = 50;
  dh.batch = 8;
  dh.train_every = 1;
  dh.eval_every = 0;
  Rng rng2(42);
  dqn_train(env, eval_env, p, opt2, dh, rng2);
  for (const auto& e : p.store.entries()) CHECK(e.value == before[e.name]);
}

TEST_CASE("masked evaluation never plays an unavailable atom") {
  envs::KeyDoorConfig kc;
  kc.mask_invalid = true;
  kc.seed = 5;

  // Wrapper that checks each incoming action against the valid set.
  class Checked : public Env {
   public:
    explicit Checked(envs::KeyDoorConfig c) : inner_(std::move(c)) {}
    const Vocabulary& vocab() const override { return inner_.vocab(); }
    const std::vector<GroundAtom>& action_atoms() const override {
      return inner_.action_atoms();
    }
    SymbolicState reset() override { return inner_.reset(); }
    StepOut step(const GroundAtom& a) override {
      auto valid = inner_.valid_atoms();
      bool ok = std::find(valid.begin(), valid.end(), a) != valid.end();
      CHECK(ok);
      return inner_.step(a);
    }
    std::vector<GroundAtom> valid_atoms() const override {
      return inner_.valid_atoms();
    }
    bool mask_invalid() const override { return true; }

   private:
    envs::KeyDoorEnv inner_;
  };

  Checked env(kc);
  ModelConfig mc;
  mc.attn = attention::Config{2, 1, 4, 16};  // d_model = 64
  mc.head_hidden = 16;
  PolicyParams p = PolicyParams::init(env.vocab(), mc, 43);
  Rng rng(44);
  evaluate(env, p, ActMode::Softmax, 0.0, 5, rng);
}
