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

#include "nesyrl/trainers.hpp"

#include <algorithm>
#include <cmath>

namespace nesyrl::policy {

namespace {

double epsilon_at(const DqnHyper& h, long step) {
  long decay_steps =
      std::max<long>(1, static_cast<long>(h.eps_fraction * h.steps));
  if (step >= decay_steps) return h.eps_end;
  double f = static_cast<double>(step) / static_cast<double>(decay_steps);
  return h.eps_start + f * (h.eps_end - h.eps_start);
}

EvalSummary summarize(const std::vector<double>& returns) {
  EvalSummary s;
  s.episodes = static_cast<int>(returns.size());
  if (returns.empty()) return s;
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= returns.size();
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var / returns.size());
  return s;
}

/// One episode under the given mode, sharing the evaluator cache.
double run_episode(Env& env, QEvaluator& eval, ActMode mode, double epsilon,
                   Rng& rng) {
  SymbolicState s = env.reset();
  const std::vector<GroundAtom>& cands = env.action_atoms();
  double total = 0.0;
  bool done = false;
  while (!done) {
    const auto& e = eval.lookup(s, cands);
    int idx;
    if (env.mask_invalid()) {
      // Masked atoms carry zero probability: selection runs over the valid
      // subset only.
      std::vector<GroundAtom> valid = env.valid_atoms();
      RowVector q(static_cast<Eigen::Index>(valid.size()));
      std::vector<int> map(valid.size());
      for (size_t i = 0; i < valid.size(); ++i) {
        auto it = std::find(cands.begin(), cands.end(), valid[i]);
        map[i] = static_cast<int>(it - cands.begin());
        q(static_cast<Eigen::Index>(i)) = e.q(map[i]);
      }
      idx = map[act_index(q, mode, epsilon, rng)];
    } else {
      idx = act_index(e.q, mode, epsilon, rng);
    }
    StepOut out = env.step(cands[idx]);
    total += out.reward;
    s = std::move(out.next);
    done = out.done;
  }
  return total;
}

}  // namespace

EvalSummary evaluate(Env& env, const PolicyParams& params, ActMode mode,
                     double epsilon, int episodes, Rng& rng) {
  if (episodes <= 0) throw ContractError("evaluate: episodes must be > 0");
  QEvaluator eval(params);
  std::vector<double> returns;
  returns.reserve(episodes);
  for (int e = 0; e < episodes; ++e)
    returns.push_back(run_episode(env, eval, mode, epsilon, rng));
  return summarize(returns);
}

EvalSummary evaluate_policy(
    Env& env,
    const std::function<GroundAtom(const SymbolicState&, Rng&)>& pick,
    int episodes, Rng& rng) {
  if (episodes <= 0) throw ContractError("evaluate: episodes must be > 0");
  std::vector<double> returns;
  for (int e = 0; e < episodes; ++e) {
    SymbolicState s = env.reset();
    double total = 0.0;
    bool done = false;
    while (!done) {
      StepOut out = env.step(pick(s, rng));
      total += out.reward;
      s = std::move(out.next);
      done = out.done;
    }
    returns.push_back(total);
  }
  return summarize(returns);
}

DqnResult dqn_train(Env& env, Env& eval_env, PolicyParams& params,
                    numerics::Adam& opt, const DqnHyper& hyper, Rng& rng,
                    const TrainHooks& hooks) {
  DqnResult result;
  if (hyper.steps <= 0) return result;

  PolicyParams target = params;
  target.version = params.version + 1;  // distinct cache generation
  ReplayBuffer buffer(hyper.buffer_capacity);
  QEvaluator actor(params);
  Rng eval_rng = Rng::stream(rng.next(), 0xE7A0);

  SymbolicState s = env.reset();
  auto cands = std::make_shared<const AtomList>(env.action_atoms());
  double ep_return = 0.0;
  int ep_len = 0;

  for (long step = 0; step < hyper.steps; ++step) {
    double eps = epsilon_at(hyper, step);
    const auto& e = actor.lookup(s, *cands);
    int idx = act_index(e.q, ActMode::GreedyEpsilon, eps, rng);
    StepOut out = env.step((*cands)[idx]);
    buffer.push(Transition{s, (*cands)[idx], out.reward * hyper.reward_scale,
                           out.next, out.done, cands});
    ep_return += out.reward;
    ++ep_len;
    s = std::move(out.next);
    result.steps_run = step + 1;

    if (out.done) {
      ++result.episodes;
      if (hooks.on_episode)
        hooks.on_episode({result.episodes, step + 1, ep_return, ep_len});
      if (hooks.on_checkpoint && hyper.checkpoint_every_episodes > 0 &&
          result.episodes % hyper.checkpoint_every_episodes == 0)
        hooks.on_checkpoint(result.episodes);
      ep_return = 0.0;
      ep_len = 0;
      s = env.reset();
      cands = std::make_shared<const AtomList>(env.action_atoms());
    }

    if ((step + 1) % hyper.train_every == 0 &&
        buffer.size() >= static_cast<size_t>(hyper.batch)) {
      std::vector<Transition> batch;
      batch.reserve(hyper.batch);
      for (int i = 0; i < hyper.batch; ++i)
        batch.push_back(buffer.sample(rng));
      QLossGrads qg = q_loss_grads(batch, params, target, hyper.gamma);
      opt.step(params.store, qg.grads);
      ++params.version;
    }

    if ((step + 1) % hyper.target_sync == 0) {
      target.store = params.store;
      ++target.version;
    }

    if (hyper.eval_every > 0 && (step + 1) % hyper.eval_every == 0) {
      EvalSummary es = evaluate(eval_env, params, hyper.eval_mode, 0.0,
                                hyper.eval_episodes, eval_rng);
      if (hooks.on_eval)
        hooks.on_eval(
            {result.episodes, step + 1, es.mean, es.stddev, es.episodes});
      if (std::isfinite(hyper.stop_return) &&
          es.mean >= hyper.stop_return) {
        result.stopped_early = true;
        break;
      }
    }
  }
  return result;
}

PpoResult ppo_train(Env& env, Env& eval_env, PolicyParams& params,
                    numerics::Adam& opt, const PpoHyper& hyper, Rng& rng,
                    const TrainHooks& hooks) {
  PpoResult result;
  if (hyper.episodes <= 0) return result;

  Rng eval_rng = Rng::stream(rng.next(), 0xE7A1);
  long total_steps = 0;

  while (result.episodes < hyper.episodes) {
    int batch_n = static_cast<int>(std::min<long>(
        hyper.batch_episodes, hyper.episodes - result.episodes));
    std::vector<Trajectory> batch;
    batch.reserve(batch_n);
    QEvaluator collector(params, /*with_value=*/true);
    for (int b = 0; b < batch_n; ++b) {
      Trajectory traj;
      SymbolicState s = env.reset();
      traj.candidates = std::make_shared<const AtomList>(env.action_atoms());
      bool done = false;
      double ep_return = 0.0;
      while (!done) {
        const auto& e = collector.lookup(s, *traj.candidates);
        int idx = act_index(e.q, ActMode::Softmax, 0.0, rng);
        RowVector probs = softmax_probs(e.q);
        StepOut out = env.step((*traj.candidates)[idx]);
        TrajectoryStep ts;
        ts.state = s;
        ts.action_index = idx;
        ts.reward = out.reward * hyper.reward_scale;
        ts.done = out.done;
        ts.log_prob = std::log(std::max(probs(idx), 1e-300));
        ts.value = e.value;
        traj.steps.push_back(std::move(ts));
        ep_return += out.reward;
        ++total_steps;
        s = std::move(out.next);
        done = out.done;
      }
      ++result.episodes;
      if (hooks.on_episode)
        hooks.on_episode({result.episodes, total_steps, ep_return,
                          static_cast<int>(traj.steps.size())});
      batch.push_back(std::move(traj));
    }

    ppo_update(batch, params, opt, hyper.settings, rng);
    ++result.updates;

    if (hooks.on_checkpoint && hyper.checkpoint_every_episodes > 0 &&
        result.episodes % hyper.checkpoint_every_episodes == 0)
      hooks.on_checkpoint(result.episodes);

    if (hyper.eval_every_updates > 0 &&
        result.updates % hyper.eval_every_updates == 0) {
      EvalSummary es = evaluate(eval_env, params, hyper.eval_mode, 0.0,
                                hyper.eval_episodes, eval_rng);
      if (hooks.on_eval)
        hooks.on_eval(
            {result.episodes, total_steps, es.mean, es.stddev, es.episodes});
      if (std::isfinite(hyper.stop_return) &&
          es.mean >= hyper.stop_return) {
        result.stopped_early = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace nesyrl::policy
