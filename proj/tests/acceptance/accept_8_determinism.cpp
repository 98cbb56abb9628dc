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

// Criterion 8: identical config + seed produce byte-identical logs and
// checkpoints across two full CLI runs (one PPO blocks run, one DQN
// keydoor run).

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "acceptance_util.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  acceptance::Criterion crit(8, "determinism");
  std::string bin = argc > 1 ? argv[1] : "./nesyrl";
  namespace fs = std::filesystem;
  fs::create_directories("det_work");

  std::ofstream cfg("det_work/blocks.cfg");
  cfg << "seed = 12\n"
         "env.domain = blocks\n"
         "env.task = unstack\n"
         "env.variant = training\n"
         "env.horizon = 10\n"
         "trainer.algorithm = ppo\n"
         "trainer.episodes = 6\n"
         "trainer.batch_episodes = 3\n"
         "trainer.eval_every_updates = 1\n"
         "trainer.eval_episodes = 4\n"
         "model.reasoning_steps = 2\n"
         "model.layers = 1\n"
         "model.heads = 2\n"
         "model.hidden = 16\n"
         "model.head_hidden = 16\n"
         "io.checkpoint = det_work/run.ck\n"
         "io.log = det_work/run.jsonl\n";
  cfg.close();

  std::ofstream kcfg("det_work/keydoor.cfg");
  kcfg << "seed = 21\n"
          "env.domain = keydoor\n"
          "trainer.algorithm = dqn\n"
          "trainer.steps = 300\n"
          "trainer.batch = 16\n"
          "trainer.train_every = 8\n"
          "trainer.eval_every = 100\n"
          "model.reasoning_steps = 2\n"
          "model.layers = 1\n"
          "model.heads = 2\n"
          "model.hidden = 16\n"
          "model.head_hidden = 16\n"
          "io.checkpoint = det_work/run.ck\n"
          "io.log = det_work/run.jsonl\n";
  kcfg.close();

  for (std::string name : {"blocks", "keydoor"}) {
    std::string log1, log2, ck1, ck2;
    for (int run = 1; run <= 2; ++run) {
      std::error_code ec;
      fs::remove("det_work/run.ck", ec);
      fs::remove("det_work/run.jsonl", ec);
      int code = 0;
      acceptance::run_command(bin + " train --config=det_work/" + name +
                                  ".cfg",
                              code);
      crit.check(code == 0,
                 name + " run " + std::to_string(run) + " exited " +
                     std::to_string(code));
      (run == 1 ? log1 : log2) = slurp("det_work/run.jsonl");
      (run == 1 ? ck1 : ck2) = slurp("det_work/run.ck");
    }
    crit.check(!log1.empty(), name + ": empty log");
    crit.check(log1 == log2, name + ": logs differ between identical runs");
    crit.check(ck1 == ck2,
               name + ": checkpoints differ between identical runs");
  }
  return crit.finish();
}
