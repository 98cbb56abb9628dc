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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nesyrl/cli.hpp"
#include "nesyrl/episode_log.hpp"
#include "nesyrl/plot.hpp"

using namespace nesyrl;
using namespace nesyrl::cli;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void remove_if_exists(const std::string& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

}  // namespace

TEST_CASE("config text parses with comments, spacing and overrides") {
  RunConfig c = parse_config_text(
      "# a comment\n"
      "seed = 9\n"
      "\n"
      "env.domain = blocks\n"
      "env.task   =   stack\n"
      "trainer.lr = 0.001\n");
  CHECK(c.seed == 9);
  CHECK(c.env_task == "stack");
  CHECK(c.trainer_lr == doctest::Approx(0.001));

  apply_overrides(c, {"--env.task=on", "--trainer.epochs=7"});
  CHECK(c.env_task == "on");
  CHECK(c.trainer_epochs == 7);
}

TEST_CASE("config errors carry line anchors and unknown keys fail") {
  try {
    parse_config_text("seed = 1\nwhat.is.this = 3\n", "test.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("what.is.this") != std::string::npos);
  }
  try {
    parse_config_text("trainer.lr = banana\n", "test.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.cfg:1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("no equals sign here\n"), ConfigError);
}

TEST_CASE("config validation rejects bad ranges") {
  RunConfig c;
  c.trainer_lr = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.trainer_gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.model_reasoning_steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.env_domain = "atari";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.validate();  // defaults are valid
}

TEST_CASE("pile notation parses and formats back") {
  symbolic::Vocabulary v = envs::blocks_vocabulary(false);
  auto piles = envs::parse_piles("((a,b,c),(d))", v);
  REQUIRE(piles.size() == 2);
  CHECK(piles[0] == std::vector<int>{0, 1, 2});
  CHECK(piles[1] == std::vector<int>{3});
  CHECK(envs::format_piles(piles, v) == "((a,b,c),(d))");
  CHECK(envs::parse_piles(" ( ( a , b ) , ( c ) ) ", v) ==
        envs::parse_piles("((a,b),(c))", v));
  CHECK_THROWS_AS(envs::parse_piles("(a,b)", v), ConfigError);
  CHECK_THROWS_AS(envs::parse_piles("((a,zz))", v), VocabularyError);
}

TEST_CASE("checkpoint text round-trips byte-identically") {
  RunConfig config;
  config.env_task = "unstack";
  config.seed = 5;
  policy::PolicyParams params = policy::PolicyParams::init(
      envs::blocks_vocabulary(false), model_config(config), 5);
  TrainerState ts;
  ts.algorithm = "ppo";
  ts.episode = 12;
  ts.epsilon = 0.3337779;
  Rng rng(1);
  rng.next();
  Checkpoint ck = make_checkpoint(config, params, ts, rng.serialize());

  std::string text = checkpoint_to_text(ck);
  Checkpoint back = checkpoint_from_text(text);
  CHECK(checkpoint_to_text(back) == text);  // byte-identical

  save_checkpoint(ck, "t_ck.nesyrl");
  Checkpoint loaded = load_checkpoint("t_ck.nesyrl");
  CHECK(checkpoint_to_text(loaded) == text);

  // Parameters reconstruct exactly.
  policy::PolicyParams rebuilt = params_from_checkpoint(loaded);
  for (const auto& e : params.store.entries())
    CHECK(rebuilt.store.at(e.name) == e.value);
}

TEST_CASE("checkpoint version and shape guards") {
  RunConfig config;
  policy::PolicyParams params = policy::PolicyParams::init(
      envs::blocks_vocabulary(false), model_config(config), 1);
  Checkpoint ck = make_checkpoint(config, params, TrainerState{}, "");
  std::string text = checkpoint_to_text(ck);
  std::string bad = text;
  bad.replace(bad.find("nesyrl-checkpoint 1"), 19, "nesyrl-checkpoint 9");
  CHECK_THROWS_AS(checkpoint_from_text(bad), IncompatibilityError);

  Checkpoint mutated = checkpoint_from_text(text);
  mutated.tensors[0].second.resize(1, 1);
  CHECK_THROWS_AS(params_from_checkpoint(mutated), IncompatibilityError);

  CHECK_THROWS_AS(load_checkpoint("no_such_file.nesyrl"), ConfigError);
}

TEST_CASE("episode log appends JSON lines and enforces episode order") {
  remove_if_exists("t_log.jsonl");
  {
    EpisodeLog log("t_log.jsonl");
    log.write({{"kind", "episode"}, {"episode", 1}, {"return", 0.5}});
    log.write({{"kind", "episode"}, {"episode", 2}, {"return", 0.7}});
    log.write({{"kind", "eval"}, {"episode", 2}, {"return", 0.9}});
    CHECK_THROWS_AS(log.write({{"kind", "episode"}, {"episode", 1}}),
                    ContractError);
  }
  auto records = read_log("t_log.jsonl");
  REQUIRE(records.size() == 3);
  CHECK(records[0].at("return").get<double>() == 0.5);
  CHECK(records[2].at("kind") == "eval");

  std::ofstream bad("t_bad.jsonl", std::ios::binary);
  bad << "{\"ok\":1}\nnot json at all\n";
  bad.close();
  try {
    read_log("t_bad.jsonl");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("plot: single marker, multi-seed band, error paths") {
  Series single{"s1", {{100, 0.5}}};
  std::string svg = learning_curve_svg({single}, "t", "x", "y");
  CHECK(svg.find("<circle") != std::string::npos);

  Series a{"a", {{0, 0.0}, {100, 0.6}, {200, 0.9}}};
  Series b{"b", {{0, 0.1}, {100, 0.4}, {200, 0.95}}};
  std::string two = learning_curve_svg({a, b}, "t", "x", "y");
  CHECK(two.find("<polyline") != std::string::npos);
  CHECK(two.find("opacity=\"0.15\"") != std::string::npos);  // the band

  CHECK_THROWS_AS(learning_curve_svg({}, "t", "x", "y"), ConfigError);
}

TEST_CASE("cli parsing and exit codes") {
  CliArgs args = parse_cli({"rules", "--checkpoint=ck", "--states", "7",
                            "--topk=3", "--force-onehot", "--env.task=on",
                            "extra.log"});
  CHECK(args.command == "rules");
  CHECK(args.checkpoint_path == "ck");
  CHECK(args.states == 7);
  CHECK(args.topk == 3);
  CHECK(args.force_onehot);
  CHECK(args.overrides == std::vector<std::string>{"--env.task=on"});
  CHECK(args.positional == std::vector<std::string>{"extra.log"});

  std::ostringstream out, err;
  CHECK(run_cli({"frobnicate"}, out, err) == kErrConfig);
  CHECK(run_cli({"train", "--trainer.lr=-1"}, out, err) == kErrConfig);
  CHECK(run_cli({"eval", "--checkpoint=missing.ck"}, out, err) == kErrConfig);
  CHECK(run_cli({"plot", "--out=t.svg", "missing.jsonl"}, out, err) ==
        kErrConfig);
}

TEST_CASE("config dir environment variable resolves relative paths") {
  std::filesystem::create_directories("t_cfgdir");
  std::ofstream f("t_cfgdir/mini.cfg");
  f << "seed = 77\n";
  f.close();
  setenv(kConfigDirEnvVar, "t_cfgdir", 1);
  CliArgs args = parse_cli({"oracle", "--config=mini.cfg"});
  RunConfig c = resolve_config(args);
  CHECK(c.seed == 77);
  unsetenv(kConfigDirEnvVar);
}

TEST_CASE("identical config and seed produce byte-identical artifacts") {
  RunConfig config;
  config.seed = 3;
  config.env_domain = "blocks";
  config.env_task = "unstack";
  config.env_variant = "training";
  config.env_horizon = 8;
  config.trainer_algorithm = "ppo";
  config.trainer_episodes = 4;
  config.trainer_batch_episodes = 2;
  config.trainer_eval_every_updates = 1;
  config.trainer_eval_episodes = 3;
  config.model_reasoning_steps = 2;
  config.model_layers = 1;
  config.model_heads = 2;
  config.model_hidden = 8;
  config.model_head_hidden = 8;
  config.validate();

  auto run = [&](const std::string& tag) {
    RunConfig c = config;
    c.io_checkpoint = "t_det_" + tag + ".ck";
    c.io_log = "t_det_" + tag + ".jsonl";
    remove_if_exists(c.io_checkpoint);
    remove_if_exists(c.io_log);
    std::ostringstream out;
    CHECK(cmd_train(c, out) == 0);
    // The io paths differ between the two runs; compare content with the
    // path-bearing config lines normalized.
    std::string log = slurp(c.io_log);
    std::string ck = slurp(c.io_checkpoint);
    for (const std::string& path : {c.io_checkpoint, c.io_log}) {
      size_t p;
      while ((p = ck.find(path)) != std::string::npos)
        ck.replace(p, path.size(), "PATH");
    }
    return std::pair<std::string, std::string>{log, ck};
  };
  auto [log1, ck1] = run("a");
  auto [log2, ck2] = run("b");
  CHECK(log1 == log2);
  CHECK(ck1 == ck2);
}
