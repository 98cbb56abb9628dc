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

#include "nesyrl/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nesyrl::cli {

namespace {

void write_matrix_block(std::ostringstream& os, const std::string& tag,
                        const std::string& name, const Matrix& m) {
  os << tag << " " << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << " ";
      os << format_double(m(i, j));
    }
    os << "\n";
  }
}

struct Reader {
  std::istringstream is;
  std::string line;
  int lineno = 0;

  explicit Reader(const std::string& text) : is(text) {}

  bool next() {
    if (!std::getline(is, line)) return false;
    ++lineno;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IncompatibilityError("checkpoint line " + std::to_string(lineno) +
                               ": " + what);
  }

  void expect(const std::string& want) {
    if (!next() || line != want) fail("expected '" + want + "'");
  }
};

Matrix read_matrix(Reader& r, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!r.next()) r.fail("truncated matrix");
    std::istringstream ls(r.line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(ls >> tok)) r.fail("short matrix row");
      m(i, j) = std::strtod(tok.c_str(), nullptr);
    }
  }
  return m;
}

}  // namespace

std::string checkpoint_to_text(const Checkpoint& ck) {
  std::ostringstream os;
  os << "nesyrl-checkpoint " << ck.format_version << "\n";
  os << "config-begin\n";
  for (const auto& [k, v] : ck.config) os << k << " = " << v << "\n";
  os << "config-end\n";
  os << "vocab-begin\n";
  for (const auto& e : ck.vocab.entities()) os << "entity " << e << "\n";
  for (const auto& p : ck.vocab.predicates())
    os << "predicate " << p.name << " " << (p.action ? "action" : "state")
       << " " << (p.diagonal ? "diagonal" : "binary") << "\n";
  os << "vocab-end\n";
  os << "trainer-begin\n";
  os << "algorithm " << ck.trainer.algorithm << "\n";
  os << "episode " << ck.trainer.episode << "\n";
  os << "step " << ck.trainer.step << "\n";
  os << "epsilon " << format_double(ck.trainer.epsilon) << "\n";
  os << "adam_t " << ck.trainer.adam_t << "\n";
  os << "version " << ck.trainer.version << "\n";
  os << "trainer-end\n";
  os << "rng-begin\n";
  os << ck.rng_state << "\n";
  os << "rng-end\n";
  for (const auto& [name, m] : ck.tensors)
    write_matrix_block(os, "tensor", name, m);
  for (const auto& [name, m] : ck.moment1)
    write_matrix_block(os, "moment1", name, m);
  for (const auto& [name, m] : ck.moment2)
    write_matrix_block(os, "moment2", name, m);
  os << "end\n";
  return os.str();
}

Checkpoint checkpoint_from_text(const std::string& text) {
  Checkpoint ck;
  Reader r(text);
  if (!r.next()) r.fail("empty checkpoint");
  {
    std::istringstream hs(r.line);
    std::string magic;
    hs >> magic >> ck.format_version;
    if (magic != "nesyrl-checkpoint") r.fail("bad magic");
    if (ck.format_version != 1)
      r.fail("unsupported format version " +
             std::to_string(ck.format_version));
  }
  r.expect("config-begin");
  while (r.next() && r.line != "config-end") {
    size_t eq = r.line.find(" = ");
    if (eq == std::string::npos) r.fail("bad config line");
    ck.config.emplace_back(r.line.substr(0, eq), r.line.substr(eq + 3));
  }
  r.expect("vocab-begin");
  std::vector<std::string> entities;
  std::vector<symbolic::Predicate> preds;
  while (r.next() && r.line != "vocab-end") {
    std::istringstream ls(r.line);
    std::string kind, name;
    ls >> kind >> name;
    if (kind == "entity") {
      entities.push_back(name);
    } else if (kind == "predicate") {
      std::string role, shape;
      ls >> role >> shape;
      preds.push_back({name, role == "action", shape == "diagonal"});
    } else {
      r.fail("bad vocab line");
    }
  }
  ck.vocab = symbolic::Vocabulary(std::move(entities), std::move(preds));
  r.expect("trainer-begin");
  while (r.next() && r.line != "trainer-end") {
    std::istringstream ls(r.line);
    std::string key, value;
    ls >> key;
    std::getline(ls, value);
    if (!value.empty() && value[0] == ' ') value.erase(0, 1);
    if (key == "algorithm") ck.trainer.algorithm = value;
    else if (key == "episode") ck.trainer.episode = std::stol(value);
    else if (key == "step") ck.trainer.step = std::stol(value);
    else if (key == "epsilon")
      ck.trainer.epsilon = std::strtod(value.c_str(), nullptr);
    else if (key == "adam_t") ck.trainer.adam_t = std::stol(value);
    else if (key == "version") ck.trainer.version = std::stoull(value);
    else r.fail("bad trainer line: " + key);
  }
  r.expect("rng-begin");
  {
    std::string state;
    bool first = true;
    while (r.next() && r.line != "rng-end") {
      if (!first) state += "\n";
      state += r.line;
      first = false;
    }
    ck.rng_state = state;
  }
  while (r.next() && r.line != "end") {
    std::istringstream ls(r.line);
    std::string tag, name;
    Eigen::Index rows, cols;
    if (!(ls >> tag >> name >> rows >> cols)) r.fail("bad tensor header");
    Matrix m = read_matrix(r, rows, cols);
    if (tag == "tensor") ck.tensors.emplace_back(name, std::move(m));
    else if (tag == "moment1") ck.moment1.emplace_back(name, std::move(m));
    else if (tag == "moment2") ck.moment2.emplace_back(name, std::move(m));
    else r.fail("bad block tag: " + tag);
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
    out << checkpoint_to_text(ck);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_text(ss.str());
}

Checkpoint make_checkpoint(const RunConfig& config,
                           const policy::PolicyParams& params,
                           const TrainerState& trainer,
                           const std::string& rng_state) {
  Checkpoint ck;
  ck.config = to_key_values(config);
  ck.vocab = params.vocab;
  ck.trainer = trainer;
  ck.rng_state = rng_state;
  for (const auto& e : params.store.entries())
    ck.tensors.emplace_back(e.name, e.value);
  return ck;
}

RunConfig config_from_checkpoint(const Checkpoint& ck) {
  RunConfig config;
  for (const auto& [k, v] : ck.config)
    apply_key_value(config, k, v, "checkpoint config");
  return config;
}

policy::PolicyParams params_from_checkpoint(const Checkpoint& ck) {
  RunConfig config = config_from_checkpoint(ck);
  policy::ModelConfig mc;
  mc.attn.steps = config.model_reasoning_steps;
  mc.attn.layers = config.model_layers;
  mc.attn.heads = config.model_heads;
  mc.attn.hidden = config.model_hidden;
  mc.head_hidden = config.model_head_hidden;
  mc.critic_hidden = config.model_critic_hidden;
  mc.with_critic = config.trainer_algorithm == "ppo";
  policy::PolicyParams params =
      policy::PolicyParams::init(ck.vocab, mc, config.seed);
  if (ck.tensors.size() != params.store.size())
    throw IncompatibilityError(
        "checkpoint tensor count does not match the model layout");
  for (const auto& [name, m] : ck.tensors) {
    if (!params.store.has(name))
      throw IncompatibilityError("checkpoint tensor '" + name +
                                 "' is not part of the model");
    Matrix& dst = params.store.at(name);
    if (dst.rows() != m.rows() || dst.cols() != m.cols())
      throw IncompatibilityError("checkpoint tensor '" + name +
                                 "' has mismatched shape");
    dst = m;
  }
  params.version = ck.trainer.version;
  return params;
}

}  // namespace nesyrl::cli
