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

#include "nesyrl/symbolic.hpp"

#include <algorithm>

namespace nesyrl::symbolic {

Vocabulary::Vocabulary(std::vector<std::string> entities,
                       std::vector<Predicate> preds)
    : entities_(std::move(entities)), predicates_(std::move(preds)) {
  if (entities_.empty()) throw ConfigError("Vocabulary: no entities");
  if (predicates_.empty()) throw ConfigError("Vocabulary: no predicates");
  std::set<std::string> seen;
  for (const auto& e : entities_)
    if (!seen.insert(e).second)
      throw ConfigError("Vocabulary: duplicate entity " + e);
  seen.clear();
  for (const auto& p : predicates_) {
    if (!seen.insert(p.name).second)
      throw ConfigError("Vocabulary: duplicate predicate " + p.name);
    if (p.action) ++n_action_;
  }
}

int Vocabulary::entity_id(const std::string& name) const {
  for (size_t i = 0; i < entities_.size(); ++i)
    if (entities_[i] == name) return static_cast<int>(i);
  throw VocabularyError("unknown entity: " + name);
}

int Vocabulary::predicate_id(const std::string& name) const {
  for (size_t i = 0; i < predicates_.size(); ++i)
    if (predicates_[i].name == name) return static_cast<int>(i);
  throw VocabularyError("unknown predicate: " + name);
}

const std::string& Vocabulary::entity_name(int id) const {
  check_entity(id);
  return entities_[id];
}

const Predicate& Vocabulary::predicate(int id) const {
  check_predicate(id);
  return predicates_[id];
}

std::vector<int> Vocabulary::action_predicate_ids() const {
  std::vector<int> out;
  for (int i = 0; i < num_predicates(); ++i)
    if (predicates_[i].action) out.push_back(i);
  return out;
}

void Vocabulary::check_entity(int id) const {
  if (id < 0 || id >= capacity())
    throw VocabularyError("entity id out of range: " + std::to_string(id));
}

void Vocabulary::check_predicate(int id) const {
  if (id < 0 || id >= num_predicates())
    throw VocabularyError("predicate id out of range: " + std::to_string(id));
}

bool Vocabulary::operator==(const Vocabulary& o) const {
  if (entities_ != o.entities_) return false;
  if (predicates_.size() != o.predicates_.size()) return false;
  for (size_t i = 0; i < predicates_.size(); ++i) {
    const Predicate &a = predicates_[i], &b = o.predicates_[i];
    if (a.name != b.name || a.action != b.action || a.diagonal != b.diagonal)
      return false;
  }
  return true;
}

std::vector<std::uint64_t> SymbolicState::bit_key() const {
  std::vector<std::uint64_t> key;
  std::uint64_t word = 0;
  int bit = 0;
  for (const Matrix& m : mats) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) word |= (1ull << bit);
        if (++bit == 64) {
          key.push_back(word);
          word = 0;
          bit = 0;
        }
      }
    }
  }
  if (bit != 0) key.push_back(word);
  return key;
}

SymbolicState zero_state(const Vocabulary& vocab) {
  SymbolicState s;
  s.mats.assign(vocab.num_predicates(),
                Matrix::Zero(vocab.capacity(), vocab.capacity()));
  return s;
}

SymbolicState encode(const std::vector<GroundAtom>& atoms,
                     const Vocabulary& vocab) {
  SymbolicState s = zero_state(vocab);
  for (const GroundAtom& a : atoms) {
    vocab.check_predicate(a.predicate);
    vocab.check_entity(a.subject);
    vocab.check_entity(a.object);
    s.mats[a.predicate](a.subject, a.object) = 1.0;
  }
  return s;
}

std::vector<GroundAtom> decode(const SymbolicState& state) {
  std::vector<GroundAtom> atoms;
  for (int k = 0; k < state.num_predicates(); ++k) {
    const Matrix& m = state.mats[k];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0.0)
          atoms.push_back({k, static_cast<int>(i), static_cast<int>(j)});
  }
  return atoms;
}

FlatState flatten(const SymbolicState& state) {
  int n = state.num_predicates();
  int cap = state.capacity();
  FlatState f;
  f.m = Matrix::Zero(n, static_cast<Eigen::Index>(cap) * cap);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < cap; ++i)
      for (int j = 0; j < cap; ++j)
        f.m(k, i * cap + j) = state.mats[k](i, j);
  return f;
}

SymbolicState unflatten(const FlatState& flat, const Vocabulary& vocab) {
  int cap = vocab.capacity();
  if (flat.m.rows() != vocab.num_predicates() ||
      flat.m.cols() != static_cast<Eigen::Index>(cap) * cap)
    throw DimensionError("unflatten: shape does not match vocabulary");
  SymbolicState s = zero_state(vocab);
  for (int k = 0; k < vocab.num_predicates(); ++k)
    for (int i = 0; i < cap; ++i)
      for (int j = 0; j < cap; ++j) s.mats[k](i, j) = flat.m(k, i * cap + j);
  return s;
}

Vector one_hot(int entity_id, const Vocabulary& vocab) {
  vocab.check_entity(entity_id);
  Vector v = Vector::Zero(vocab.capacity());
  v(entity_id) = 1.0;
  return v;
}

std::string format_atom(const GroundAtom& atom, const Vocabulary& vocab) {
  return vocab.predicate(atom.predicate).name + "(" +
         vocab.entity_name(atom.subject) + "," +
         vocab.entity_name(atom.object) + ")";
}

namespace {

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

GroundAtom parse_atom(const std::string& text, const Vocabulary& vocab) {
  size_t lp = text.find('(');
  size_t comma = text.find(',', lp == std::string::npos ? 0 : lp);
  size_t rp = text.rfind(')');
  if (lp == std::string::npos || comma == std::string::npos ||
      rp == std::string::npos || !(lp < comma && comma < rp))
    throw VocabularyError("malformed atom: " + text);
  GroundAtom a;
  a.predicate = vocab.predicate_id(strip(text.substr(0, lp)));
  a.subject = vocab.entity_id(strip(text.substr(lp + 1, comma - lp - 1)));
  a.object = vocab.entity_id(strip(text.substr(comma + 1, rp - comma - 1)));
  return a;
}

}  // namespace nesyrl::symbolic
