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

#include "nesyrl/rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nesyrl::rules {

namespace {

const char* kArrow = "←";  // left arrow
const char* kAnd = "∧";    // logical and

bool body_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void sort_by_confidence(std::vector<ChainConfidence>& chains) {
  std::sort(chains.begin(), chains.end(),
            [](const ChainConfidence& a, const ChainConfidence& b) {
              if (a.confidence != b.confidence)
                return a.confidence > b.confidence;
              return body_less(a.body, b.body);
            });
}

}  // namespace

std::vector<ChainConfidence> chain_confidences(
    const AttentionWeights& weights, size_t exhaustive_limit,
    int beam_width) {
  weights.validate();
  int T = weights.steps();
  int N = weights.num_predicates();

  // Total chain count, capped to decide the strategy without overflow.
  double total = 0.0;
  double pow_n = 1.0;
  for (int l = 1; l <= T; ++l) {
    pow_n *= N;
    total += pow_n;
    if (total > 2.0 * static_cast<double>(exhaustive_limit)) break;
  }

  std::vector<ChainConfidence> out;
  if (total <= static_cast<double>(exhaustive_limit)) {
    for (int len = 1; len <= T; ++len) {
      std::vector<int> body(len, 0);
      for (;;) {
        double prod = 1.0;
        for (int t = 0; t < len; ++t) prod *= weights.s_phi(t, body[t]);
        out.push_back({body, weights.s_psi(len - 1) * prod});
        int t = len - 1;
        while (t >= 0 && ++body[t] == N) body[t--] = 0;
        if (t < 0) break;
      }
    }
  } else {
    // Beam per length: keep the best prefixes by step-product; the psi
    // factor is constant within a length so the order is preserved.
    struct Partial {
      std::vector<int> body;
      double prod;
    };
    std::vector<Partial> beam = {{{}, 1.0}};
    for (int len = 1; len <= T; ++len) {
      std::vector<Partial> grown;
      grown.reserve(beam.size() * N);
      for (const Partial& p : beam) {
        for (int k = 0; k < N; ++k) {
          Partial q = p;
          q.body.push_back(k);
          q.prod *= weights.s_phi(len - 1, k);
          grown.push_back(std::move(q));
        }
      }
      std::sort(grown.begin(), grown.end(),
                [](const Partial& a, const Partial& b) {
                  if (a.prod != b.prod) return a.prod > b.prod;
                  return a.body < b.body;
                });
      if (grown.size() > static_cast<size_t>(beam_width))
        grown.resize(beam_width);
      for (const Partial& p : grown)
        out.push_back({p.body, weights.s_psi(len - 1) * p.prod});
      beam = std::move(grown);
    }
  }
  sort_by_confidence(out);
  return out;
}

AttentionWeights force_one_hot(const AttentionWeights& weights) {
  AttentionWeights out = weights;
  for (Eigen::Index t = 0; t < out.s_phi.rows(); ++t) {
    Eigen::Index best;
    out.s_phi.row(t).maxCoeff(&best);
    out.s_phi.row(t).setZero();
    out.s_phi(t, best) = 1.0;
  }
  Eigen::Index best;
  out.s_psi.maxCoeff(&best);
  out.s_psi.setZero();
  out.s_psi(best) = 1.0;
  return out;
}

std::vector<ChainRule> aggregate(
    std::span<const std::vector<ChainConfidence>> per_state, int head) {
  if (per_state.empty()) throw ContractError("aggregate: no states");
  std::map<std::vector<int>, double> sums;
  for (const auto& chains : per_state)
    for (const ChainConfidence& c : chains) sums[c.body] += c.confidence;
  int support = static_cast<int>(per_state.size());
  std::vector<ChainRule> out;
  out.reserve(sums.size());
  for (auto& [body, sum] : sums) {
    ChainRule r;
    r.body = body;
    r.head = head;
    r.confidence = sum / support;
    r.support = support;
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const ChainRule& a,
                                       const ChainRule& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return body_less(a.body, b.body);
  });
  return out;
}

namespace {

/// Variable names along the chain: X, Z1, Z2, ...; diagonal predicates stay
/// on the current variable.
std::vector<std::pair<std::string, std::string>> body_variables(
    const std::vector<int>& body, const Vocabulary& vocab) {
  std::vector<std::pair<std::string, std::string>> args;
  std::string cur = "X";
  int next_id = 1;
  for (int p : body) {
    if (vocab.predicate(p).diagonal) {
      args.emplace_back(cur, cur);
    } else {
      std::string next = "Z" + std::to_string(next_id++);
      args.emplace_back(cur, next);
      cur = next;
    }
  }
  args.emplace_back("X", cur);  // head arguments appended last
  return args;
}

}  // namespace

std::string render(const ChainRule& rule, const Vocabulary& vocab) {
  if (rule.body.empty()) throw ContractError("render: empty body");
  auto args = body_variables(rule.body, vocab);
  std::string out = vocab.predicate(rule.head).name + "(" + args.back().first +
                    "," + args.back().second + ") " + kArrow + " ";
  for (size_t i = 0; i < rule.body.size(); ++i) {
    if (i) out += std::string(" ") + kAnd + " ";
    out += vocab.predicate(rule.body[i]).name + "(" + args[i].first + "," +
           args[i].second + ")";
  }
  return out;
}

namespace {

struct TextAtom {
  std::string pred, a, b;
};

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

TextAtom parse_text_atom(const std::string& text) {
  size_t lp = text.find('(');
  size_t comma = text.find(',', lp == std::string::npos ? 0 : lp);
  size_t rp = text.rfind(')');
  if (lp == std::string::npos || comma == std::string::npos ||
      rp == std::string::npos || !(lp < comma && comma < rp))
    throw ClauseParseError("malformed atom: " + text);
  return {strip(text.substr(0, lp)), strip(text.substr(lp + 1, comma - lp - 1)),
          strip(text.substr(comma + 1, rp - comma - 1))};
}

std::vector<std::string> split_on(const std::string& text,
                                  const std::vector<std::string>& seps) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t best = std::string::npos;
    size_t best_len = 0;
    for (const std::string& sep : seps) {
      size_t p = text.find(sep, pos);
      if (p != std::string::npos && (best == std::string::npos || p < best)) {
        best = p;
        best_len = sep.size();
      }
    }
    if (best == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, best - pos));
    pos = best + best_len;
  }
  return parts;
}

}  // namespace

ChainRule parse_clause(const std::string& text, const Vocabulary& vocab) {
  auto halves = split_on(text, {kArrow, "<-"});
  if (halves.size() != 2)
    throw ClauseParseError("clause needs exactly one arrow: " + text);
  TextAtom head = parse_text_atom(strip(halves[0]));
  std::vector<TextAtom> body;
  for (const std::string& part : split_on(halves[1], {kAnd, "&"}))
    body.push_back(parse_text_atom(strip(part)));
  if (body.empty()) throw ClauseParseError("clause has an empty body");

  ChainRule rule;
  rule.head = vocab.predicate_id(head.pred);
  if (!vocab.predicate(rule.head).action)
    throw ClauseParseError("head predicate must be an action: " + head.pred);

  std::string cur = "X";
  int next_id = 1;
  for (const TextAtom& atom : body) {
    int pid = vocab.predicate_id(atom.pred);
    if (vocab.predicate(pid).diagonal) {
      if (atom.a != cur || atom.b != cur)
        throw ClauseParseError("diagonal atom must repeat variable " + cur +
                               ": " + atom.pred);
    } else {
      std::string expect = "Z" + std::to_string(next_id);
      if (atom.a != cur || atom.b != expect)
        throw ClauseParseError("atom breaks the chain (expected " + cur +
                               "," + expect + "): " + atom.pred);
      cur = expect;
      ++next_id;
    }
    rule.body.push_back(pid);
  }
  if (head.a != "X" || head.b != cur)
    throw ClauseParseError("head arguments must be (X," + cur + ")");
  return rule;
}

std::optional<std::vector<int>> ground_chain(const ChainRule& rule,
                                             const SymbolicState& state,
                                             const Matrix& kappa,
                                             const Vocabulary& vocab) {
  if (rule.body.empty()) throw ContractError("ground_chain: empty body");
  int cap = state.capacity();
  std::vector<int> best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<int> binding;

  std::function<void(size_t, int)> walk = [&](size_t depth, int cur) {
    if (depth == rule.body.size()) {
      double s = kappa(binding.front(), cur);
      if (s > best_score) {
        best_score = s;
        best = binding;
      }
      return;
    }
    const Matrix& m = state.mats[rule.body[depth]];
    if (vocab.predicate(rule.body[depth]).diagonal) {
      // Diagonal atom: must hold at cur and the chain stays in place.
      if (m(cur, cur) == 1.0) walk(depth + 1, cur);
      return;
    }
    for (int next = 0; next < cap; ++next) {
      if (m(cur, next) == 1.0) {
        binding.push_back(next);
        walk(depth + 1, next);
        binding.pop_back();
      }
    }
  };

  for (int x = 0; x < cap; ++x) {
    binding = {x};
    walk(0, x);
  }
  if (best.empty()) return std::nullopt;
  return best;
}

std::string render_grounded(const ChainRule& rule,
                            const std::vector<int>& binding,
                            const Vocabulary& vocab) {
  if (rule.body.empty()) throw ContractError("render_grounded: empty body");
  std::string out;
  size_t pos = 0;
  int cur = binding.at(0);
  std::string bodytext;
  for (size_t i = 0; i < rule.body.size(); ++i) {
    const auto& pred = vocab.predicate(rule.body[i]);
    int next = cur;
    if (!pred.diagonal) {
      ++pos;
      next = binding.at(pos);
    }
    if (i) bodytext += std::string(" ") + "∧" + " ";
    bodytext += pred.name + "(" + vocab.entity_name(cur) + "," +
                vocab.entity_name(next) + ")";
    cur = next;
  }
  out = vocab.predicate(rule.head).name + "(" +
        vocab.entity_name(binding.at(0)) + "," + vocab.entity_name(cur) +
        ") ← " + bodytext;
  return out;
}

}  // namespace nesyrl::rules
