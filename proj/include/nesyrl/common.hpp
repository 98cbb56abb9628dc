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

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nesyrl {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;

/// Shape or width disagreement between operands.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid run or model configuration (maps to CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Entity or predicate id outside the vocabulary.
struct VocabularyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an API precondition.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A bounded resource (state-space cap) was exceeded (CLI exit code 4).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checkpoint/environment mismatch (CLI exit code 3).
struct IncompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Distribution helpers are hand-rolled so the
/// produced sequence depends only on the mt19937_64 engine, not on the
/// standard library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw ContractError("uniform_int: n must be positive");
    return static_cast<int>(uniform01() * n);
  }

  /// Derive an independent stream; depends only on the two seeds.
  static Rng stream(std::uint64_t master, std::uint64_t id) {
    return Rng(splitmix64(master ^ splitmix64(id + 0x51ed270b)));
  }

  std::string serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void deserialize(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
    if (!is) throw std::runtime_error("Rng: bad serialized state");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nesyrl
