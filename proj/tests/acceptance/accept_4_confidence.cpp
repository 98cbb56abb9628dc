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

// Criterion 4: exhaustive chain confidences sum to 1 +- 1e-9 for random
// attention weights, over 100 seeded trials.

#include <cmath>

#include "acceptance_util.hpp"
#include "nesyrl/rules.hpp"

using namespace nesyrl;

int main() {
  acceptance::Criterion crit(4, "confidence conservation");
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    int T = 1 + rng.uniform_int(4);
    int N = 2 + rng.uniform_int(4);
    reasoning::AttentionWeights w;
    w.s_phi = Matrix::Zero(T, N);
    for (int t = 0; t < T; ++t) {
      double sum = 0;
      for (int k = 0; k < N; ++k) {
        w.s_phi(t, k) = rng.uniform(0.001, 1.0);
        sum += w.s_phi(t, k);
      }
      w.s_phi.row(t) /= sum;
    }
    w.s_psi = RowVector::Zero(T);
    double sum = 0;
    for (int t = 0; t < T; ++t) {
      w.s_psi(t) = rng.uniform(0.001, 1.0);
      sum += w.s_psi(t);
    }
    w.s_psi /= sum;

    auto chains = rules::chain_confidences(w);
    double total = 0.0;
    for (const auto& c : chains) total += c.confidence;
    char msg[96];
    std::snprintf(msg, sizeof(msg),
                  "trial %d (T=%d N=%d): confidence sum %.12f", trial, T, N,
                  total);
    crit.check(std::abs(total - 1.0) < 1e-9, msg);
  }
  return crit.finish();
}
