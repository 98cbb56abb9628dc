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

#include <string>
#include <utility>
#include <vector>

#include "nesyrl/policy.hpp"
#include "nesyrl/runconfig.hpp"
#include "nesyrl/symbolic.hpp"

namespace nesyrl::cli {

struct TrainerState {
  std::string algorithm = "none";
  long episode = 0;
  long step = 0;
  double epsilon = 0.0;
  long adam_t = 0;
  std::uint64_t version = 0;
};

/// Text checkpoint with full-precision base-ten floats. Load then save is
/// byte-identical.
struct Checkpoint {
  int format_version = 1;
  std::vector<std::pair<std::string, std::string>> config;  // canonical
  symbolic::Vocabulary vocab;
  TrainerState trainer;
  std::string rng_state;  // serialized engine, may be empty
  std::vector<std::pair<std::string, Matrix>> tensors;
  std::vector<std::pair<std::string, Matrix>> moment1;
  std::vector<std::pair<std::string, Matrix>> moment2;
};

std::string checkpoint_to_text(const Checkpoint& ck);
Checkpoint checkpoint_from_text(const std::string& text);

/// Atomic write (temp file + rename) so an interrupted run keeps the last
/// good checkpoint.
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Assemble a checkpoint from live training state.
Checkpoint make_checkpoint(const RunConfig& config,
                           const policy::PolicyParams& params,
                           const TrainerState& trainer,
                           const std::string& rng_state);

/// Rebuild policy parameters (shape from config echo + vocab, values from
/// tensors). Throws IncompatibilityError on mismatches.
policy::PolicyParams params_from_checkpoint(const Checkpoint& ck);

RunConfig config_from_checkpoint(const Checkpoint& ck);

}  // namespace nesyrl::cli
