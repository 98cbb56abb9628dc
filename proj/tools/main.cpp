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

#include <iostream>
#include <string>
#include <vector>

#include "nesyrl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << "usage: nesyrl <train|eval|oracle|rules|plot> [options]\n"
              << "  train  --config FILE [--key=value ...]\n"
              << "  eval   --checkpoint FILE [--episodes N] [--key=value ...]\n"
              << "  oracle [--config FILE] [--key=value ...]\n"
              << "  rules  --checkpoint FILE [--states N] [--topk K]"
                 " [--force-onehot] [--ground] [--key=value ...]\n"
              << "  plot   --out FILE LOG [LOG ...]\n";
    return nesyrl::cli::kErrConfig;
  }
  return nesyrl::cli::run_cli(args, std::cout, std::cerr);
}
