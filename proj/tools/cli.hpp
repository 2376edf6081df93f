// Copyright 2026 The vnhgcn Authors.
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

#include <iosfwd>
#include <string>

#include "vnhgcn/train.hpp"

namespace vnhgcn::cli {

/// Everything a run needs; serialized verbatim into the run directory.
struct RunConfig {
  TrainConfig train;
  std::string data;
  std::string out = "run";
  double ratio = 0.2;
};

std::string to_json(const RunConfig& cfg);
/// Fills `cfg` from a JSON object; unknown keys are a ConfigError.
void merge_json(RunConfig& cfg, const std::string& text, const std::string& origin);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 ok, 1 config, 2 data, 3 numeric failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vnhgcn::cli
