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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vnhgcn/model.hpp"

namespace vnhgcn {

/// Flat container of named double tensors.
///
/// Layout: a text manifest followed by raw little-endian IEEE-754 doubles.
///
///     VNHGCN-CHECKPOINT 1
///     meta <key> <value>
///     tensor <name> <rows> <cols> <byte offset into data section>
///     end <data section bytes>
///     <data section>
///
/// Keys and names contain no whitespace; values run to end of line.
struct Checkpoint {
  static constexpr int kVersion = 1;

  struct Tensor {
    std::string name;
    Matrix value;
  };
  std::map<std::string, std::string> meta;
  std::vector<Tensor> tensors;

  const std::string& require(const std::string& key) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Packs params (and their dimension plan) into a checkpoint.
Checkpoint to_checkpoint(const ModelParams& params, const NetworkSchema& schema);

/// Rebuilds params for `schema` from a checkpoint written by to_checkpoint.
/// Throws ShapeError listing every missing or mis-shaped tensor.
ModelParams params_from_checkpoint(const Checkpoint& ckpt, const NetworkSchema& schema);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace vnhgcn
