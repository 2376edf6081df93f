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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "vnhgcn/common.hpp"
#include "vnhgcn/sparse.hpp"

namespace vnhgcn::ad {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode gradient tape over a closed set of matrix primitives.
///
/// Nodes are appended in evaluation order, so the recording is already
/// topologically sorted; backward() walks it once in reverse. Only nodes
/// that (transitively) depend on a parameter carry a backward closure.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix& upstream)>;

  Var constant(Matrix value);
  Var parameter(Matrix value);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient accumulated by backward(); zero-filled if the node received none.
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates.
  void backward(Var root);
  /// Propagates an arbitrary upstream gradient from `out`.
  void backward(Var out, const Matrix& upstream);

  /// Appends a node. `fn` is dropped when none of `inputs` requires a gradient.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn);
  void accumulate(Var v, const Matrix& g);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

/// a * b.
Var matmul(Tape& t, Var a, Var b);
/// adj * x; the adjacency is a constant and receives no gradient.
Var spmm(Tape& t, std::shared_ptr<const CsrMatrix<double>> adj, Var x);
Var tanh(Tape& t, Var x);
Var relu(Tape& t, Var x);
/// Elementwise sum of equally shaped operands.
Var add(Tape& t, std::span<const Var> xs);
/// Multiplies row i of x by s(i); s is a column with x.rows() entries.
Var row_scale(Tape& t, Var x, Var s);
/// Softmax across columns, row by row: out[k](i) = exp(e_k(i)) / sum_j exp(e_j(i)),
/// evaluated with the row maximum subtracted.
std::vector<Var> grouped_row_softmax(Tape& t, std::span<const Var> logit_columns);
/// Mean over `mask` rows of -log softmax(logits)[label]; a 1x1 node.
Var softmax_cross_entropy(Tape& t, Var logits, std::span<const int> labels, std::span<const Index> mask);
/// Inverted dropout. Identity when !training or rate == 0.
Var dropout(Tape& t, Var x, double rate, std::uint64_t seed, bool training);

/// Plain-value helpers shared by the tape primitives and inference code.
Matrix row_softmax(const Matrix& logits);
Matrix dropout_mask(Index rows, Index cols, double rate, std::uint64_t seed);

}  // namespace vnhgcn::ad
