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


#include "vnhgcn/tape.hpp"

#include <cmath>
#include <random>
#include <string>

namespace vnhgcn::ad {

Var Tape::constant(Matrix value) {
  nodes_.push_back({std::move(value), {}, false, false, {}});
  return {nodes_.size() - 1};
}

Var Tape::parameter(Matrix value) {
  nodes_.push_back({std::move(value), {}, false, true, {}});
  return {nodes_.size() - 1};
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  return n.has_grad ? n.grad : Matrix::Zero(n.value.rows(), n.value.cols());
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (Var in : inputs) needs = needs || nodes_[in.id].requires_grad;
  nodes_.push_back({std::move(value), {}, false, needs, needs ? std::move(fn) : BackwardFn{}});
  return {nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (!n.requires_grad) return;
  if (g.rows() != n.value.rows() || g.cols() != n.value.cols())
    throw ShapeError("tape: gradient " + shape_str(g) + " for value " + shape_str(n.value));
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

void Tape::backward(Var root) {
  if (value(root).size() != 1) throw ShapeError("tape: backward() needs a 1x1 root, got " + shape_str(value(root)));
  backward(root, Matrix::Ones(1, 1));
}

void Tape::backward(Var out, const Matrix& upstream) {
  accumulate(out, upstream);
  for (std::size_t i = out.id + 1; i-- > 0;) {
    // accumulate() may write into other nodes; copy before invoking.
    if (!nodes_[i].has_grad || !nodes_[i].backward) continue;
    Matrix g = nodes_[i].grad;
    nodes_[i].backward(*this, g);
  }
}

Var matmul(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (av.cols() != bv.rows()) throw ShapeError("matmul: " + shape_str(av) + " times " + shape_str(bv));
  Matrix out = av * bv;
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * tp.value(b).transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, tp.value(a).transpose() * g);
  });
}

Var spmm(Tape& t, std::shared_ptr<const CsrMatrix<double>> adj, Var x) {
  Matrix out = vnhgcn::spmm(*adj, t.value(x));
  return t.record(std::move(out), {x},
                  [adj, x](Tape& tp, const Matrix& g) { tp.accumulate(x, spmm_transposed(*adj, g)); });
}

Var tanh(Tape& t, Var x) {
  Matrix out = t.value(x).array().tanh().matrix();
  return t.record(std::move(out), {x}, [x](Tape& tp, const Matrix& g) {
    const auto th = tp.value(x).array().tanh();
    tp.accumulate(x, (g.array() * (1.0 - th * th)).matrix());
  });
}

Var relu(Tape& t, Var x) {
  Matrix out = t.value(x).cwiseMax(0.0);
  return t.record(std::move(out), {x}, [x](Tape& tp, const Matrix& g) {
    tp.accumulate(x, (tp.value(x).array() > 0.0).select(g, 0.0).matrix());
  });
}

Var add(Tape& t, std::span<const Var> xs) {
  if (xs.empty()) throw ConfigError("add: no operands");
  Matrix out = t.value(xs[0]);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const Matrix& v = t.value(xs[k]);
    if (v.rows() != out.rows() || v.cols() != out.cols())
      throw ShapeError("add: " + shape_str(out) + " plus " + shape_str(v));
    out += v;
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  return t.record(std::move(out), xs, [inputs](Tape& tp, const Matrix& g) {
    for (Var v : inputs) tp.accumulate(v, g);
  });
}

Var row_scale(Tape& t, Var x, Var s) {
  const Matrix& xv = t.value(x);
  const Matrix& sv = t.value(s);
  if (sv.cols() != 1 || sv.rows() != xv.rows())
    throw ShapeError("row_scale: scale " + shape_str(sv) + " for operand " + shape_str(xv));
  Matrix out = sv.col(0).asDiagonal() * xv;
  return t.record(std::move(out), {x, s}, [x, s](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(x)) tp.accumulate(x, tp.value(s).col(0).asDiagonal() * g);
    if (tp.requires_grad(s)) tp.accumulate(s, g.cwiseProduct(tp.value(x)).rowwise().sum());
  });
}

Matrix row_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - m).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

std::vector<Var> grouped_row_softmax(Tape& t, std::span<const Var> logit_columns) {
  if (logit_columns.empty()) throw ConfigError("grouped_row_softmax: empty group list");
  const Index n = t.value(logit_columns[0]).rows();
  const Index k = static_cast<Index>(logit_columns.size());
  Matrix stacked(n, k);
  for (Index j = 0; j < k; ++j) {
    const Matrix& c = t.value(logit_columns[j]);
    if (c.rows() != n || c.cols() != 1)
      throw ShapeError("grouped_row_softmax: column " + std::to_string(j) + " is " + shape_str(c) + ", expected " +
                       shape_str(n, 1));
    stacked.col(j) = c.col(0);
  }
  Matrix probs = row_softmax(stacked);
  std::vector<Var> inputs(logit_columns.begin(), logit_columns.end());
  Var joint = t.record(probs, logit_columns, [inputs, probs](Tape& tp, const Matrix& g) {
    // d e_k = p_k (g_k - sum_j p_j g_j), row by row.
    const Vector inner = probs.cwiseProduct(g).rowwise().sum();
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const auto jj = static_cast<Index>(j);
      tp.accumulate(inputs[j], probs.col(jj).cwiseProduct(g.col(jj) - inner));
    }
  });
  std::vector<Var> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    out.push_back(t.record(probs.col(j), {joint}, [joint, j, n, k](Tape& tp, const Matrix& g) {
      Matrix full = Matrix::Zero(n, k);
      full.col(j) = g.col(0);
      tp.accumulate(joint, full);
    }));
  }
  return out;
}

Var softmax_cross_entropy(Tape& t, Var logits, std::span<const int> labels, std::span<const Index> mask) {
  if (mask.empty()) throw ConfigError("softmax_cross_entropy: empty mask");
  const Matrix& z = t.value(logits);
  if (static_cast<Index>(labels.size()) != z.rows())
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(z.rows()) + " rows");
  const Matrix probs = row_softmax(z);
  const double inv = 1.0 / static_cast<double>(mask.size());
  double loss = 0.0;
  Matrix dz = Matrix::Zero(z.rows(), z.cols());
  for (Index i : mask) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= z.cols())
      throw DataError("softmax_cross_entropy: label " + std::to_string(y) + " on row " + std::to_string(i) +
                      " outside 0.." + std::to_string(z.cols() - 1));
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    loss += lse - z(i, y);
    dz.row(i) += probs.row(i) * inv;
    dz(i, y) -= inv;
  }
  Matrix out(1, 1);
  out(0, 0) = loss * inv;
  return t.record(std::move(out), {logits},
                  [logits, dz = std::move(dz)](Tape& tp, const Matrix& g) { tp.accumulate(logits, dz * g(0, 0)); });
}

Matrix dropout_mask(Index rows, Index cols, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  Matrix mask(rows, cols);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) mask(i, j) = keep(rng) ? scale : 0.0;
  return mask;
}

Var dropout(Tape& t, Var x, double rate, std::uint64_t seed, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  const Matrix& xv = t.value(x);
  Matrix mask = dropout_mask(xv.rows(), xv.cols(), rate, seed);
  Matrix out = xv.cwiseProduct(mask);
  return t.record(std::move(out), {x},
                  [x, mask = std::move(mask)](Tape& tp, const Matrix& g) { tp.accumulate(x, g.cwiseProduct(mask)); });
}

}  // namespace vnhgcn::ad
