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

#include <algorithm>
#include <utility>
#include <vector>

#include "vnhgcn/common.hpp"

namespace vnhgcn {

/// Compressed sparse row matrix. `row_ptr` has rows+1 monotone entries and
/// the column indices of each row are sorted, unique and in [0, cols).
template <typename Scalar>
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_ptr{0};
  std::vector<Index> col_idx;
  std::vector<Scalar> values;

  CsrMatrix() = default;
  CsrMatrix(Index r, Index c) : rows(r), cols(c), row_ptr(static_cast<std::size_t>(r) + 1, 0) {}

  Index nnz() const { return static_cast<Index>(col_idx.size()); }
  Index row_begin(Index i) const { return row_ptr[static_cast<std::size_t>(i)]; }
  Index row_end(Index i) const { return row_ptr[static_cast<std::size_t>(i) + 1]; }
  Index degree(Index i) const { return row_end(i) - row_begin(i); }

  MatrixX<Scalar> to_dense() const {
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index p = row_begin(i); p < row_end(i); ++p) out(i, col_idx[p]) = values[p];
    return out;
  }

  bool operator==(const CsrMatrix&) const = default;
};

/// Builds a CSR matrix from (row, col) coordinates with unit values.
/// Duplicate coordinates collapse to a single entry.
template <typename Scalar>
CsrMatrix<Scalar> csr_from_pairs(Index rows, Index cols, std::vector<std::pair<Index, Index>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  CsrMatrix<Scalar> out(rows, cols);
  out.col_idx.reserve(pairs.size());
  out.values.assign(pairs.size(), Scalar(1));
  for (const auto& [r, c] : pairs) {
    ++out.row_ptr[static_cast<std::size_t>(r) + 1];
    out.col_idx.push_back(c);
  }
  for (Index i = 0; i < rows; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
  return out;
}

/// Returns the transpose, keeping column indices sorted.
template <typename Scalar>
CsrMatrix<Scalar> transpose(const CsrMatrix<Scalar>& a) {
  CsrMatrix<Scalar> out(a.cols, a.rows);
  out.col_idx.resize(a.col_idx.size());
  out.values.resize(a.values.size());
  for (Index c : a.col_idx) ++out.row_ptr[static_cast<std::size_t>(c) + 1];
  for (Index i = 0; i < out.rows; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
  std::vector<Index> cursor(out.row_ptr.begin(), out.row_ptr.end() - 1);
  for (Index i = 0; i < a.rows; ++i) {
    for (Index p = a.row_begin(i); p < a.row_end(i); ++p) {
      Index dst = cursor[a.col_idx[p]]++;
      out.col_idx[dst] = i;
      out.values[dst] = a.values[p];
    }
  }
  return out;
}

/// Scales every nonempty row to sum to one (D^-1 A). Empty rows stay empty.
template <typename Scalar>
CsrMatrix<Scalar> row_normalized(CsrMatrix<Scalar> a) {
  for (Index i = 0; i < a.rows; ++i) {
    Scalar sum(0);
    for (Index p = a.row_begin(i); p < a.row_end(i); ++p) sum += a.values[p];
    if (sum == Scalar(0)) continue;
    for (Index p = a.row_begin(i); p < a.row_end(i); ++p) a.values[p] /= sum;
  }
  return a;
}

/// out = a * x. Each output row is accumulated in CSR order, so the result
/// is independent of every input row the sparse row does not reference.
template <typename Scalar, typename Derived>
MatrixX<Scalar> spmm(const CsrMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& x) {
  if (a.cols != x.rows())
    throw ShapeError("spmm: adjacency " + shape_str(a.rows, a.cols) + " times " + shape_str(x));
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(a.rows, x.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index p = a.row_begin(i); p < a.row_end(i); ++p) out.row(i) += a.values[p] * x.row(a.col_idx[p]);
  return out;
}

/// out = a^T * g, the adjoint of spmm with respect to x.
template <typename Scalar, typename Derived>
MatrixX<Scalar> spmm_transposed(const CsrMatrix<Scalar>& a, const Eigen::MatrixBase<Derived>& g) {
  if (a.rows != g.rows())
    throw ShapeError("spmm_transposed: adjacency " + shape_str(a.rows, a.cols) + " vs " + shape_str(g));
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(a.cols, g.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index p = a.row_begin(i); p < a.row_end(i); ++p) out.row(a.col_idx[p]) += a.values[p] * g.row(i);
  return out;
}

}  // namespace vnhgcn
