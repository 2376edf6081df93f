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
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vnhgcn {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row-major dense matrix used for every embedding, weight and gradient.
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Failure categories. The CLI maps each one onto a process exit code.
enum class ErrorCategory { kConfig = 1, kData = 2, kNumeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Invalid hyperparameters, flags or option combinations.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

/// Malformed or inconsistent input data (files, manifests, labels).
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

/// Graph-structure violation: endpoint out of range, broken inverse pairing.
struct StructuralError : Error {
  explicit StructuralError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

/// Operand shapes that do not line up.
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

/// Non-finite loss or gradient during optimization.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

/// Derives an independent stream seed from a root seed and a stream tag
/// (splitmix64 finalizer over the combined value).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag_a, std::uint64_t tag_b) {
  return derive_seed(derive_seed(root, tag_a), tag_b);
}

inline std::string shape_str(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
std::string shape_str(const Eigen::MatrixBase<Derived>& m) {
  return shape_str(m.rows(), m.cols());
}

}  // namespace vnhgcn
