// Copyright 2026 The measlearn Authors
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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace measlearn {

using Complex = std::complex<double>;
using Index = std::ptrdiff_t;

/// Dense complex matrix in double precision with a fixed row-major layout.
/// All modules build on this one carrier type; operations are pure values.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(Index rows, Index cols);
  ComplexMatrix(Index rows, Index cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(Index n);
  static ComplexMatrix zero(Index rows, Index cols);
  static ComplexMatrix diagonal(const std::vector<Complex>& d);
  static ComplexMatrix column(const std::vector<Complex>& v);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(Index r, Index c) { return data_[r * cols_ + c]; }
  const Complex& operator()(Index r, Index c) const { return data_[r * cols_ + c]; }
  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix adjoint() const;

  Complex trace() const;
  double frobenius_norm() const;
  /// Largest entrywise absolute value.
  double max_abs() const;
  /// max |X - X^dagger| over entries.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-10) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);
ComplexMatrix operator*(const ComplexMatrix& a, Complex s);

/// Kronecker product; the left factor is the most significant index block.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct SubsystemFactor {
  std::string label;
  Index dim = 0;
};

/// Ordered tensor-factor bookkeeping for a square matrix: every operation
/// that touches a subsystem names it by label, never by inferred size.
/// Factor 0 is the most significant index digit (leftmost kron factor).
class SubsystemShape {
 public:
  SubsystemShape() = default;
  SubsystemShape(std::initializer_list<SubsystemFactor> factors);
  explicit SubsystemShape(std::vector<SubsystemFactor> factors);

  void append(const std::string& label, Index dim);

  Index total_dim() const;
  std::size_t factor_count() const { return factors_.size(); }
  const SubsystemFactor& factor(std::size_t i) const { return factors_[i]; }
  const std::vector<SubsystemFactor>& factors() const { return factors_; }

  bool has_label(const std::string& label) const;
  /// Factor position of `label`; throws std::invalid_argument if unknown.
  std::size_t position(const std::string& label) const;
  /// Sub-shape of the named labels, in this shape's factor order.
  SubsystemShape subshape(const std::vector<std::string>& labels) const;
  /// Labels not contained in `labels`, in this shape's factor order.
  std::vector<std::string> complement(const std::vector<std::string>& labels) const;
  std::vector<std::string> labels() const;

  /// Column stride of each factor in the row-major linear index.
  std::vector<Index> strides() const;

 private:
  std::vector<SubsystemFactor> factors_;
};

/// Linear offsets contributed by the factors at `positions` as their digits
/// run through all combinations (row-major order within the subset).
std::vector<Index> subset_offsets(const SubsystemShape& shape,
                                  const std::vector<std::size_t>& positions);

/// Trace out every factor not listed in `keep`; preserves the total trace.
ComplexMatrix partial_trace(const ComplexMatrix& x, const SubsystemShape& shape,
                            const std::vector<std::string>& keep);

/// Transpose a single tensor factor in place; an involution.
ComplexMatrix partial_transpose(const ComplexMatrix& x, const SubsystemShape& shape,
                                const std::string& subsystem);

/// Reorder tensor factors; `new_order` must be a permutation of the labels.
ComplexMatrix reorder_subsystems(const ComplexMatrix& x, const SubsystemShape& shape,
                                 const std::vector<std::string>& new_order);

/// |X>> = sum_i (X|i>) (x) |i>, i running over columns. For row-major storage
/// this is the flattening of X into a column vector of length rows*cols.
ComplexMatrix vectorize(const ComplexMatrix& x);

struct EighResult {
  std::vector<double> eigenvalues;  // sorted descending
  ComplexMatrix eigenvectors;       // eigenvector j in column j
};

/// Hermitian eigendecomposition, x = V diag(w) V^dagger.
/// Throws std::invalid_argument when x is not Hermitian within `tol`.
EighResult eigh(const ComplexMatrix& x, double tol = 1e-10);

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix. Eigenvalues below
/// rank_tol * lambda_max are treated as zero.
ComplexMatrix pinv(const ComplexMatrix& g, double rank_tol = 1e-10);

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double spectral_norm_hermitian(const ComplexMatrix& x);

/// Numerically symmetrize: (x + x^dagger)/2.
ComplexMatrix hermitian_part(const ComplexMatrix& x);

/// Dump format {rows, cols, re: [...], im: [...]} used by the CLI.
std::string matrix_to_json_text(const ComplexMatrix& x);
ComplexMatrix matrix_from_json_text(const std::string& text);

}  // namespace measlearn
