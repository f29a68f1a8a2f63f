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

#include "measlearn/linalg.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace measlearn {

namespace {

using EigenRowMajor =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> eigen_view(const ComplexMatrix& m) {
  return Eigen::Map<const EigenRowMajor>(m.data(), m.rows(), m.cols());
}

Eigen::Map<EigenRowMajor> eigen_view(ComplexMatrix& m) {
  return Eigen::Map<EigenRowMajor>(m.data(), m.rows(), m.cols());
}

void require_same_size(const ComplexMatrix& a, const ComplexMatrix& b,
                       const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

void require_square_shape(const ComplexMatrix& x, const SubsystemShape& shape) {
  if (!x.is_square()) {
    throw std::invalid_argument("subsystem operation requires a square matrix");
  }
  if (x.rows() != shape.total_dim()) {
    throw std::invalid_argument("matrix dimension does not match subsystem shape");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("matrix dimensions must be nonnegative");
  }
}

ComplexMatrix::ComplexMatrix(Index rows, Index cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (static_cast<Index>(data_.size()) != rows * cols) {
    throw std::invalid_argument("entry count must equal rows * cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = static_cast<Index>(rows.size());
  cols_ = rows_ > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  data_.reserve(static_cast<std::size_t>(rows_ * cols_));
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != cols_) {
      throw std::invalid_argument("ragged initializer list");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(Index n) {
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(Index rows, Index cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
  const Index n = static_cast<Index>(d.size());
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

ComplexMatrix ComplexMatrix::column(const std::vector<Complex>& v) {
  return ComplexMatrix(static_cast<Index>(v.size()), 1, v);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_size(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_size(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (!is_square()) throw std::invalid_argument("trace requires a square matrix");
  Complex t = 0.0;
  for (Index i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  if (!is_square()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (Index r = 0; r < rows_; ++r)
    for (Index c = r; c < cols_; ++c)
      m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  return is_square() && hermiticity_defect() <= tol;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  out += b;
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  out -= b;
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a) { return a * Complex(-1.0); }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("operator*: inner dimensions do not match");
  }
  ComplexMatrix out(a.rows(), b.cols());
  eigen_view(out).noalias() = eigen_view(a) * eigen_view(b);
  return out;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  out *= s;
  return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, Complex s) { return s * a; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0)) continue;
      for (Index k = 0; k < b.rows(); ++k) {
        for (Index l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

SubsystemShape::SubsystemShape(std::initializer_list<SubsystemFactor> factors)
    : SubsystemShape(std::vector<SubsystemFactor>(factors)) {}

SubsystemShape::SubsystemShape(std::vector<SubsystemFactor> factors) {
  for (auto& f : factors) append(f.label, f.dim);
}

void SubsystemShape::append(const std::string& label, Index dim) {
  if (dim <= 0) throw std::invalid_argument("subsystem dimension must be positive");
  if (has_label(label)) {
    throw std::invalid_argument("duplicate subsystem label: " + label);
  }
  factors_.push_back({label, dim});
}

Index SubsystemShape::total_dim() const {
  Index d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

bool SubsystemShape::has_label(const std::string& label) const {
  for (const auto& f : factors_)
    if (f.label == label) return true;
  return false;
}

std::size_t SubsystemShape::position(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return i;
  throw std::invalid_argument("unknown subsystem label: " + label);
}

SubsystemShape SubsystemShape::subshape(const std::vector<std::string>& labels) const {
  std::unordered_set<std::string> wanted(labels.begin(), labels.end());
  for (const auto& l : labels) position(l);  // validate
  SubsystemShape out;
  for (const auto& f : factors_)
    if (wanted.count(f.label)) out.append(f.label, f.dim);
  return out;
}

std::vector<std::string> SubsystemShape::complement(
    const std::vector<std::string>& labels) const {
  std::unordered_set<std::string> drop(labels.begin(), labels.end());
  std::vector<std::string> out;
  for (const auto& f : factors_)
    if (!drop.count(f.label)) out.push_back(f.label);
  return out;
}

std::vector<std::string> SubsystemShape::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

std::vector<Index> SubsystemShape::strides() const {
  std::vector<Index> s(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;) {
    s[i - 1] = s[i] * factors_[i].dim;
  }
  return s;
}

std::vector<Index> subset_offsets(const SubsystemShape& shape,
                                  const std::vector<std::size_t>& positions) {
  const auto strides = shape.strides();
  Index count = 1;
  for (auto p : positions) count *= shape.factor(p).dim;
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<Index> digits(positions.size(), 0);
  for (Index idx = 0; idx < count; ++idx) {
    Index off = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      off += digits[j] * strides[positions[j]];
    }
    out.push_back(off);
    for (std::size_t j = positions.size(); j-- > 0;) {
      if (++digits[j] < shape.factor(positions[j]).dim) break;
      digits[j] = 0;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& x, const SubsystemShape& shape,
                            const std::vector<std::string>& keep) {
  require_square_shape(x, shape);
  std::unordered_set<std::string> kept(keep.begin(), keep.end());
  for (const auto& l : keep) shape.position(l);  // validate labels
  std::vector<std::size_t> keep_pos, trace_pos;
  for (std::size_t i = 0; i < shape.factor_count(); ++i) {
    (kept.count(shape.factor(i).label) ? keep_pos : trace_pos).push_back(i);
  }
  const auto keep_off = subset_offsets(shape, keep_pos);
  const auto trace_off = subset_offsets(shape, trace_pos);
  const Index k = static_cast<Index>(keep_off.size());
  ComplexMatrix out(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      Complex s = 0.0;
      for (const Index t : trace_off) {
        s += x(keep_off[static_cast<std::size_t>(r)] + t,
               keep_off[static_cast<std::size_t>(c)] + t);
      }
      out(r, c) = s;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& x, const SubsystemShape& shape,
                                const std::string& subsystem) {
  require_square_shape(x, shape);
  const std::size_t p = shape.position(subsystem);
  const Index stride = shape.strides()[p];
  const Index dim = shape.factor(p).dim;
  const Index n = x.rows();
  ComplexMatrix out(n, n);
  for (Index r = 0; r < n; ++r) {
    const Index dr = (r / stride) % dim;
    for (Index c = 0; c < n; ++c) {
      const Index dc = (c / stride) % dim;
      out(r + (dc - dr) * stride, c + (dr - dc) * stride) = x(r, c);
    }
  }
  return out;
}

ComplexMatrix reorder_subsystems(const ComplexMatrix& x, const SubsystemShape& shape,
                                 const std::vector<std::string>& new_order) {
  require_square_shape(x, shape);
  if (new_order.size() != shape.factor_count()) {
    throw std::invalid_argument("reorder_subsystems: label count mismatch");
  }
  SubsystemShape target;
  for (const auto& l : new_order) target.append(l, shape.factor(shape.position(l)).dim);

  const auto old_strides = shape.strides();
  const auto new_strides = target.strides();
  std::vector<std::size_t> old_pos(new_order.size());
  for (std::size_t j = 0; j < new_order.size(); ++j) {
    old_pos[j] = shape.position(new_order[j]);
  }
  const Index n = x.rows();
  std::vector<Index> map(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index v = 0;
    for (std::size_t j = 0; j < new_order.size(); ++j) {
      const std::size_t p = old_pos[j];
      v += ((i / old_strides[p]) % shape.factor(p).dim) * new_strides[j];
    }
    map[static_cast<std::size_t>(i)] = v;
  }
  ComplexMatrix out(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      out(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]) = x(r, c);
  return out;
}

ComplexMatrix vectorize(const ComplexMatrix& x) {
  std::vector<Complex> v(x.data(), x.data() + x.size());
  return ComplexMatrix(x.size(), 1, std::move(v));
}

EighResult eigh(const ComplexMatrix& x, double tol) {
  if (!x.is_square()) throw std::invalid_argument("eigh requires a square matrix");
  if (x.hermiticity_defect() > tol) {
    throw std::invalid_argument("eigh requires a Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(eigen_view(x));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigh failed to converge");
  }
  const Index n = x.rows();
  EighResult out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors = ComplexMatrix(n, n);
  // Eigen sorts ascending; flip to descending.
  for (Index j = 0; j < n; ++j) {
    out.eigenvalues[static_cast<std::size_t>(j)] = solver.eigenvalues()(n - 1 - j);
    for (Index i = 0; i < n; ++i) {
      out.eigenvectors(i, j) = solver.eigenvectors()(i, n - 1 - j);
    }
  }
  return out;
}

ComplexMatrix pinv(const ComplexMatrix& g, double rank_tol) {
  const EighResult d = eigh(g, 1e-8);
  const Index n = g.rows();
  double lmax = 0.0;
  for (double w : d.eigenvalues) lmax = std::max(lmax, std::abs(w));
  const double cut = rank_tol * std::max(lmax, 1e-300);
  ComplexMatrix out(n, n);
  for (Index k = 0; k < n; ++k) {
    const double w = d.eigenvalues[static_cast<std::size_t>(k)];
    if (std::abs(w) <= cut) continue;
    const double winv = 1.0 / w;
    for (Index i = 0; i < n; ++i) {
      const Complex vik = d.eigenvectors(i, k);
      if (vik == Complex(0.0)) continue;
      for (Index j = 0; j < n; ++j) {
        out(i, j) += winv * vik * std::conj(d.eigenvectors(j, k));
      }
    }
  }
  return out;
}

double spectral_norm_hermitian(const ComplexMatrix& x) {
  const EighResult d = eigh(x, 1e-8);
  double m = 0.0;
  for (double w : d.eigenvalues) m = std::max(m, std::abs(w));
  return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& x) {
  ComplexMatrix out = x;
  out += x.adjoint();
  out *= 0.5;
  return out;
}

std::string matrix_to_json_text(const ComplexMatrix& x) {
  nlohmann::json j;
  j["rows"] = x.rows();
  j["cols"] = x.cols();
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(x.size()));
  im.reserve(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) {
    re.push_back(x.data()[i].real());
    im.push_back(x.data()[i].imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

ComplexMatrix matrix_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (static_cast<Index>(re.size()) != rows * cols ||
      static_cast<Index>(im.size()) != rows * cols) {
    throw std::invalid_argument("matrix json: entry count mismatch");
  }
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < rows * cols; ++i) {
    out.data()[i] = Complex(re[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace measlearn
