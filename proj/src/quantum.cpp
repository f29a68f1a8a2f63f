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

#include "measlearn/quantum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace measlearn {

VonNeumannMeasurement::VonNeumannMeasurement(ComplexMatrix u, double tol)
    : u_(std::move(u)) {
  if (!u_.is_square() || u_.rows() < 1) {
    throw std::invalid_argument("measurement unitary must be square");
  }
  const ComplexMatrix defect = u_.adjoint() * u_ - ComplexMatrix::identity(u_.rows());
  if (defect.max_abs() > tol) {
    throw std::invalid_argument("measurement matrix is not unitary");
  }
}

ComplexMatrix haar_unitary(Index d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary requires d >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(r, c) = Complex(re, im);
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Divide out the phases of R's diagonal so the factorization is unique.
  for (Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    const Complex phase = a > 0 ? rjj / a : Complex(1.0);
    q.col(j) *= phase;
  }
  ComplexMatrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = q(i, j);
  return out;
}

ComplexMatrix haar_su2(Rng& rng) {
  ComplexMatrix u = haar_unitary(2, rng);
  const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const Complex root = std::sqrt(det);
  u *= Complex(1.0) / root;
  return u;
}

Povm vn_effects(const VonNeumannMeasurement& m) {
  const Index d = m.dim();
  const ComplexMatrix& u = m.unitary();
  Povm out;
  out.dim = d;
  out.effects.reserve(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    ComplexMatrix p(d, d);
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c) p(r, c) = u(r, i) * std::conj(u(c, i));
    out.effects.push_back(std::move(p));
  }
  return out;
}

ChoiOperator choi_vn(const VonNeumannMeasurement& m) {
  const Index d = m.dim();
  const Povm effects = vn_effects(m);
  ComplexMatrix choi(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    const ComplexMatrix conj_p = effects.effects[static_cast<std::size_t>(i)].conjugate();
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c) choi(i * d + r, i * d + c) = conj_p(r, c);
  }
  return {std::move(choi), SubsystemShape{{"out", d}, {"in", d}}};
}

ChoiOperator dephasing_choi(Index d) {
  if (d < 1) throw std::invalid_argument("dephasing_choi requires d >= 1");
  ComplexMatrix choi(d * d, d * d);
  for (Index i = 0; i < d; ++i) choi(i * d + i, i * d + i) = 1.0;
  return {std::move(choi), SubsystemShape{{"out", d}, {"in", d}}};
}

Povm depolarize_effects(Index d) {
  if (d < 1) throw std::invalid_argument("depolarize_effects requires d >= 1");
  Povm out;
  out.dim = d;
  const ComplexMatrix eff = Complex(1.0 / static_cast<double>(d)) *
                            ComplexMatrix::identity(d);
  out.effects.assign(static_cast<std::size_t>(d), eff);
  return out;
}

double fidelity(const Povm& p, const Povm& q) {
  if (p.dim != q.dim || p.effects.size() != q.effects.size()) {
    throw std::invalid_argument("fidelity: measurement shapes do not match");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.effects.size(); ++i) {
    sum += (p.effects[i] * q.effects[i]).trace().real();
  }
  return sum / static_cast<double>(p.dim);
}

McEstimate avg_fidelity_mc(const std::function<Povm(const ComplexMatrix& u)>& scheme,
                           Index d, long samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("avg_fidelity_mc requires samples >= 1");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    const ComplexMatrix u = haar_unitary(d, rng);
    const VonNeumannMeasurement m(u);
    const double f = fidelity(vn_effects(m), scheme(u));
    sum += f;
    sum_sq += f * f;
  }
  McEstimate out;
  out.samples = samples;
  out.mean = sum / static_cast<double>(samples);
  if (samples > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * sum / static_cast<double>(samples)) /
                          static_cast<double>(samples - 1));
    out.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  return out;
}

PovmReport validate_povm(const Povm& p, double tol) {
  PovmReport report;
  report.tol = tol;
  ComplexMatrix sum = ComplexMatrix::zero(p.dim, p.dim);
  bool ok = !p.effects.empty();
  for (const auto& eff : p.effects) {
    if (eff.rows() != p.dim || eff.cols() != p.dim || !eff.is_hermitian(1e-8)) {
      report.min_eigenvalues.push_back(-std::numeric_limits<double>::infinity());
      ok = false;
      continue;
    }
    const EighResult d = eigh(eff, 1e-8);
    const double min_ev = d.eigenvalues.back();
    report.min_eigenvalues.push_back(min_ev);
    if (min_ev < -tol) ok = false;
    sum += eff;
  }
  if (ok) {
    report.completeness_error =
        spectral_norm_hermitian(sum - ComplexMatrix::identity(p.dim));
    if (report.completeness_error > tol) ok = false;
  } else {
    report.completeness_error = std::numeric_limits<double>::infinity();
  }
  report.pass = ok;
  return report;
}

}  // namespace measlearn
