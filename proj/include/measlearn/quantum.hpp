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

#include <functional>
#include <random>
#include <vector>

#include "measlearn/linalg.hpp"

namespace measlearn {

using Rng = std::mt19937_64;

/// A general quantum measurement: an ordered list of PSD effects on a
/// d-dimensional system summing to the identity. Outcome labels are the
/// effect indices 0..n-1.
struct Povm {
  Index dim = 0;
  std::vector<ComplexMatrix> effects;
};

/// A projective measurement {U|i><i|U^dagger} parameterized by a unitary.
class VonNeumannMeasurement {
 public:
  /// Throws std::invalid_argument unless u^dagger u = I within `tol`.
  explicit VonNeumannMeasurement(ComplexMatrix u, double tol = 1e-10);
  const ComplexMatrix& unitary() const { return u_; }
  Index dim() const { return u_.rows(); }

 private:
  ComplexMatrix u_;
};

/// A matrix together with the ordered tensor factors it lives on.
struct ChoiOperator {
  ComplexMatrix matrix;
  SubsystemShape shape;
};

/// Haar-distributed unitary: Ginibre draw, QR, then the triangular factor's
/// diagonal phases divided out. Deterministic for a fixed stream state.
ComplexMatrix haar_unitary(Index d, Rng& rng);

/// Haar sample conditioned on unit determinant (d = 2 only); used to validate
/// phase-invariance reductions.
ComplexMatrix haar_su2(Rng& rng);

/// The d rank-one projector effects of a projective measurement.
Povm vn_effects(const VonNeumannMeasurement& m);

/// Choi operator of the measure-and-prepare channel
/// rho -> sum_i tr(P_i rho)|i><i|: block diagonal sum_i |i><i| (x) conj(P_i),
/// classical output factor "out" first, input factor "in" second.
ChoiOperator choi_vn(const VonNeumannMeasurement& m);

/// Choi operator of the completely dephasing channel, sum_i |ii><ii|.
ChoiOperator dephasing_choi(Index d);

/// The uniform POVM {I/d, ..., I/d}: the measurement realization of the
/// maximally depolarizing channel.
Povm depolarize_effects(Index d);

/// Measurement fidelity (1/d) sum_i tr(p_i q_i).
/// Throws std::invalid_argument on dimension or outcome-count mismatch.
double fidelity(const Povm& p, const Povm& q);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// Monte-Carlo average over Haar unitaries of fidelity(P_U, scheme(U)).
McEstimate avg_fidelity_mc(const std::function<Povm(const ComplexMatrix& u)>& scheme,
                           Index d, long samples, Rng& rng);

struct PovmReport {
  std::vector<double> min_eigenvalues;  // per effect
  double completeness_error = 0.0;      // || sum_i Q_i - I ||_inf
  double tol = 0.0;
  bool pass = false;
};

/// Diagnostic report; never throws, callers decide what to do with failures.
PovmReport validate_povm(const Povm& p, double tol = 1e-8);

}  // namespace measlearn
