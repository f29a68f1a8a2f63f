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

#include <array>
#include <functional>
#include <vector>

#include "measlearn/quantum.hpp"

namespace measlearn::twirl {

// Exact Haar averaging over U^(x p) (x) I via the permutation-operator
// commutant, with Monte-Carlo cross-validation.

/// A permutation as the image list: perm[i] is where position i reads from.
using Perm = std::vector<int>;

/// All p! permutations of {0, ..., p-1} in lexicographic order.
std::vector<Perm> all_permutations(int p);

/// Label of the operator product W_pi * W_tau, where W_tau acts first on the
/// ket. With W_sigma|b_0,...> = |b_sigma(0),...> this is i -> tau(pi(i)).
Perm compose(const Perm& pi, const Perm& tau);

Perm inverse(const Perm& perm);

int cycle_count(const Perm& perm);

/// Subsystem-permutation operator on p qudits of local dimension d:
/// W|b_0, b_1, ...> = |b_perm(0), b_perm(1), ...>.
ComplexMatrix perm_operator(int p, const Perm& perm, Index d);

/// The permutation operators' Gram data: entries tr(W_s^dag W_t) = d^#cycles.
/// Rank-deficient whenever d < p, hence the pseudo-inverse.
struct PermGroupBasis {
  int p = 0;
  Index d = 0;
  std::vector<Perm> perms;
  ComplexMatrix gram;
  ComplexMatrix gram_pinv;
  Index rank = 0;
};

PermGroupBasis gram_basis(int p, Index d, double rank_tol = 1e-9);

/// Exact twirl of x over the group {U^(x p) on twirl_labels (x) I elsewhere}:
/// returns sum_tau W_tau (x) M_tau with coefficient blocks solved through the
/// Gram pseudo-inverse. Idempotent, trace preserving, and the output commutes
/// with every group element.
ComplexMatrix commutant_twirl(const ComplexMatrix& x, const SubsystemShape& shape,
                              const std::vector<std::string>& twirl_labels,
                              const PermGroupBasis& basis);

/// Empirical mean of action(U) * x * action(U)^dag over Haar samples of
/// dimension d; the cross-check for the exact path.
ComplexMatrix mc_twirl(const ComplexMatrix& x,
                       const std::function<ComplexMatrix(const ComplexMatrix& u)>& action,
                       Index d, long samples, Rng& rng);

/// The two Haar-averaged objective operators for the N-use learning problem:
/// omega[i] = avg_U of P_{U,i} (x) (Choi of P_U)^(x N), on the factor order
/// (r, o1, i1, ..., oN, iN).
struct TwirledObjective {
  int n = 0;
  std::array<ComplexMatrix, 2> omega;
  SubsystemShape shape;
};

/// Factor order used by the learning network: retrieval input "r", then one
/// (classical output "ok", measured input "ik") pair per use.
SubsystemShape network_shape(int n);

/// Exact evaluation (1 <= n <= 4). Reduces the U (x) conj(U) action to a
/// plain U^(x n+1) twirl through the qubit identity conj(U) = Y U Y^dag for
/// unit-determinant U, which the Monte-Carlo agreement tests validate.
TwirledObjective objective_operator(int n);

/// The group element whose Haar average defines the objective: U on "r",
/// conj(U) on every "ik", identity on every "ok". Used by the MC cross-check.
ComplexMatrix objective_group_element(int n, const ComplexMatrix& u);

}  // namespace measlearn::twirl
