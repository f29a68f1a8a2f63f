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

#include <vector>

#include "measlearn/quantum.hpp"
#include "measlearn/rational.hpp"

namespace measlearn::pgls {

// The "pretty good" learning scheme for qubit projective measurements:
// store N maximally entangled pairs, measure one half of each, majority-vote
// the classical outcomes, and retrieve with a fixed two-outcome measurement
// built on the symmetric (Dicke) subspace of the surviving memory qubits.

/// Uniform superposition of all n-qubit basis states of Hamming weight k,
/// as a unit column vector of dimension 2^n. Qubit 0 is the leftmost factor.
ComplexMatrix dicke(int n, int k);

/// Signed convolution of binomial coefficients
///   sum_{i+j=m} C(k,i) C(n-k,j) (-1)^(n-k-j),
/// with value 0 whenever m lies outside [0, n].
long long s_conv(int n, int k, int m);

/// The (n+1) x (n+1) integer matrix [s_n(k,m)]_{k,m}.
std::vector<std::vector<long long>> s_matrix(int n);

/// The 2 x 2^(n+1) retrieval building block: acting on |x>^(n+1) it rescales
/// |x> by (a+b)^k (a-b)^(n-k) for |x> = (a, b).
ComplexMatrix m_k_matrix(int n, int k);

/// The retrieval effect on (input qubit, n+1 memory qubits), n = N0 - 1.
struct Effect {
  int n = 0;                    // memory qubits minus one
  ComplexMatrix r;              // 2^(n+2) x 2^(n+2), 0 <= r <= I
  ComplexMatrix basis_vectors;  // orthonormal columns |R_k>, k = 0..n
};

/// Builds the rank-(n+1) retrieval effect for N0 memory copies.
Effect effect(int n0);

/// The effect retrieved from memory conj(P_{U,0})^(x N0), evaluated by direct
/// partial trace over the memory factors; equals N0/(N0+1) * P_{U,0}.
ComplexMatrix retrieved_effect(const ComplexMatrix& u, int n0);

/// Average fidelity of the scheme with N uses (exact rational; N <= 40).
Rational avg_fidelity_exact(int n);

/// Average fidelity of the scheme with N uses; exact path below N = 41,
/// log-gamma evaluation beyond it.
double avg_fidelity(long n);

/// Weight p0 of the equivalent convex mixture p0 * P_U + (1-p0) * uniform.
double mixture_weight(long n);

struct OutcomeRecord {
  std::vector<int> outcomes;  // N single-shot labels in {0,1}
  int majority_label = 0;     // ties resolved toward 0
  int n_major = 0;
  double fidelity = 0.0;      // (2 n_major + 1) / (2 n_major + 2)
};

struct SimulationResult {
  OutcomeRecord record;
  Povm povm;  // index 0 approximates P_{U,0}
};

/// One stochastic run of the full scheme against the measurement given by u.
SimulationResult simulate(const ComplexMatrix& u, int n, Rng& rng);

// Exact identities behind the retrieval construction. The `perturb` hook
// shifts every s_n value and exists so verification tooling can demonstrate
// that an injected fault is caught; production callers leave it at 0.

/// [s_n]^2 = 2^n I, exactly in integers.
bool check_s_matrix_square(int n, long long perturb = 0);

/// [s_n] diag(1/C(n,m)) is symmetric, exactly in rationals.
bool check_weighted_product_symmetric(int n, long long perturb = 0);

/// sum_m s_n(k,m) x^m = (x+1)^k (x-1)^(n-k), exactly in integers.
bool check_generating_identity(int n, long long x, long long perturb = 0);

}  // namespace measlearn::pgls
