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
#include <vector>

#include "measlearn/pbt.hpp"
#include "measlearn/quantum.hpp"
#include "measlearn/sdp.hpp"
#include "measlearn/twirl.hpp"

namespace measlearn::tester {

// The N-use learning network as a conic program: two effect blocks L_0, L_1
// on (r, (o_k, i_k) for k = 1..N), normalized either by a parallel input
// state sigma on the i factors or by an adaptive chain of comb marginals.

enum class Kind { Parallel, Adaptive };

struct Variables {
  Kind kind = Kind::Parallel;
  int n = 0;
  std::array<ComplexMatrix, 2> l;      // on twirl::network_shape(n)
  ComplexMatrix sigma;                 // parallel: state on (i1...iN)
  std::vector<ComplexMatrix> gammas;   // adaptive: gammas[k-1] on tooth chain k
};

/// Worst constraint violations of a candidate network, for reports and tests.
struct Feasibility {
  double normalization_error = 0.0;  // || sum_i L_i - embedding ||_max
  double chain_error = 0.0;          // worst comb-chain defect (adaptive)
  double trace_error = 0.0;          // |tr sigma - 1| or |tr_chain - 1|
  double min_eigenvalue = 0.0;       // most negative eigenvalue across blocks
  double max() const;
};

Feasibility feasibility(const Variables& vars);

/// Objective (1/2) sum_i tr(L_i^T omega_i); equals the Haar-average fidelity
/// of the network's retrieved measurement.
double objective_value(const Variables& vars, const twirl::TwirledObjective& omega);

sdp::ConicProblem parallel_problem(const twirl::TwirledObjective& omega);
sdp::ConicProblem adaptive_problem(const twirl::TwirledObjective& omega);

Variables extract_variables(Kind kind, int n, const sdp::SolverResult& result);

/// Builds the objective, assembles the program, and solves it. The default
/// cap is N <= 3; N = 4 runs only with allow_large (dim-512 blocks, slow).
pbt::SchemeReport solve_scheme(Kind kind, int n, const sdp::SolverOptions& options = {},
                               bool allow_large = false);

/// Same, but also returns the solution network.
std::pair<pbt::SchemeReport, Variables> solve_scheme_full(
    Kind kind, int n, const sdp::SolverOptions& options = {}, bool allow_large = false);

/// The measurement {Q_{U,0}, Q_{U,1}} the network retrieves when the stored
/// measurement is parameterized by u, via the composition identity
/// tr(rho Q_{U,i}) = tr(L_i^T (rho (x) (Choi of P_U)^(x N))).
Povm retrieved_povm(const Variables& vars, const ComplexMatrix& u);

/// The entangled-pair majority-vote scheme mapped into network form: the
/// initial state is N maximally entangled pairs, the retrieval branches on
/// the outcome record. Feasible for the parallel constraints and scores
/// exactly the scheme's closed-form average fidelity.
Variables pgls_variables(int n);

}  // namespace measlearn::tester
