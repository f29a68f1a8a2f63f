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

#include <string>
#include <vector>

#include "measlearn/linalg.hpp"

namespace measlearn::sdp {

// A self-contained first-order solver for
//     maximize   sum_b <C_b, X_b>
//     subject to sum_b <A_{j,b}, X_b> = rhs_j   for every constraint j,
//                X_b PSD (or free, for slack blocks),
// over complex Hermitian blocks, via ADMM splitting between the affine
// subspace and the cone product. Deterministic: identical inputs produce
// bit-identical iterates.

enum class Cone { Psd, Free };

struct Block {
  std::string name;
  Index dim = 0;  // complex Hermitian dim x dim
  Cone cone = Cone::Psd;
};

/// One Hermitian-matrix entry of a constraint's A_{j,b}: the value at
/// (row, col) with row <= col; the mirrored conjugate entry is implied.
/// Diagonal entries must be real. The induced functional on Hermitian X is
/// value * X[row,row] on the diagonal and 2 Re(conj(value) X[row,col]) off it.
struct ConstraintTerm {
  int block = 0;
  Index row = 0;
  Index col = 0;
  Complex value;
};

struct Constraint {
  std::vector<ConstraintTerm> terms;
  double rhs = 0.0;
};

class ConicProblem {
 public:
  /// Returns the block id used by objective and constraint terms.
  int add_block(const std::string& name, Index dim, Cone cone = Cone::Psd);

  /// Hermitian (within 1e-10) objective matrix for one block.
  void set_objective(int block, ComplexMatrix c);

  void add_constraint(std::vector<ConstraintTerm> terms, double rhs);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<ComplexMatrix>& objectives() const { return objectives_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  std::vector<Block> blocks_;
  std::vector<ComplexMatrix> objectives_;
  std::vector<Constraint> constraints_;
};

struct SolverOptions {
  double eps = 1e-6;        // target for the scaled splitting residuals
  long max_iter = 200000;
  double rho = 1.0;         // initial penalty; adapted by residual balancing
  double alpha = 1.5;       // over-relaxation
  bool adaptive_rho = true;
  long log_every = 0;       // > 0 prints residuals to stderr
};

struct SolverResult {
  double value = 0.0;            // <c, z> at the returned (cone-feasible) point
  double primal_residual = 0.0;  // ||A vec(z) - b|| / (1 + ||b||), recomputed
  double dual_residual = 0.0;    // scaled ADMM dual residual at termination
  double gap = 0.0;              // (<c,x> - <c,z>) / (1 + |<c,z>|), signed
  long iterations = 0;
  bool converged = false;
  double rho_final = 0.0;
  std::vector<ComplexMatrix> solutions;  // per block; PSD blocks exactly PSD
};

/// Real symmetric embedding [[Re, -Im], [Im, Re]]; doubles each eigenvalue's
/// multiplicity and preserves positive semidefiniteness both ways.
/// Throws std::invalid_argument when x is not Hermitian.
ComplexMatrix hermitian_embed(const ComplexMatrix& x);

/// Runs the splitting iteration until both scaled residuals fall below eps
/// or max_iter is reached (the best iterate is then returned, flagged
/// non-converged). Infeasible problems surface as non-converging residuals.
SolverResult solve(const ConicProblem& problem, const SolverOptions& options = {});

/// JSON round-trip for regression fixtures.
std::string problem_to_json(const ConicProblem& problem);
ConicProblem problem_from_json(const std::string& text);
std::string result_to_json(const SolverResult& result);

}  // namespace measlearn::sdp
