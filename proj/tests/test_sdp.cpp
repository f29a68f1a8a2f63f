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

#include "measlearn/sdp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace measlearn;
using namespace measlearn::sdp;

namespace {

const Complex kI(0.0, 1.0);

/// max tr(C X) subject to tr(X) = 1, X PSD. The optimum is lambda_max(C).
ConicProblem rayleigh_problem(const ComplexMatrix& c) {
  ConicProblem p;
  const int x = p.add_block("x", c.rows());
  p.set_objective(x, c);
  std::vector<ConstraintTerm> trace;
  for (Index i = 0; i < c.rows(); ++i) trace.push_back({x, i, i, 1.0});
  p.add_constraint(std::move(trace), 1.0);
  return p;
}

}  // namespace

TEST_CASE("hermitian_embed closed forms") {
  const ComplexMatrix e = hermitian_embed(ComplexMatrix::identity(2));
  CHECK((e - ComplexMatrix::identity(4)).max_abs() == 0.0);

  const ComplexMatrix sy = {{0.0, -kI}, {kI, 0.0}};
  const EighResult d = eigh(hermitian_embed(sy));
  CHECK(d.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.eigenvalues[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d.eigenvalues[3] == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK_THROWS_AS(hermitian_embed(ComplexMatrix{{0.0, 1.0}, {2.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("hermitian_embed doubles Hilbert-Schmidt inner products") {
  std::mt19937_64 rng(211);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_hermitian = [&](Index n) {
    ComplexMatrix m(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
    return hermitian_part(m);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = random_hermitian(3);
    const ComplexMatrix b = random_hermitian(3);
    const double embedded = (hermitian_embed(a) * hermitian_embed(b)).trace().real();
    const double original = (a * b).trace().real();
    CHECK(embedded == doctest::Approx(2.0 * original).epsilon(1e-12));
  }
}

TEST_CASE("largest-eigenvalue problems solve to 1e-6") {
  SolverOptions opts;
  opts.eps = 1e-8;

  const SolverResult r1 = solve(rayleigh_problem(ComplexMatrix::diagonal({3.0, 1.0, -2.0})), opts);
  CHECK(r1.converged);
  CHECK(std::abs(r1.value - 3.0) < 1e-6);
  CHECK(r1.primal_residual < 1e-6);

  const ComplexMatrix sx = {{0.0, 1.0}, {1.0, 0.0}};
  const SolverResult r2 = solve(rayleigh_problem(sx), opts);
  CHECK(std::abs(r2.value - 1.0) < 1e-6);

  // Complex objective.
  const ComplexMatrix sy = {{0.0, -kI}, {kI, 0.0}};
  const SolverResult r3 = solve(rayleigh_problem(sy), opts);
  CHECK(std::abs(r3.value - 1.0) < 1e-6);
}

TEST_CASE("solution blocks stay inside the cone") {
  SolverOptions opts;
  opts.eps = 1e-8;
  const SolverResult r = solve(rayleigh_problem(ComplexMatrix::diagonal({3.0, 1.0, -2.0})), opts);
  const EighResult d = eigh(r.solutions[0]);
  CHECK(d.eigenvalues.back() >= -1e-5);
  CHECK(d.eigenvalues.back() >= -10.0 * opts.eps);
  // The maximizer concentrates on the top eigenvector.
  CHECK(r.solutions[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.gap >= -10.0 * opts.eps);
}

TEST_CASE("extra linear constraints are honored") {
  // max tr(sigma_z X) with tr X = 1 and X00 = X11 forces value 0.
  ConicProblem p;
  const int x = p.add_block("x", 2);
  p.set_objective(x, ComplexMatrix::diagonal({1.0, -1.0}));
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 1.0);
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, -1.0}}, 0.0);
  SolverOptions opts;
  opts.eps = 1e-8;
  const SolverResult r = solve(p, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.value) < 1e-6);
  CHECK(std::abs(r.solutions[0](0, 0).real() - 0.5) < 1e-6);
}

TEST_CASE("off-diagonal constraint terms address real and imaginary parts") {
  // Pin Re X01 = 0.3 and Im X01 = -0.2 on a PSD block with unit trace.
  ConicProblem p;
  const int x = p.add_block("x", 2);
  p.set_objective(x, ComplexMatrix::zero(2, 2));
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 1.0);
  p.add_constraint({{x, 0, 1, 1.0}}, 2.0 * 0.3);         // 2 Re X01
  p.add_constraint({{x, 0, 1, kI}}, 2.0 * (-0.2));       // 2 Im X01
  SolverOptions opts;
  opts.eps = 1e-9;
  const SolverResult r = solve(p, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.solutions[0](0, 1).real() - 0.3) < 1e-6);
  CHECK(std::abs(r.solutions[0](0, 1).imag() + 0.2) < 1e-6);

  CHECK_THROWS_AS(p.add_constraint({{x, 0, 0, kI}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(p.add_constraint({{x, 1, 0, 1.0}}, 0.0), std::invalid_argument);
}

TEST_CASE("free blocks pass through the cone step") {
  // A free block pinned entrywise to a PSD block carries the objective.
  ConicProblem p;
  const int x = p.add_block("x", 2, Cone::Psd);
  const int f = p.add_block("slack", 2, Cone::Free);
  const ComplexMatrix sx = {{0.0, 1.0}, {1.0, 0.0}};
  p.set_objective(f, sx);
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 1.0);
  // f - x = 0, entry by entry.
  p.add_constraint({{f, 0, 0, 1.0}, {x, 0, 0, -1.0}}, 0.0);
  p.add_constraint({{f, 1, 1, 1.0}, {x, 1, 1, -1.0}}, 0.0);
  p.add_constraint({{f, 0, 1, 1.0}, {x, 0, 1, -1.0}}, 0.0);
  p.add_constraint({{f, 0, 1, kI}, {x, 0, 1, -kI}}, 0.0);
  SolverOptions opts;
  opts.eps = 1e-8;
  const SolverResult r = solve(p, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0) < 1e-6);
  CHECK((r.solutions[1] - r.solutions[0]).max_abs() < 1e-6);
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
  const ComplexMatrix c = ComplexMatrix::diagonal({1.5, 0.25, -1.0, 0.75});
  SolverOptions opts;
  opts.eps = 1e-7;
  const SolverResult a = solve(rayleigh_problem(c), opts);
  const SolverResult b = solve(rayleigh_problem(c), opts);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_residual == b.primal_residual);
  CHECK(a.dual_residual == b.dual_residual);
  CHECK((a.solutions[0] - b.solutions[0]).max_abs() == 0.0);
}

TEST_CASE("scaling the objective scales the value, not the residuals") {
  const ComplexMatrix c = ComplexMatrix::diagonal({2.0, -1.0});
  SolverOptions opts;
  opts.eps = 1e-8;
  const SolverResult r1 = solve(rayleigh_problem(c), opts);
  const SolverResult r2 = solve(rayleigh_problem(2.0 * c), opts);
  CHECK(std::abs(r2.value - 2.0 * r1.value) <= 2.0 * opts.eps + 1e-9);
  CHECK(r1.primal_residual <= opts.eps);
  CHECK(r2.primal_residual <= opts.eps);
}

TEST_CASE("infeasible problems surface as non-convergence") {
  ConicProblem p;
  const int x = p.add_block("x", 2);
  p.set_objective(x, ComplexMatrix::identity(2));
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 1.0);
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 2.0);
  SolverOptions opts;
  opts.eps = 1e-8;
  opts.max_iter = 300;
  const SolverResult r = solve(p, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 300);
}

TEST_CASE("json round trip preserves the problem") {
  ConicProblem p;
  const int x = p.add_block("x", 2);
  const ComplexMatrix sy = {{0.0, -kI}, {kI, 0.0}};
  p.set_objective(x, sy);
  p.add_constraint({{x, 0, 0, 1.0}, {x, 1, 1, 1.0}}, 1.0);
  p.add_constraint({{x, 0, 1, Complex(0.5, 0.25)}}, 0.1);

  const std::string text = problem_to_json(p);
  const ConicProblem q = problem_from_json(text);
  CHECK(problem_to_json(q) == text);

  SolverOptions opts;
  opts.eps = 1e-7;
  const SolverResult ra = solve(p, opts);
  const SolverResult rb = solve(q, opts);
  CHECK(ra.value == rb.value);

  const std::string rj = result_to_json(ra);
  CHECK(rj.find("\"value\"") != std::string::npos);
}
