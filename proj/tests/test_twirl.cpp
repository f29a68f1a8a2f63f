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

#include "measlearn/twirl.hpp"

#include <doctest.h>

#include <cmath>

using namespace measlearn;
using namespace measlearn::twirl;

namespace {

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

ComplexMatrix random_hermitian(Index n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return hermitian_part(m);
}

ComplexMatrix max_entangled_projector(Index d) {
  const ComplexMatrix vec_id = vectorize(ComplexMatrix::identity(d));
  return vec_id * vec_id.adjoint();
}

/// Group average of X over {U^(x p)} evaluated by the transpose trick when
/// the second factor carries conj(U): avg_(U(x)conjU) X = PT(avg_(U(x)U) PT(X)).
ComplexMatrix twirl_u_conj_u(const ComplexMatrix& x, Index d) {
  const SubsystemShape shape{{"a", d}, {"b", d}};
  const PermGroupBasis basis = gram_basis(2, d);
  const ComplexMatrix flipped = partial_transpose(x, shape, "b");
  const ComplexMatrix averaged = commutant_twirl(flipped, shape, {"a", "b"}, basis);
  return partial_transpose(averaged, shape, "b");
}

}  // namespace

TEST_CASE("permutation utilities") {
  CHECK(all_permutations(3).size() == 6);
  CHECK(all_permutations(5).size() == 120);

  const Perm ident{0, 1, 2};
  CHECK(cycle_count(ident) == 3);
  CHECK(cycle_count({1, 0, 2}) == 2);
  CHECK(cycle_count({1, 2, 0}) == 1);
  CHECK(inverse({1, 2, 0}) == Perm{2, 0, 1});
  CHECK_THROWS_AS(cycle_count({0, 0, 1}), std::invalid_argument);
}

TEST_CASE("perm_operator closed forms") {
  const ComplexMatrix w_id = perm_operator(2, {0, 1}, 2);
  CHECK(max_diff(w_id, ComplexMatrix::identity(4)) == 0.0);

  const ComplexMatrix swap = perm_operator(2, {1, 0}, 2);
  ComplexMatrix want(4, 4);
  want(0, 0) = want(3, 3) = 1.0;
  want(1, 2) = want(2, 1) = 1.0;
  CHECK(max_diff(swap, want) == 0.0);
  CHECK_THROWS_AS(perm_operator(2, {0, 2}, 2), std::invalid_argument);
}

TEST_CASE("trace of a permutation operator counts cycles") {
  for (const Perm& perm : all_permutations(4)) {
    const ComplexMatrix w = perm_operator(4, perm, 2);
    CHECK(w.trace().real() == doctest::Approx(std::pow(2.0, cycle_count(perm))));
  }
}

TEST_CASE("composition convention: the right factor acts first") {
  for (const Perm& pi : all_permutations(3)) {
    for (const Perm& tau : all_permutations(3)) {
      const ComplexMatrix lhs = perm_operator(3, pi, 2) * perm_operator(3, tau, 2);
      const ComplexMatrix rhs = perm_operator(3, compose(pi, tau), 2);
      CHECK(max_diff(lhs, rhs) == 0.0);
    }
  }
}

TEST_CASE("gram_basis closed forms and rank") {
  const PermGroupBasis b22 = gram_basis(2, 2);
  CHECK(b22.gram(0, 0) == Complex(4.0));
  CHECK(b22.gram(0, 1) == Complex(2.0));
  CHECK(b22.gram(1, 0) == Complex(2.0));
  CHECK(b22.gram(1, 1) == Complex(4.0));
  CHECK(b22.rank == 2);

  const PermGroupBasis b23 = gram_basis(2, 3);
  CHECK(b23.gram(0, 0) == Complex(9.0));
  CHECK(b23.gram(0, 1) == Complex(3.0));

  // The antisymmetrizer on three qubits vanishes, so one direction is lost.
  const PermGroupBasis b32 = gram_basis(3, 2);
  CHECK(b32.rank == 5);
  CHECK(b32.gram.is_hermitian(1e-12));
  const double scale = b32.gram.frobenius_norm();
  CHECK(max_diff(b32.gram * b32.gram_pinv * b32.gram, b32.gram) < 1e-8 * scale);
  CHECK(max_diff(b32.gram_pinv * b32.gram * b32.gram_pinv, b32.gram_pinv) < 1e-8 * scale);

  const PermGroupBasis b33 = gram_basis(3, 3);
  CHECK(b33.rank == 6);
}

TEST_CASE("single-copy twirl collapses to the normalized trace") {
  Rng rng(101);
  for (Index d : {2L, 3L}) {
    const SubsystemShape shape{{"q", d}};
    const PermGroupBasis basis = gram_basis(1, d);
    const ComplexMatrix x = random_hermitian(d, rng);
    const ComplexMatrix t = commutant_twirl(x, shape, {"q"}, basis);
    const ComplexMatrix want =
        Complex(x.trace() / static_cast<double>(d)) * ComplexMatrix::identity(d);
    CHECK(max_diff(t, want) < 1e-12);
  }
}

TEST_CASE("dephasing twirl closed form for d = 2 and 3") {
  for (Index d : {2L, 3L}) {
    const ComplexMatrix jd = dephasing_choi(d).matrix;
    const ComplexMatrix got = twirl_u_conj_u(jd, d);
    ComplexMatrix want = ComplexMatrix::identity(d * d) + max_entangled_projector(d);
    want *= Complex(1.0 / static_cast<double>(d + 1));
    CHECK(max_diff(got, want) < 1e-10);
  }
}

TEST_CASE("mc_twirl basics") {
  Rng rng(103);
  const ComplexMatrix x = random_hermitian(3, rng);
  const ComplexMatrix same =
      mc_twirl(x, [](const ComplexMatrix&) { return ComplexMatrix::identity(3); }, 2, 10, rng);
  CHECK(max_diff(same, x) < 1e-14);

  // Single-qubit twirl of sigma_z averages to zero.
  ComplexMatrix sz = {{1.0, 0.0}, {0.0, -1.0}};
  const ComplexMatrix z = mc_twirl(sz, [](const ComplexMatrix& u) { return u; }, 2, 100000, rng);
  CHECK(z.max_abs() <= 0.02);
}

TEST_CASE("mc_twirl agrees with the exact dephasing twirl") {
  Rng rng(107);
  const Index d = 2;
  const ComplexMatrix jd = dephasing_choi(d).matrix;
  const auto action = [&](const ComplexMatrix& u) { return kron(u, u.conjugate()); };
  const ComplexMatrix mc = mc_twirl(jd, action, d, 100000, rng);
  const ComplexMatrix exact = twirl_u_conj_u(jd, d);
  CHECK(spectral_norm_hermitian(hermitian_part(mc - exact)) <= 0.02);
}

TEST_CASE("twirl is idempotent, trace preserving, and invariant") {
  Rng rng(109);
  // Three twirled qubits plus one ancilla qubit, interleaved layout.
  const SubsystemShape shape{{"t1", 2}, {"a", 2}, {"t2", 2}, {"t3", 2}};
  const std::vector<std::string> labels{"t1", "t2", "t3"};
  const PermGroupBasis basis = gram_basis(3, 2);
  const ComplexMatrix x = random_hermitian(16, rng);
  const ComplexMatrix t = commutant_twirl(x, shape, labels, basis);

  CHECK(std::abs((t.trace() - x.trace())) < 1e-10);
  CHECK(max_diff(commutant_twirl(t, shape, labels, basis), t) < 1e-9);

  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix u = haar_unitary(2, rng);
    // Group element U (x) I_a (x) U (x) U in the interleaved layout.
    const ComplexMatrix g = kron(u, kron(ComplexMatrix::identity(2), kron(u, u)));
    CHECK((g * t - t * g).max_abs() < 1e-9);
  }
}

TEST_CASE("twirl idempotence up to four copies") {
  Rng rng(113);
  for (int p : {2, 4}) {
    SubsystemShape shape;
    std::vector<std::string> labels;
    for (int i = 0; i < p; ++i) {
      labels.push_back("t" + std::to_string(i));
      shape.append(labels.back(), 2);
    }
    shape.append("anc", 2);
    const PermGroupBasis basis = gram_basis(p, 2);
    const ComplexMatrix x = random_hermitian(shape.total_dim(), rng);
    const ComplexMatrix t = commutant_twirl(x, shape, labels, basis);
    CHECK(max_diff(commutant_twirl(t, shape, labels, basis), t) < 1e-9);
    CHECK(std::abs(t.trace() - x.trace()) < 1e-10);
  }
}

TEST_CASE("objective operator bookkeeping") {
  CHECK_THROWS_AS(objective_operator(0), std::invalid_argument);
  CHECK_THROWS_AS(objective_operator(5), std::invalid_argument);

  for (int n : {1, 2}) {
    const TwirledObjective obj = objective_operator(n);
    CHECK(obj.shape.total_dim() == (Index(1) << (2 * n + 1)));

    const Complex total = obj.omega[0].trace() + obj.omega[1].trace();
    CHECK(std::abs(total - Complex(std::pow(2.0, n + 1))) < 1e-9);

    for (const auto& omega : obj.omega) {
      CHECK(omega.is_hermitian(1e-10));
      // Haar invariance under U -> conj(U) makes the average real.
      CHECK((omega - omega.conjugate()).max_abs() < 1e-10);
      const EighResult d = eigh(omega);
      CHECK(d.eigenvalues.back() > -1e-9);
    }
  }
}

TEST_CASE("objective operator outcome-relabeling symmetry") {
  const ComplexMatrix sx = {{0.0, 1.0}, {1.0, 0.0}};
  for (int n : {1, 2}) {
    const TwirledObjective obj = objective_operator(n);
    // Flipping the classical output registers exchanges the two operators,
    // by Haar invariance under U -> U sigma_x.
    ComplexMatrix flip_out = ComplexMatrix::identity(2);
    for (int k = 0; k < n; ++k) flip_out = kron(flip_out, kron(sx, ComplexMatrix::identity(2)));
    CHECK(max_diff(flip_out * obj.omega[0] * flip_out.adjoint(), obj.omega[1]) < 1e-9);

    // The same exchange with every factor flipped, by U -> sigma_x U sigma_x.
    ComplexMatrix flip_all = sx;
    for (int k = 0; k < n; ++k) flip_all = kron(flip_all, kron(sx, sx));
    CHECK(max_diff(flip_all * obj.omega[0] * flip_all.adjoint(), obj.omega[1]) < 1e-9);
  }
}

TEST_CASE("objective operator matches its Monte-Carlo average") {
  Rng rng(127);
  for (int n : {1, 2}) {
    const TwirledObjective obj = objective_operator(n);
    ComplexMatrix head(2, 2);
    head(0, 0) = 1.0;
    ComplexMatrix x = head;
    for (int k = 0; k < n; ++k) x = kron(x, dephasing_choi(2).matrix);
    const ComplexMatrix mc = mc_twirl(
        x, [&](const ComplexMatrix& u) { return objective_group_element(n, u); }, 2,
        20000, rng);
    CHECK(spectral_norm_hermitian(hermitian_part(mc - obj.omega[0])) <= 0.02);
  }
}

TEST_CASE("full-group and unit-determinant sampling agree") {
  // The objective's group action is insensitive to the global phase, so
  // sampling U(2) and sampling SU(2) must estimate the same average. Batch
  // means give the combined standard error in the Frobenius aggregate.
  const int n = 1;
  ComplexMatrix head(2, 2);
  head(0, 0) = 1.0;
  const ComplexMatrix x = kron(head, dephasing_choi(2).matrix);

  const int batches = 10;
  const long per_batch = 2000;
  auto run = [&](bool special, Rng& rng) {
    std::vector<ComplexMatrix> means;
    for (int b = 0; b < batches; ++b) {
      const ComplexMatrix m = mc_twirl(
          x,
          [&](const ComplexMatrix& u) {
            if (!special) return objective_group_element(n, u);
            const Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
            const ComplexMatrix su = u * (Complex(1.0) / std::sqrt(det));
            return objective_group_element(n, su);
          },
          2, per_batch, rng);
      means.push_back(m);
    }
    return means;
  };
  Rng rng_a(131), rng_b(137);
  const auto full = run(false, rng_a);
  const auto special = run(true, rng_b);

  auto mean_of = [&](const std::vector<ComplexMatrix>& ms) {
    ComplexMatrix acc(ms[0].rows(), ms[0].cols());
    for (const auto& m : ms) acc += m;
    acc *= Complex(1.0 / static_cast<double>(ms.size()));
    return acc;
  };
  auto sum_var = [&](const std::vector<ComplexMatrix>& ms, const ComplexMatrix& mean) {
    double s = 0.0;
    for (const auto& m : ms) {
      const ComplexMatrix d = m - mean;
      s += d.frobenius_norm() * d.frobenius_norm();
    }
    // Variance of the overall mean, summed across entries.
    return s / static_cast<double>(batches * (batches - 1));
  };
  const ComplexMatrix mean_full = mean_of(full);
  const ComplexMatrix mean_special = mean_of(special);
  const double combined_se = std::sqrt(sum_var(full, mean_full) + sum_var(special, mean_special));
  const ComplexMatrix diff = mean_full - mean_special;
  CHECK(diff.frobenius_norm() <= 2.0 * combined_se);
}
