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

#include <doctest.h>

#include <cmath>
#include <random>

using namespace measlearn;

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix sigma_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix sigma_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

ComplexMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return m;
}

ComplexMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  return hermitian_part(random_matrix(n, n, rng));
}

ComplexMatrix random_integer_matrix(Index n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(-3, 3);
  ComplexMatrix m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = Complex(pick(rng), pick(rng));
  return m;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

}  // namespace

TEST_CASE("kron identity and index formula") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  CHECK(max_diff(kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

  ComplexMatrix proj0 = {{1.0, 0.0}, {0.0, 0.0}};
  const ComplexMatrix got = kron(sigma_z(), proj0);
  const ComplexMatrix want = ComplexMatrix::diagonal({1.0, 0.0, -1.0, 0.0});
  CHECK(max_diff(got, want) == 0.0);

  // Oracle: (a kron b)[(i*p+k),(j*q+l)] = a[i,j]*b[k,l] checked entrywise.
  std::mt19937_64 rng(11);
  const ComplexMatrix a = random_matrix(2, 3, rng);
  const ComplexMatrix b = random_matrix(3, 2, rng);
  const ComplexMatrix k = kron(a, b);
  REQUIRE(k.rows() == 6);
  REQUIRE(k.cols() == 6);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index p = 0; p < 3; ++p)
        for (Index q = 0; q < 2; ++q)
          CHECK(k(i * 3 + p, j * 2 + q) == a(i, j) * b(p, q));
}

TEST_CASE("kron associativity is exact on integer matrices") {
  std::mt19937_64 rng(5);
  const ComplexMatrix a = random_integer_matrix(2, rng);
  const ComplexMatrix b = random_integer_matrix(3, rng);
  const ComplexMatrix c = random_integer_matrix(2, rng);
  CHECK(max_diff(kron(kron(a, b), c), kron(a, kron(b, c))) == 0.0);
}

TEST_CASE("partial_trace closed forms") {
  std::mt19937_64 rng(7);
  const SubsystemShape shape{{"a", 2}, {"b", 3}};
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  const ComplexMatrix ab = kron(a, b);

  const ComplexMatrix keep_a = partial_trace(ab, shape, {"a"});
  CHECK(max_diff(keep_a, b.trace() * a) < 1e-12);
  const ComplexMatrix keep_b = partial_trace(ab, shape, {"b"});
  CHECK(max_diff(keep_b, a.trace() * b) < 1e-12);

  // Maximally entangled marginal.
  ComplexMatrix omega(4, 1);
  omega(0, 0) = omega(3, 0) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix rho = omega * omega.adjoint();
  const SubsystemShape qq{{"x", 2}, {"y", 2}};
  CHECK(max_diff(partial_trace(rho, qq, {"x"}), 0.5 * ComplexMatrix::identity(2)) < 1e-12);
}

TEST_CASE("partial_trace against brute-force summation") {
  std::mt19937_64 rng(13);
  const SubsystemShape shape{{"a", 2}, {"b", 3}, {"c", 2}};
  const ComplexMatrix x = random_matrix(12, 12, rng);
  const ComplexMatrix got = partial_trace(x, shape, {"a", "c"});

  // Independent oracle: explicit index sums, full index = (a*3 + b)*2 + c.
  ComplexMatrix want(4, 4);
  for (Index a1 = 0; a1 < 2; ++a1)
    for (Index c1 = 0; c1 < 2; ++c1)
      for (Index a2 = 0; a2 < 2; ++a2)
        for (Index c2 = 0; c2 < 2; ++c2) {
          Complex s = 0.0;
          for (Index b = 0; b < 3; ++b)
            s += x((a1 * 3 + b) * 2 + c1, (a2 * 3 + b) * 2 + c2);
          want(a1 * 2 + c1, a2 * 2 + c2) = s;
        }
  CHECK(max_diff(got, want) < 1e-12);

  // Trace preservation.
  CHECK(std::abs(got.trace() - x.trace()) < 1e-12);
}

TEST_CASE("partial_trace rejects unknown labels") {
  const SubsystemShape shape{{"a", 2}, {"b", 2}};
  const ComplexMatrix x = ComplexMatrix::identity(4);
  CHECK_THROWS_AS(partial_trace(x, shape, {"z"}), std::invalid_argument);
}

TEST_CASE("partial_transpose basics") {
  std::mt19937_64 rng(17);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);

  const SubsystemShape single{{"a", 2}};
  CHECK(max_diff(partial_transpose(a, single, "a"), a.transpose()) == 0.0);

  const SubsystemShape shape{{"a", 2}, {"b", 3}};
  CHECK(max_diff(partial_transpose(kron(a, b), shape, "b"), kron(a, b.transpose())) == 0.0);

  // Involution on a random two-factor matrix.
  const ComplexMatrix x = random_matrix(6, 6, rng);
  CHECK(max_diff(partial_transpose(partial_transpose(x, shape, "a"), shape, "a"), x) == 0.0);
  CHECK_THROWS_AS(partial_transpose(x, shape, "nope"), std::invalid_argument);
}

TEST_CASE("partial_transpose of maximally entangled projector gives SWAP/2") {
  ComplexMatrix omega(4, 1);
  omega(0, 0) = omega(3, 0) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix rho = omega * omega.adjoint();
  const SubsystemShape qq{{"x", 2}, {"y", 2}};
  const ComplexMatrix pt = partial_transpose(rho, qq, "y");

  // Oracle via brute-force index permutation.
  ComplexMatrix want(4, 4);
  for (Index r1 = 0; r1 < 2; ++r1)
    for (Index r2 = 0; r2 < 2; ++r2)
      for (Index c1 = 0; c1 < 2; ++c1)
        for (Index c2 = 0; c2 < 2; ++c2)
          want(r1 * 2 + c2, c1 * 2 + r2) = rho(r1 * 2 + r2, c1 * 2 + c2);
  CHECK(max_diff(pt, want) == 0.0);

  const EighResult d = eigh(pt);
  CHECK(d.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.eigenvalues[3] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("vectorize convention and linearity") {
  const ComplexMatrix v1 = vectorize(ComplexMatrix::identity(2));
  REQUIRE(v1.rows() == 4);
  CHECK(v1(0, 0) == Complex(1.0));
  CHECK(v1(1, 0) == Complex(0.0));
  CHECK(v1(2, 0) == Complex(0.0));
  CHECK(v1(3, 0) == Complex(1.0));

  ComplexMatrix e01 = {{0.0, 1.0}, {0.0, 0.0}};  // |0><1|
  const ComplexMatrix v2 = vectorize(e01);
  CHECK(v2(1, 0) == Complex(1.0));  // |0> (x) |1>
  CHECK(std::abs(v2.frobenius_norm() - 1.0) == 0.0);

  std::mt19937_64 rng(23);
  const ComplexMatrix a = random_matrix(3, 2, rng);
  const ComplexMatrix b = random_matrix(3, 2, rng);
  const Complex alpha(0.3, -1.1), beta(2.0, 0.7);
  CHECK(max_diff(vectorize(alpha * a + beta * b),
                 alpha * vectorize(a) + beta * vectorize(b)) < 1e-12);
  CHECK(std::abs(vectorize(a).frobenius_norm() - a.frobenius_norm()) < 1e-12);
}

TEST_CASE("eigh on Pauli matrices") {
  const EighResult dz = eigh(sigma_z());
  CHECK(dz.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dz.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-14));

  const EighResult dx = eigh(sigma_x());
  CHECK(dx.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dx.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-14));
  // Eigenvectors are (|0> +- |1>)/sqrt(2) up to phase.
  const double s = 1.0 / std::sqrt(2.0);
  const Complex p0 = std::conj(dx.eigenvectors(0, 0)) * s + std::conj(dx.eigenvectors(1, 0)) * s;
  CHECK(std::abs(p0) == doctest::Approx(1.0).epsilon(1e-12));
  const Complex p1 = std::conj(dx.eigenvectors(0, 1)) * s - std::conj(dx.eigenvectors(1, 1)) * s;
  CHECK(std::abs(p1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh reconstruction and trace identity") {
  std::mt19937_64 rng(29);
  const ComplexMatrix h = random_hermitian(8, rng);
  const EighResult d = eigh(h);

  std::vector<Complex> lam(d.eigenvalues.begin(), d.eigenvalues.end());
  const ComplexMatrix v = d.eigenvectors;
  const ComplexMatrix rebuilt = v * ComplexMatrix::diagonal(lam) * v.adjoint();
  CHECK(max_diff(rebuilt, h) < 1e-9 * h.frobenius_norm());

  double sum = 0.0;
  for (double w : d.eigenvalues) sum += w;
  CHECK(std::abs(sum - h.trace().real()) < 1e-9 * h.frobenius_norm());

  for (std::size_t i = 0; i + 1 < d.eigenvalues.size(); ++i) {
    CHECK(d.eigenvalues[i] >= d.eigenvalues[i + 1]);
  }

  ComplexMatrix bad = h;
  bad(0, 1) += Complex(0.0, 1e-3);
  CHECK_THROWS_AS(eigh(bad), std::invalid_argument);
}

TEST_CASE("pinv closed forms and Penrose identities") {
  CHECK(max_diff(pinv(ComplexMatrix::identity(5)), ComplexMatrix::identity(5)) < 1e-12);
  CHECK(max_diff(pinv(ComplexMatrix::diagonal({2.0, 0.0})),
                 ComplexMatrix::diagonal({0.5, 0.0})) < 1e-12);

  // Gram matrix of the six S3 permutation operators on two qubits (d=2),
  // rank 5 out of 6. Operators built inline, independent of other modules.
  auto perm_op = [](int p0, int p1, int p2) {
    ComplexMatrix w(8, 8);
    const int perm[3] = {p0, p1, p2};
    for (Index b = 0; b < 8; ++b) {
      int bits[3] = {static_cast<int>((b >> 2) & 1), static_cast<int>((b >> 1) & 1),
                     static_cast<int>(b & 1)};
      const Index r = (bits[perm[0]] << 2) | (bits[perm[1]] << 1) | bits[perm[2]];
      w(r, b) = 1.0;
    }
    return w;
  };
  std::vector<ComplexMatrix> ops;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (auto& p : perms) ops.push_back(perm_op(p[0], p[1], p[2]));
  ComplexMatrix gram(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) gram(i, j) = (ops[i].adjoint() * ops[j]).trace();

  const ComplexMatrix gp = pinv(gram, 1e-9);
  const double scale = gram.frobenius_norm();
  CHECK(max_diff(gram * gp * gram, gram) < 1e-8 * scale);
  CHECK(max_diff(gp * gram * gp, gp) < 1e-8 * scale);

  // Rank 5: exactly one eigenvalue collapses to zero at d=2.
  const EighResult d = eigh(gram);
  CHECK(std::abs(d.eigenvalues[5]) < 1e-9 * scale);
  CHECK(d.eigenvalues[4] > 1e-6 * scale);
}

TEST_CASE("reorder_subsystems permutes kron factors") {
  std::mt19937_64 rng(31);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  const ComplexMatrix c = random_matrix(2, 2, rng);
  const SubsystemShape shape{{"a", 2}, {"b", 3}, {"c", 2}};
  const ComplexMatrix x = kron(a, kron(b, c));
  const ComplexMatrix y = reorder_subsystems(x, shape, {"c", "a", "b"});
  CHECK(max_diff(y, kron(c, kron(a, b))) < 1e-13);
}

TEST_CASE("subsystem shape validation") {
  SubsystemShape shape;
  shape.append("a", 2);
  CHECK_THROWS_AS(shape.append("a", 3), std::invalid_argument);
  CHECK_THROWS_AS(shape.append("b", 0), std::invalid_argument);
  CHECK_THROWS_AS(shape.position("missing"), std::invalid_argument);
  CHECK(shape.total_dim() == 2);
}
