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

#include "measlearn/pgls.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace measlearn::pgls {

namespace {

int popcount(Index v) { return std::popcount(static_cast<unsigned long long>(v)); }

double binomial_pmf_half(long n, long l) {
  // C(n, l) / 2^n evaluated stably for large n.
  return std::exp(std::lgamma(static_cast<double>(n + 1)) -
                  std::lgamma(static_cast<double>(l + 1)) -
                  std::lgamma(static_cast<double>(n - l + 1)) -
                  static_cast<double>(n) * std::log(2.0));
}

}  // namespace

ComplexMatrix dicke(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("dicke: weight must satisfy 0 <= k <= n");
  }
  const Index dim = Index(1) << n;
  ComplexMatrix v(dim, 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(binomial_exact(n, k)));
  for (Index b = 0; b < dim; ++b) {
    if (popcount(b) == k) v(b, 0) = amp;
  }
  return v;
}

long long s_conv(int n, int k, int m) {
  if (k < 0 || k > n) throw std::invalid_argument("s_conv: requires 0 <= k <= n");
  if (m < 0 || m > n) return 0;
  long long sum = 0;
  for (int i = 0; i <= k; ++i) {
    const int j = m - i;
    if (j < 0 || j > n - k) continue;
    const long long term = static_cast<long long>(binomial_exact(k, i)) *
                           static_cast<long long>(binomial_exact(n - k, j));
    sum += ((n - k - j) % 2 == 0) ? term : -term;
  }
  return sum;
}

std::vector<std::vector<long long>> s_matrix(int n) {
  std::vector<std::vector<long long>> m(static_cast<std::size_t>(n + 1),
                                        std::vector<long long>(static_cast<std::size_t>(n + 1)));
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j) m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s_conv(n, k, j);
  return m;
}

ComplexMatrix m_k_matrix(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("m_k_matrix: requires 0 <= k <= n");
  const Index cols = Index(1) << (n + 1);
  ComplexMatrix m(2, cols);
  for (Index b = 0; b < cols; ++b) {
    const int w = popcount(b);  // the Dicke weight this basis state overlaps
    const double c = static_cast<double>(binomial_exact(n + 1, w));
    m(0, b) = static_cast<double>(s_conv(n, k, n - w)) / c;
    m(1, b) = static_cast<double>(s_conv(n, k, n + 1 - w)) / c;
  }
  return m;
}

Effect effect(int n0) {
  if (n0 < 1) throw std::invalid_argument("effect: requires N0 >= 1");
  const int n = n0 - 1;
  const Index dim = Index(1) << (n + 2);
  Effect out;
  out.n = n;
  out.r = ComplexMatrix(dim, dim);
  out.basis_vectors = ComplexMatrix(dim, n + 1);
  for (int k = 0; k <= n; ++k) {
    const ComplexMatrix mk = m_k_matrix(n, k);
    ComplexMatrix v = vectorize(mk);
    v *= Complex(1.0 / mk.frobenius_norm());
    for (Index i = 0; i < dim; ++i) out.basis_vectors(i, k) = v(i, 0);
    for (Index r = 0; r < dim; ++r) {
      const Complex vr = v(r, 0);
      if (vr == Complex(0.0)) continue;
      for (Index c = 0; c < dim; ++c) {
        out.r(r, c) += vr * std::conj(v(c, 0));
      }
    }
  }
  return out;
}

ComplexMatrix retrieved_effect(const ComplexMatrix& u, int n0) {
  const Effect e = effect(n0);
  const Povm p = vn_effects(VonNeumannMeasurement(u));
  const ComplexMatrix memory_one = p.effects[0].conjugate();
  ComplexMatrix memory = ComplexMatrix::identity(1);
  for (int i = 0; i < n0; ++i) memory = kron(memory, memory_one);
  const ComplexMatrix lifted = kron(ComplexMatrix::identity(2), memory) * e.r;
  const SubsystemShape shape{{"z", 2}, {"x", Index(1) << n0}};
  return partial_trace(lifted, shape, {"z"});
}

Rational avg_fidelity_exact(int n) {
  if (n < 1) throw std::invalid_argument("avg_fidelity_exact: requires N >= 1");
  if (n > 40) {
    throw std::invalid_argument("avg_fidelity_exact: exact path limited to N <= 40");
  }
  const Rational::Int pow2 = Rational::Int(1) << n;
  Rational sum(0);
  const int k = (n + 1) / 2;
  if (n % 2 == 1) {
    for (int l = k; l <= n; ++l) {
      sum += Rational(2 * binomial_exact(n, l) * (2 * l + 1), 2 * l + 2);
    }
  } else {
    sum += Rational(binomial_exact(n, n / 2) * (n + 1), n + 2);
    for (int l = n / 2 + 1; l <= n; ++l) {
      sum += Rational(2 * binomial_exact(n, l) * (2 * l + 1), 2 * l + 2);
    }
  }
  return sum / Rational(pow2, 1);
}

double avg_fidelity(long n) {
  if (n < 1) throw std::invalid_argument("avg_fidelity: requires N >= 1");
  if (n <= 40) return avg_fidelity_exact(static_cast<int>(n)).to_double();
  double sum = 0.0;
  const long k = (n + 1) / 2;
  if (n % 2 == 1) {
    for (long l = k; l <= n; ++l) {
      sum += 2.0 * binomial_pmf_half(n, l) * (2.0 * l + 1.0) / (2.0 * l + 2.0);
    }
  } else {
    sum += binomial_pmf_half(n, n / 2) * (n + 1.0) / (n + 2.0);
    for (long l = n / 2 + 1; l <= n; ++l) {
      sum += 2.0 * binomial_pmf_half(n, l) * (2.0 * l + 1.0) / (2.0 * l + 2.0);
    }
  }
  return sum;
}

double mixture_weight(long n) { return 2.0 * avg_fidelity(n) - 1.0; }

SimulationResult simulate(const ComplexMatrix& u, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("simulate: requires N >= 1");
  SimulationResult out;
  out.record.outcomes.reserve(static_cast<std::size_t>(n));
  // Each shot measures half of a maximally entangled pair, so both outcomes
  // occur with probability tr(P_{U,i} I/2) = 1/2 regardless of U.
  std::uniform_int_distribution<int> bit(0, 1);
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    const int b = bit(rng);
    ones += b;
    out.record.outcomes.push_back(b);
  }
  const int zeros = n - ones;
  out.record.majority_label = ones > zeros ? 1 : 0;  // tie keeps the 0 set
  out.record.n_major = std::max(ones, zeros);
  out.record.fidelity =
      (2.0 * out.record.n_major + 1.0) / (2.0 * out.record.n_major + 2.0);

  const Povm p = vn_effects(VonNeumannMeasurement(u));
  const double c = static_cast<double>(out.record.n_major) /
                   (static_cast<double>(out.record.n_major) + 1.0);
  const int maj = out.record.majority_label;
  const ComplexMatrix q = Complex(c) * p.effects[static_cast<std::size_t>(maj)];
  out.povm.dim = 2;
  out.povm.effects.resize(2);
  out.povm.effects[static_cast<std::size_t>(maj)] = q;
  out.povm.effects[static_cast<std::size_t>(1 - maj)] = ComplexMatrix::identity(2) - q;
  return out;
}

bool check_s_matrix_square(int n, long long perturb) {
  auto m = s_matrix(n);
  if (perturb != 0) {
    for (auto& row : m)
      for (auto& v : row) v += perturb;
  }
  const long long target = 1LL << n;
  for (int r = 0; r <= n; ++r) {
    for (int c = 0; c <= n; ++c) {
      long long acc = 0;
      for (int j = 0; j <= n; ++j) {
        acc += m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
               m[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      }
      if (acc != (r == c ? target : 0)) return false;
    }
  }
  return true;
}

bool check_weighted_product_symmetric(int n, long long perturb) {
  auto m = s_matrix(n);
  if (perturb != 0) {
    for (auto& row : m)
      for (auto& v : row) v += perturb;
  }
  for (int k = 0; k <= n; ++k) {
    for (int j = k + 1; j <= n; ++j) {
      const Rational lhs(m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                         binomial_exact(n, j));
      const Rational rhs(m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)],
                         binomial_exact(n, k));
      if (lhs != rhs) return false;
    }
  }
  return true;
}

bool check_generating_identity(int n, long long x, long long perturb) {
  for (int k = 0; k <= n; ++k) {
    Rational::Int sum = 0;
    Rational::Int xp = 1;
    for (int j = 0; j <= n; ++j) {
      sum += Rational::Int(s_conv(n, k, j) + perturb) * xp;
      xp *= x;
    }
    Rational::Int want = 1;
    for (int i = 0; i < k; ++i) want *= (x + 1);
    for (int i = 0; i < n - k; ++i) want *= (x - 1);
    if (sum != want) return false;
  }
  return true;
}

}  // namespace measlearn::pgls
