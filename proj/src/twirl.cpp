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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace measlearn::twirl {

namespace {

void require_valid_perm(int p, const Perm& perm) {
  if (static_cast<int>(perm.size()) != p) {
    throw std::invalid_argument("permutation length does not match p");
  }
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  for (int v : perm) {
    if (v < 0 || v >= p || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("invalid permutation");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Index int_pow(Index base, int exp) {
  Index v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

std::vector<Perm> all_permutations(int p) {
  if (p < 1) throw std::invalid_argument("all_permutations requires p >= 1");
  Perm perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Perm> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

Perm compose(const Perm& pi, const Perm& tau) {
  require_valid_perm(static_cast<int>(pi.size()), pi);
  require_valid_perm(static_cast<int>(tau.size()), tau);
  if (pi.size() != tau.size()) throw std::invalid_argument("size mismatch");
  Perm out(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    out[i] = tau[static_cast<std::size_t>(pi[i])];
  }
  return out;
}

Perm inverse(const Perm& perm) {
  require_valid_perm(static_cast<int>(perm.size()), perm);
  Perm out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  }
  return out;
}

int cycle_count(const Perm& perm) {
  require_valid_perm(static_cast<int>(perm.size()), perm);
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<std::size_t>(perm[j]);
    }
  }
  return cycles;
}

ComplexMatrix perm_operator(int p, const Perm& perm, Index d) {
  require_valid_perm(p, perm);
  if (d < 1) throw std::invalid_argument("perm_operator requires d >= 1");
  const Index dim = int_pow(d, p);
  ComplexMatrix w(dim, dim);
  std::vector<Index> digits(static_cast<std::size_t>(p));
  for (Index b = 0; b < dim; ++b) {
    Index rest = b;
    for (int i = p - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = rest % d;
      rest /= d;
    }
    Index row = 0;
    for (int i = 0; i < p; ++i) {
      row = row * d + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    w(row, b) = 1.0;
  }
  return w;
}

PermGroupBasis gram_basis(int p, Index d, double rank_tol) {
  PermGroupBasis basis;
  basis.p = p;
  basis.d = d;
  basis.perms = all_permutations(p);
  const Index m = static_cast<Index>(basis.perms.size());
  basis.gram = ComplexMatrix(m, m);
  for (Index i = 0; i < m; ++i) {
    const Perm inv = inverse(basis.perms[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < m; ++j) {
      const int cycles = cycle_count(compose(inv, basis.perms[static_cast<std::size_t>(j)]));
      basis.gram(i, j) = static_cast<double>(int_pow(d, cycles));
    }
  }
  basis.gram_pinv = pinv(basis.gram, rank_tol);
  const EighResult spec = eigh(basis.gram, 1e-6);
  const double cut = rank_tol * std::max(spec.eigenvalues.front(), 0.0);
  basis.rank = 0;
  for (double w : spec.eigenvalues) {
    if (w > cut) ++basis.rank;
  }
  return basis;
}

ComplexMatrix commutant_twirl(const ComplexMatrix& x, const SubsystemShape& shape,
                              const std::vector<std::string>& twirl_labels,
                              const PermGroupBasis& basis) {
  if (!x.is_square() || x.rows() != shape.total_dim()) {
    throw std::invalid_argument("commutant_twirl: matrix does not match shape");
  }
  if (static_cast<int>(twirl_labels.size()) != basis.p) {
    throw std::invalid_argument("commutant_twirl: label count must equal basis.p");
  }
  std::vector<std::size_t> twirl_pos;
  for (const auto& label : twirl_labels) {
    const std::size_t pos = shape.position(label);
    if (shape.factor(pos).dim != basis.d) {
      throw std::invalid_argument("commutant_twirl: twirled factor has wrong dimension");
    }
    twirl_pos.push_back(pos);
  }
  std::vector<std::size_t> anc_pos;
  {
    std::vector<bool> is_twirl(shape.factor_count(), false);
    for (auto pos : twirl_pos) is_twirl[pos] = true;
    for (std::size_t i = 0; i < shape.factor_count(); ++i) {
      if (!is_twirl[i]) anc_pos.push_back(i);
    }
  }

  const int p = basis.p;
  const Index d = basis.d;
  const Index tdim = int_pow(d, p);
  const auto strides = shape.strides();

  // Offset of each twirl-tuple / ancilla index inside the full linear index.
  std::vector<Index> toff(static_cast<std::size_t>(tdim));
  {
    std::vector<Index> digits(static_cast<std::size_t>(p), 0);
    for (Index t = 0; t < tdim; ++t) {
      Index off = 0;
      Index rest = t;
      for (int i = p - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = rest % d;
        rest /= d;
      }
      for (int i = 0; i < p; ++i) {
        off += digits[static_cast<std::size_t>(i)] * strides[twirl_pos[static_cast<std::size_t>(i)]];
      }
      toff[static_cast<std::size_t>(t)] = off;
    }
  }
  const std::vector<Index> aoff = subset_offsets(shape, anc_pos);
  const Index adim = static_cast<Index>(aoff.size());

  // Per-permutation index action: perm_map[s][t] is the tuple whose digit i
  // equals t's digit at perm(i).
  const std::size_t group = basis.perms.size();
  std::vector<std::vector<Index>> perm_map(group, std::vector<Index>(static_cast<std::size_t>(tdim)));
  {
    std::vector<Index> digits(static_cast<std::size_t>(p));
    for (Index t = 0; t < tdim; ++t) {
      Index rest = t;
      for (int i = p - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = rest % d;
        rest /= d;
      }
      for (std::size_t s = 0; s < group; ++s) {
        const Perm& perm = basis.perms[s];
        Index v = 0;
        for (int i = 0; i < p; ++i) {
          v = v * d + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        }
        perm_map[s][static_cast<std::size_t>(t)] = v;
      }
    }
  }

  // b_sigma = tr_twirl[(W_sigma^dag (x) I) x], an ancilla-sized block each.
  std::vector<ComplexMatrix> b(group);
  for (std::size_t s = 0; s < group; ++s) {
    ComplexMatrix blk(adim, adim);
    for (Index t = 0; t < tdim; ++t) {
      const Index row_base = toff[static_cast<std::size_t>(perm_map[s][static_cast<std::size_t>(t)])];
      const Index col_base = toff[static_cast<std::size_t>(t)];
      for (Index a = 0; a < adim; ++a) {
        const Index row = row_base + aoff[static_cast<std::size_t>(a)];
        for (Index a2 = 0; a2 < adim; ++a2) {
          blk(a, a2) += x(row, col_base + aoff[static_cast<std::size_t>(a2)]);
        }
      }
    }
    b[s] = std::move(blk);
  }

  // Minimum-norm coefficient blocks M = G^+ b; the assembled operator is
  // unique even where the coefficients are not.
  std::vector<ComplexMatrix> m(group, ComplexMatrix(adim, adim));
  for (std::size_t i = 0; i < group; ++i) {
    for (std::size_t j = 0; j < group; ++j) {
      const Complex g = basis.gram_pinv(static_cast<Index>(i), static_cast<Index>(j));
      if (std::abs(g) < 1e-15) continue;
      ComplexMatrix scaled = b[j];
      scaled *= g;
      m[i] += scaled;
    }
  }

  // Assemble sum_tau W_tau (x) M_tau back into the interleaved layout.
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t s = 0; s < group; ++s) {
    if (m[s].max_abs() < 1e-16) continue;
    for (Index t = 0; t < tdim; ++t) {
      const Index row_base = toff[static_cast<std::size_t>(perm_map[s][static_cast<std::size_t>(t)])];
      const Index col_base = toff[static_cast<std::size_t>(t)];
      for (Index a = 0; a < adim; ++a) {
        const Index row = row_base + aoff[static_cast<std::size_t>(a)];
        for (Index a2 = 0; a2 < adim; ++a2) {
          out(row, col_base + aoff[static_cast<std::size_t>(a2)]) += m[s](a, a2);
        }
      }
    }
  }
  return out;
}

ComplexMatrix mc_twirl(const ComplexMatrix& x,
                       const std::function<ComplexMatrix(const ComplexMatrix& u)>& action,
                       Index d, long samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("mc_twirl requires samples >= 1");
  ComplexMatrix acc(x.rows(), x.cols());
  for (long s = 0; s < samples; ++s) {
    const ComplexMatrix g = action(haar_unitary(d, rng));
    acc += g * x * g.adjoint();
  }
  acc *= Complex(1.0 / static_cast<double>(samples));
  return acc;
}

SubsystemShape network_shape(int n) {
  SubsystemShape shape;
  shape.append("r", 2);
  for (int k = 1; k <= n; ++k) {
    shape.append("o" + std::to_string(k), 2);
    shape.append("i" + std::to_string(k), 2);
  }
  return shape;
}

TwirledObjective objective_operator(int n) {
  if (n < 1 || n > 4) {
    throw std::invalid_argument("objective_operator: exact path covers 1 <= N <= 4");
  }
  TwirledObjective out;
  out.n = n;
  out.shape = network_shape(n);

  const ComplexMatrix jd = dephasing_choi(2).matrix;
  const ComplexMatrix y = {{0.0, 1.0}, {-1.0, 0.0}};  // conj(U) = Y U Y^dag on SU(2)
  ComplexMatrix k_local = ComplexMatrix::identity(2);  // acts on "r"
  ComplexMatrix jd_all = ComplexMatrix::identity(1);
  for (int use = 0; use < n; ++use) {
    k_local = kron(k_local, kron(ComplexMatrix::identity(2), y));
    jd_all = kron(jd_all, jd);
  }

  std::vector<std::string> twirl_labels{"r"};
  for (int use = 1; use <= n; ++use) twirl_labels.push_back("i" + std::to_string(use));
  const PermGroupBasis basis = gram_basis(n + 1, 2);

  for (int i = 0; i < 2; ++i) {
    ComplexMatrix head(2, 2);
    head(i, i) = 1.0;
    const ComplexMatrix x = kron(head, jd_all);
    const ComplexMatrix rotated = k_local.adjoint() * x * k_local;
    const ComplexMatrix averaged = commutant_twirl(rotated, out.shape, twirl_labels, basis);
    out.omega[static_cast<std::size_t>(i)] = k_local * averaged * k_local.adjoint();
  }
  return out;
}

ComplexMatrix objective_group_element(int n, const ComplexMatrix& u) {
  ComplexMatrix g = u;  // acts on "r"
  const ComplexMatrix uc = u.conjugate();
  for (int use = 0; use < n; ++use) {
    g = kron(g, kron(ComplexMatrix::identity(2), uc));
  }
  return g;
}

}  // namespace measlearn::twirl
