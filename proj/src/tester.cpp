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

#include "measlearn/tester.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "measlearn/pgls.hpp"

namespace measlearn::tester {

namespace {

const Complex kI(0.0, 1.0);

std::string label_o(int k) { return "o" + std::to_string(k); }
std::string label_i(int k) { return "i" + std::to_string(k); }
std::string label_m(int k) { return "m" + std::to_string(k); }

/// Shape of the input-state block sigma: the measured inputs in use order.
SubsystemShape sigma_shape(int n) {
  SubsystemShape s;
  for (int k = 1; k <= n; ++k) s.append(label_i(k), 2);
  return s;
}

/// Shape of the adaptive chain marginal for teeth 1..k: the comb that emits
/// i_1, consumes o_1, emits i_2, ..., consumes o_{k-1}, emits i_k.
SubsystemShape gamma_shape(int k) {
  SubsystemShape s;
  for (int j = 1; j < k; ++j) {
    s.append(label_i(j), 2);
    s.append(label_o(j), 2);
  }
  s.append(label_i(k), 2);
  return s;
}

/// Emits the entrywise rows of  sum_b X_{lhs_b}  =  I_{id_labels} (x) X_src,
/// all factors living inside `big` (the source factors in src_shape order).
void emit_sum_equals_embedding(sdp::ConicProblem& prob, const std::vector<int>& lhs_blocks,
                               const SubsystemShape& big,
                               const std::vector<std::string>& id_labels, int src_block,
                               const SubsystemShape& src_shape) {
  const Index dim = big.total_dim();
  const auto big_strides = big.strides();
  const auto src_strides = src_shape.strides();

  // Per big-factor decomposition data.
  struct FactorMap {
    Index big_stride;
    Index dim;
    Index src_stride;  // -1 for identity factors
  };
  std::vector<FactorMap> factors;
  for (std::size_t f = 0; f < big.factor_count(); ++f) {
    const auto& fac = big.factor(f);
    FactorMap fm{big_strides[f], fac.dim, -1};
    if (std::find(id_labels.begin(), id_labels.end(), fac.label) == id_labels.end()) {
      fm.src_stride = src_strides[src_shape.position(fac.label)];
    }
    factors.push_back(fm);
  }

  const auto split = [&](Index v) {
    Index id_part = 0;
    Index src_part = 0;
    for (const auto& fm : factors) {
      const Index digit = (v / fm.big_stride) % fm.dim;
      if (fm.src_stride < 0) {
        id_part = id_part * fm.dim + digit;
      } else {
        src_part += digit * fm.src_stride;
      }
    }
    return std::make_pair(id_part, src_part);
  };

  for (Index p = 0; p < dim; ++p) {
    const auto [pid, psrc] = split(p);
    for (Index q = p; q < dim; ++q) {
      const auto [qid, qsrc] = split(q);
      std::vector<sdp::ConstraintTerm> re_terms;
      for (int b : lhs_blocks) re_terms.push_back({b, p, q, 1.0});
      if (p == q) {
        re_terms.push_back({src_block, psrc, qsrc, -1.0});
        prob.add_constraint(std::move(re_terms), 0.0);
        continue;
      }
      std::vector<sdp::ConstraintTerm> im_terms;
      for (int b : lhs_blocks) im_terms.push_back({b, p, q, kI});
      if (pid == qid) {
        if (psrc <= qsrc) {
          re_terms.push_back({src_block, psrc, qsrc, -1.0});
          im_terms.push_back({src_block, psrc, qsrc, -kI});
        } else {
          // The embedding reads the conjugate of the stored upper entry.
          re_terms.push_back({src_block, qsrc, psrc, -1.0});
          im_terms.push_back({src_block, qsrc, psrc, kI});
        }
      }
      prob.add_constraint(std::move(re_terms), 0.0);
      prob.add_constraint(std::move(im_terms), 0.0);
    }
  }
}

/// Rows of  tr_last(X_k) = I_(new last factor) (x) X_{k-1}, where the traced
/// factor is the least significant one of block k and the identity factor is
/// the least significant remaining one. Matches the gamma_shape layouts.
void emit_trace_chain_step(sdp::ConicProblem& prob, int upper_block, Index upper_dim,
                           int lower_block) {
  const Index reduced = upper_dim / 2;
  for (Index p = 0; p < reduced; ++p) {
    const Index a = p / 2;
    const Index s = p % 2;
    for (Index q = p; q < reduced; ++q) {
      const Index b = q / 2;
      const Index s2 = q % 2;
      std::vector<sdp::ConstraintTerm> re_terms{{upper_block, 2 * p, 2 * q, 1.0},
                                                {upper_block, 2 * p + 1, 2 * q + 1, 1.0}};
      if (p == q) {
        re_terms.push_back({lower_block, a, b, -1.0});
        prob.add_constraint(std::move(re_terms), 0.0);
        continue;
      }
      std::vector<sdp::ConstraintTerm> im_terms{{upper_block, 2 * p, 2 * q, kI},
                                                {upper_block, 2 * p + 1, 2 * q + 1, kI}};
      if (s == s2) {
        re_terms.push_back({lower_block, a, b, -1.0});
        im_terms.push_back({lower_block, a, b, -kI});
      }
      prob.add_constraint(std::move(re_terms), 0.0);
      prob.add_constraint(std::move(im_terms), 0.0);
    }
  }
}

void set_network_objective(sdp::ConicProblem& prob, const std::array<int, 2>& l_blocks,
                           const twirl::TwirledObjective& omega) {
  for (int i = 0; i < 2; ++i) {
    // tr(L^T Omega) = <Omega^T, L> for Hermitian Omega.
    ComplexMatrix c = omega.omega[static_cast<std::size_t>(i)].transpose();
    c *= 0.5;
    prob.set_objective(l_blocks[static_cast<std::size_t>(i)], hermitian_part(c));
  }
}

ComplexMatrix embed_parallel_normalization(const Variables& vars) {
  const int n = vars.n;
  const SubsystemShape net = twirl::network_shape(n);
  // I on (r, o1..oN) (x) sigma on (i1..iN), then interleave.
  SubsystemShape flat;
  flat.append("r", 2);
  for (int k = 1; k <= n; ++k) flat.append(label_o(k), 2);
  for (int k = 1; k <= n; ++k) flat.append(label_i(k), 2);
  const ComplexMatrix block = kron(ComplexMatrix::identity(Index(1) << (n + 1)), vars.sigma);
  return reorder_subsystems(block, flat, net.labels());
}

ComplexMatrix embed_adaptive_normalization(const Variables& vars) {
  const int n = vars.n;
  const SubsystemShape net = twirl::network_shape(n);
  SubsystemShape flat;
  flat.append("r", 2);
  flat.append(label_o(n), 2);
  const SubsystemShape chain = gamma_shape(n);
  for (const auto& f : chain.factors()) flat.append(f.label, f.dim);
  const ComplexMatrix block = kron(ComplexMatrix::identity(4), vars.gammas.back());
  return reorder_subsystems(block, flat, net.labels());
}

}  // namespace

double Feasibility::max() const {
  return std::max(std::max(normalization_error, chain_error),
                  std::max(trace_error, std::max(0.0, -min_eigenvalue)));
}

Feasibility feasibility(const Variables& vars) {
  Feasibility out;
  const ComplexMatrix sum = vars.l[0] + vars.l[1];
  double min_eig = 0.0;
  const auto track_psd = [&](const ComplexMatrix& x) {
    const EighResult d = eigh(hermitian_part(x), 1e-6);
    min_eig = std::min(min_eig, d.eigenvalues.back());
  };
  track_psd(vars.l[0]);
  track_psd(vars.l[1]);

  if (vars.kind == Kind::Parallel) {
    out.normalization_error = (sum - embed_parallel_normalization(vars)).max_abs();
    out.trace_error = std::abs(vars.sigma.trace() - Complex(1.0));
    track_psd(vars.sigma);
  } else {
    out.normalization_error = (sum - embed_adaptive_normalization(vars)).max_abs();
    for (int k = vars.n; k >= 2; --k) {
      const ComplexMatrix& upper = vars.gammas[static_cast<std::size_t>(k - 1)];
      const SubsystemShape shape = gamma_shape(k);
      std::vector<std::string> keep = shape.complement({label_i(k)});
      const ComplexMatrix reduced = partial_trace(upper, shape, keep);
      const ComplexMatrix want =
          kron(vars.gammas[static_cast<std::size_t>(k - 2)], ComplexMatrix::identity(2));
      out.chain_error = std::max(out.chain_error, (reduced - want).max_abs());
      track_psd(upper);
    }
    track_psd(vars.gammas[0]);
    out.trace_error = std::abs(vars.gammas[0].trace() - Complex(1.0));
  }
  out.min_eigenvalue = min_eig;
  return out;
}

double objective_value(const Variables& vars, const twirl::TwirledObjective& omega) {
  if (vars.n != omega.n) throw std::invalid_argument("objective_value: use count mismatch");
  double v = 0.0;
  for (int i = 0; i < 2; ++i) {
    v += (vars.l[static_cast<std::size_t>(i)].transpose() *
          omega.omega[static_cast<std::size_t>(i)])
             .trace()
             .real();
  }
  return 0.5 * v;
}

sdp::ConicProblem parallel_problem(const twirl::TwirledObjective& omega) {
  const int n = omega.n;
  const SubsystemShape net = twirl::network_shape(n);
  sdp::ConicProblem prob;
  const int l0 = prob.add_block("l0", net.total_dim());
  const int l1 = prob.add_block("l1", net.total_dim());
  const int sig = prob.add_block("sigma", Index(1) << n);
  set_network_objective(prob, {l0, l1}, omega);

  std::vector<std::string> id_labels{"r"};
  for (int k = 1; k <= n; ++k) id_labels.push_back(label_o(k));
  emit_sum_equals_embedding(prob, {l0, l1}, net, id_labels, sig, sigma_shape(n));

  std::vector<sdp::ConstraintTerm> trace_row;
  for (Index a = 0; a < (Index(1) << n); ++a) trace_row.push_back({sig, a, a, 1.0});
  prob.add_constraint(std::move(trace_row), 1.0);
  return prob;
}

sdp::ConicProblem adaptive_problem(const twirl::TwirledObjective& omega) {
  const int n = omega.n;
  const SubsystemShape net = twirl::network_shape(n);
  sdp::ConicProblem prob;
  const int l0 = prob.add_block("l0", net.total_dim());
  const int l1 = prob.add_block("l1", net.total_dim());
  std::vector<int> gamma_blocks;
  for (int k = 1; k <= n; ++k) {
    gamma_blocks.push_back(prob.add_block("gamma" + std::to_string(k), Index(1) << (2 * k - 1)));
  }
  set_network_objective(prob, {l0, l1}, omega);

  emit_sum_equals_embedding(prob, {l0, l1}, net, {"r", label_o(n)},
                            gamma_blocks[static_cast<std::size_t>(n - 1)], gamma_shape(n));
  for (int k = n; k >= 2; --k) {
    emit_trace_chain_step(prob, gamma_blocks[static_cast<std::size_t>(k - 1)],
                          Index(1) << (2 * k - 1),
                          gamma_blocks[static_cast<std::size_t>(k - 2)]);
  }
  // tr_(i1) Gamma1 = 1.
  prob.add_constraint({{gamma_blocks[0], 0, 0, 1.0}, {gamma_blocks[0], 1, 1, 1.0}}, 1.0);
  return prob;
}

Variables extract_variables(Kind kind, int n, const sdp::SolverResult& result) {
  Variables vars;
  vars.kind = kind;
  vars.n = n;
  vars.l[0] = result.solutions.at(0);
  vars.l[1] = result.solutions.at(1);
  if (kind == Kind::Parallel) {
    vars.sigma = result.solutions.at(2);
  } else {
    for (int k = 1; k <= n; ++k) {
      vars.gammas.push_back(result.solutions.at(static_cast<std::size_t>(1 + k)));
    }
  }
  return vars;
}

pbt::SchemeReport solve_scheme(Kind kind, int n, const sdp::SolverOptions& options,
                               bool allow_large) {
  return solve_scheme_full(kind, n, options, allow_large).first;
}

std::pair<pbt::SchemeReport, Variables> solve_scheme_full(Kind kind, int n,
                                                          const sdp::SolverOptions& options,
                                                          bool allow_large) {
  if (n < 1 || n > 4 || (n > 3 && !allow_large)) {
    throw std::invalid_argument(
        "solve_scheme: N <= 3 by default (N = 4 only with allow_large)");
  }
  if (n > 3) {
    std::fprintf(stderr,
                 "warning: N = %d uses dim-%ld blocks; expect a long solve\n", n,
                 static_cast<long>(Index(1) << (2 * n + 1)));
  }
  const twirl::TwirledObjective omega = twirl::objective_operator(n);
  const sdp::ConicProblem prob =
      kind == Kind::Parallel ? parallel_problem(omega) : adaptive_problem(omega);
  const sdp::SolverResult res = sdp::solve(prob, options);

  pbt::SchemeReport report;
  report.scheme = kind == Kind::Parallel ? pbt::SchemeId::ParallelSdp : pbt::SchemeId::AdaptiveSdp;
  report.n = n;
  report.value = res.value;
  report.method = pbt::Method::Sdp;
  report.diagnostics["primal_residual"] = res.primal_residual;
  report.diagnostics["dual_residual"] = res.dual_residual;
  report.diagnostics["gap"] = res.gap;
  report.diagnostics["iterations"] = static_cast<double>(res.iterations);
  report.diagnostics["rho_final"] = res.rho_final;
  report.diagnostics["converged"] = res.converged ? 1.0 : 0.0;
  return {report, extract_variables(kind, n, res)};
}

Povm retrieved_povm(const Variables& vars, const ComplexMatrix& u) {
  const int n = vars.n;
  const SubsystemShape net = twirl::network_shape(n);
  const ChoiOperator choi = choi_vn(VonNeumannMeasurement(u));
  ComplexMatrix stored = ComplexMatrix::identity(2);  // the r factor
  for (int k = 0; k < n; ++k) stored = kron(stored, choi.matrix);

  Povm out;
  out.dim = 2;
  for (int i = 0; i < 2; ++i) {
    const ComplexMatrix lifted =
        vars.l[static_cast<std::size_t>(i)].transpose() * stored;
    const ComplexMatrix q = partial_trace(lifted, net, {"r"});
    out.effects.push_back(hermitian_part(q));
  }
  return out;
}

Variables pgls_variables(int n) {
  if (n < 1) throw std::invalid_argument("pgls_variables: requires N >= 1");
  const SubsystemShape net = twirl::network_shape(n);
  const Index net_dim = net.total_dim();

  // Full working space (r, o1..oN, m1..mN, i1..iN).
  SubsystemShape full;
  full.append("r", 2);
  for (int k = 1; k <= n; ++k) full.append(label_o(k), 2);
  for (int k = 1; k <= n; ++k) full.append(label_m(k), 2);
  for (int k = 1; k <= n; ++k) full.append(label_i(k), 2);

  // Retrieval effects R'_i on (r, o-vector, m-vector): branch on the outcome
  // record carried by the o registers, keep the majority memory qubits, and
  // apply the symmetric-subspace effect there.
  const Index branch_count = Index(1) << n;
  const Index rm_dim = Index(1) << (n + 1);
  std::array<ComplexMatrix, 2> r_primed{
      ComplexMatrix(branch_count * rm_dim, branch_count * rm_dim),
      ComplexMatrix(branch_count * rm_dim, branch_count * rm_dim)};
  // Factor order for the branching build: (o1..oN, r, m1..mN).
  SubsystemShape branch_shape;
  for (int k = 1; k <= n; ++k) branch_shape.append(label_o(k), 2);
  branch_shape.append("r", 2);
  for (int k = 1; k <= n; ++k) branch_shape.append(label_m(k), 2);

  for (Index rec = 0; rec < branch_count; ++rec) {
    std::vector<int> bits(static_cast<std::size_t>(n));
    int ones = 0;
    for (int k = 0; k < n; ++k) {
      bits[static_cast<std::size_t>(k)] = static_cast<int>((rec >> (n - 1 - k)) & 1);
      ones += bits[static_cast<std::size_t>(k)];
    }
    const int majority = ones > n - ones ? 1 : 0;  // ties keep the 0 set
    const int kept = std::max(ones, n - ones);

    // Effect on (r, kept memory qubits), then identity on discarded ones,
    // then reorder memory back to use order.
    const pgls::Effect eff = pgls::effect(kept);
    SubsystemShape perm_shape;
    perm_shape.append("r", 2);
    std::vector<std::string> kept_labels, discarded_labels;
    for (int k = 0; k < n; ++k) {
      (bits[static_cast<std::size_t>(k)] == majority ? kept_labels : discarded_labels)
          .push_back(label_m(k + 1));
    }
    for (const auto& l : kept_labels) perm_shape.append(l, 2);
    for (const auto& l : discarded_labels) perm_shape.append(l, 2);
    const ComplexMatrix padded =
        kron(eff.r, ComplexMatrix::identity(Index(1) << (n - kept)));
    std::vector<std::string> rm_order{"r"};
    for (int k = 1; k <= n; ++k) rm_order.push_back(label_m(k));
    const ComplexMatrix on_rm = reorder_subsystems(padded, perm_shape, rm_order);
    const ComplexMatrix complement = ComplexMatrix::identity(rm_dim) - on_rm;

    for (int i = 0; i < 2; ++i) {
      const ComplexMatrix& blk = (i == majority) ? on_rm : complement;
      for (Index a = 0; a < rm_dim; ++a) {
        for (Index b = 0; b < rm_dim; ++b) {
          r_primed[static_cast<std::size_t>(i)](rec * rm_dim + a, rec * rm_dim + b) =
              blk(a, b);
        }
      }
    }
  }

  // Initial state: one maximally entangled pair per use on (i_k, m_k). The
  // composition formula consumes its partial transpose on the i factors,
  // which is SWAP/2 for each pair.
  ComplexMatrix swap_half(4, 4);
  swap_half(0, 0) = swap_half(3, 3) = 0.5;
  swap_half(1, 2) = swap_half(2, 1) = 0.5;
  ComplexMatrix sigma_pt = ComplexMatrix::identity(1);
  SubsystemShape pair_shape;
  for (int k = 1; k <= n; ++k) {
    sigma_pt = kron(sigma_pt, swap_half);
    pair_shape.append(label_i(k), 2);
    pair_shape.append(label_m(k), 2);
  }
  // Reorder to (m1..mN, i1..iN) to sit at the tail of the full space.
  std::vector<std::string> tail_order;
  for (int k = 1; k <= n; ++k) tail_order.push_back(label_m(k));
  for (int k = 1; k <= n; ++k) tail_order.push_back(label_i(k));
  const ComplexMatrix sigma_tail = reorder_subsystems(sigma_pt, pair_shape, tail_order);

  Variables vars;
  vars.kind = Kind::Parallel;
  vars.n = n;
  vars.sigma = Complex(1.0 / static_cast<double>(Index(1) << n)) *
               ComplexMatrix::identity(Index(1) << n);

  const ComplexMatrix state_part =
      kron(ComplexMatrix::identity(Index(1) << (n + 1)), sigma_tail);
  std::vector<std::string> full_order = full.labels();
  for (int i = 0; i < 2; ++i) {
    // (o-vector, r, m-vector) -> full order (r, o, m), then pad the i factors.
    const ComplexMatrix rp_full = reorder_subsystems(
        kron(r_primed[static_cast<std::size_t>(i)], ComplexMatrix::identity(Index(1) << n)),
        SubsystemShape([&] {
          std::vector<SubsystemFactor> fs;
          for (int k = 1; k <= n; ++k) fs.push_back({label_o(k), 2});
          fs.push_back({"r", 2});
          for (int k = 1; k <= n; ++k) fs.push_back({label_m(k), 2});
          for (int k = 1; k <= n; ++k) fs.push_back({label_i(k), 2});
          return fs;
        }()),
        full_order);
    const ComplexMatrix product = state_part * rp_full;
    std::vector<std::string> keep{"r"};
    for (int k = 1; k <= n; ++k) keep.push_back(label_o(k));
    for (int k = 1; k <= n; ++k) keep.push_back(label_i(k));
    const ComplexMatrix traced = partial_trace(product, full, keep);
    // Factor order after the trace is (r, o1..oN, i1..iN); interleave.
    SubsystemShape traced_shape;
    traced_shape.append("r", 2);
    for (int k = 1; k <= n; ++k) traced_shape.append(label_o(k), 2);
    for (int k = 1; k <= n; ++k) traced_shape.append(label_i(k), 2);
    const ComplexMatrix interleaved =
        reorder_subsystems(traced, traced_shape, net.labels());
    vars.l[static_cast<std::size_t>(i)] = hermitian_part(interleaved.transpose());
  }
  return vars;
}

}  // namespace measlearn::tester
