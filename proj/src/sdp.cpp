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

#include <Eigen/Dense>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace measlearn::sdp {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

/// Per-block layout of the real coordinates of a Hermitian matrix:
/// n diagonal slots, then (sqrt2*Re, sqrt2*Im) per upper off-diagonal entry
/// in row-major order. The map is an isometry for the Hilbert-Schmidt
/// inner product, so <A, X> = vec(A) . vec(X).
struct BlockLayout {
  Index dim = 0;
  long offset = 0;  // position of this block in the global vector
  long span = 0;    // dim * dim real coordinates
  Cone cone = Cone::Psd;

  long diag_slot(Index p) const { return offset + p; }
  long off_slot(Index p, Index q) const {  // p < q, returns the Re slot
    const long ut = static_cast<long>(p) * (2 * dim - p - 1) / 2 + (q - p - 1);
    return offset + dim + 2 * ut;
  }
};

void vec_hermitian(const ComplexMatrix& x, const BlockLayout& layout,
                   std::vector<double>& out) {
  const Index n = layout.dim;
  for (Index p = 0; p < n; ++p) {
    out[static_cast<std::size_t>(layout.diag_slot(p))] = x(p, p).real();
  }
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      const long slot = layout.off_slot(p, q);
      out[static_cast<std::size_t>(slot)] = kSqrt2 * x(p, q).real();
      out[static_cast<std::size_t>(slot) + 1] = kSqrt2 * x(p, q).imag();
    }
  }
}

ComplexMatrix unvec_hermitian(const std::vector<double>& v, const BlockLayout& layout) {
  const Index n = layout.dim;
  ComplexMatrix x(n, n);
  for (Index p = 0; p < n; ++p) {
    x(p, p) = v[static_cast<std::size_t>(layout.diag_slot(p))];
  }
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      const long slot = layout.off_slot(p, q);
      const Complex val(v[static_cast<std::size_t>(slot)] / kSqrt2,
                        v[static_cast<std::size_t>(slot) + 1] / kSqrt2);
      x(p, q) = val;
      x(q, p) = std::conj(val);
    }
  }
  return x;
}

struct SparseRow {
  std::vector<std::pair<long, double>> entries;
  double rhs = 0.0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

int ConicProblem::add_block(const std::string& name, Index dim, Cone cone) {
  if (dim < 1) throw std::invalid_argument("block dimension must be positive");
  blocks_.push_back({name, dim, cone});
  objectives_.emplace_back();
  return static_cast<int>(blocks_.size()) - 1;
}

void ConicProblem::set_objective(int block, ComplexMatrix c) {
  if (block < 0 || block >= static_cast<int>(blocks_.size())) {
    throw std::invalid_argument("set_objective: unknown block");
  }
  const Index dim = blocks_[static_cast<std::size_t>(block)].dim;
  if (c.rows() != dim || c.cols() != dim || !c.is_hermitian(1e-10)) {
    throw std::invalid_argument("objective matrix must be Hermitian of the block dimension");
  }
  objectives_[static_cast<std::size_t>(block)] = std::move(c);
}

void ConicProblem::add_constraint(std::vector<ConstraintTerm> terms, double rhs) {
  for (const auto& t : terms) {
    if (t.block < 0 || t.block >= static_cast<int>(blocks_.size())) {
      throw std::invalid_argument("constraint term names an unknown block");
    }
    const Index dim = blocks_[static_cast<std::size_t>(t.block)].dim;
    if (t.row < 0 || t.col < t.row || t.col >= dim) {
      throw std::invalid_argument("constraint term indices must satisfy 0 <= row <= col < dim");
    }
    if (t.row == t.col && t.value.imag() != 0.0) {
      throw std::invalid_argument("diagonal constraint entries must be real");
    }
  }
  constraints_.push_back({std::move(terms), rhs});
}

ComplexMatrix hermitian_embed(const ComplexMatrix& x) {
  if (!x.is_hermitian(1e-10)) {
    throw std::invalid_argument("hermitian_embed requires a Hermitian matrix");
  }
  const Index n = x.rows();
  ComplexMatrix out(2 * n, 2 * n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      const double re = x(r, c).real();
      const double im = x(r, c).imag();
      out(r, c) = re;
      out(r, c + n) = -im;
      out(r + n, c) = im;
      out(r + n, c + n) = re;
    }
  }
  return out;
}

SolverResult solve(const ConicProblem& problem, const SolverOptions& options) {
  const auto& blocks = problem.blocks();
  if (blocks.empty()) throw std::invalid_argument("solve: problem has no blocks");

  // Layouts and the global coordinate count.
  std::vector<BlockLayout> layouts;
  long total = 0;
  for (const auto& b : blocks) {
    BlockLayout l;
    l.dim = b.dim;
    l.offset = total;
    l.span = static_cast<long>(b.dim) * b.dim;
    l.cone = b.cone;
    layouts.push_back(l);
    total += l.span;
  }

  // Objective vector.
  std::vector<double> c(static_cast<std::size_t>(total), 0.0);
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const ComplexMatrix& cb = problem.objectives()[bi];
    if (cb.rows() > 0) vec_hermitian(cb, layouts[bi], c);
  }

  // Constraint rows in global coordinates, normalized to unit length.
  std::vector<SparseRow> rows;
  rows.reserve(problem.constraints().size());
  for (const auto& con : problem.constraints()) {
    SparseRow row;
    row.rhs = con.rhs;
    for (const auto& t : con.terms) {
      const BlockLayout& l = layouts[static_cast<std::size_t>(t.block)];
      if (t.row == t.col) {
        row.entries.emplace_back(l.diag_slot(t.row), t.value.real());
      } else {
        const long slot = l.off_slot(t.row, t.col);
        if (t.value.real() != 0.0) row.entries.emplace_back(slot, kSqrt2 * t.value.real());
        if (t.value.imag() != 0.0) row.entries.emplace_back(slot + 1, kSqrt2 * t.value.imag());
      }
    }
    double nrm = 0.0;
    for (const auto& [slot, v] : row.entries) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      if (std::abs(row.rhs) > 0.0) {
        throw std::invalid_argument("constraint with empty left-hand side and nonzero rhs");
      }
      continue;
    }
    const double inv = 1.0 / nrm;
    for (auto& [slot, v] : row.entries) v *= inv;
    row.rhs *= inv;
    rows.push_back(std::move(row));
  }
  const long m = static_cast<long>(rows.size());

  std::vector<double> b_vec(static_cast<std::size_t>(m));
  for (long j = 0; j < m; ++j) b_vec[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j)].rhs;
  const double b_norm = norm(b_vec);

  const auto apply_a = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (long j = 0; j < m; ++j) {
      double s = 0.0;
      for (const auto& [slot, val] : rows[static_cast<std::size_t>(j)].entries) {
        s += val * v[static_cast<std::size_t>(slot)];
      }
      out[static_cast<std::size_t>(j)] = s;
    }
  };
  const auto apply_at = [&](const std::vector<double>& lam, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (long j = 0; j < m; ++j) {
      const double lj = lam[static_cast<std::size_t>(j)];
      if (lj == 0.0) continue;
      for (const auto& [slot, val] : rows[static_cast<std::size_t>(j)].entries) {
        out[static_cast<std::size_t>(slot)] += val * lj;
      }
    }
  };

  // Conjugate gradients on A A^T, warm-started across iterations.
  std::vector<double> lambda(static_cast<std::size_t>(m), 0.0);
  std::vector<double> cg_r(static_cast<std::size_t>(m)), cg_p(static_cast<std::size_t>(m)),
      cg_ap(static_cast<std::size_t>(m));
  std::vector<double> scratch_n(static_cast<std::size_t>(total));
  const auto apply_aat = [&](const std::vector<double>& lam, std::vector<double>& out) {
    apply_at(lam, scratch_n);
    apply_a(scratch_n, out);
  };
  const auto solve_aat = [&](const std::vector<double>& rhs) {
    // residual r = rhs - AA^T lambda
    apply_aat(lambda, cg_r);
    for (long j = 0; j < m; ++j) {
      cg_r[static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(j)] - cg_r[static_cast<std::size_t>(j)];
    }
    const double rhs_norm = norm(rhs);
    const double tol = std::max(1e-14, 1e-12 * rhs_norm);
    double rr = dot(cg_r, cg_r);
    if (std::sqrt(rr) <= tol) return;
    cg_p = cg_r;
    for (long it = 0; it < 4 * m + 100; ++it) {
      apply_aat(cg_p, cg_ap);
      const double pap = dot(cg_p, cg_ap);
      if (pap <= 1e-300) break;  // stagnation on a singular system
      const double step = rr / pap;
      for (long j = 0; j < m; ++j) {
        lambda[static_cast<std::size_t>(j)] += step * cg_p[static_cast<std::size_t>(j)];
        cg_r[static_cast<std::size_t>(j)] -= step * cg_ap[static_cast<std::size_t>(j)];
      }
      const double rr_new = dot(cg_r, cg_r);
      if (std::sqrt(rr_new) <= tol) break;
      const double beta = rr_new / rr;
      rr = rr_new;
      for (long j = 0; j < m; ++j) {
        cg_p[static_cast<std::size_t>(j)] =
            cg_r[static_cast<std::size_t>(j)] + beta * cg_p[static_cast<std::size_t>(j)];
      }
    }
  };

  // Projection of v onto {A x = b}: v - A^T lambda with AA^T lambda = A v - b.
  std::vector<double> av(static_cast<std::size_t>(m));
  const auto project_affine = [&](std::vector<double>& v) {
    if (m == 0) return;
    apply_a(v, av);
    for (long j = 0; j < m; ++j) {
      av[static_cast<std::size_t>(j)] -= b_vec[static_cast<std::size_t>(j)];
    }
    solve_aat(av);
    apply_at(lambda, scratch_n);
    for (long i = 0; i < total; ++i) {
      v[static_cast<std::size_t>(i)] -= scratch_n[static_cast<std::size_t>(i)];
    }
  };

  // Cone projection block by block through the real symmetric embedding.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  const auto project_cone = [&](std::vector<double>& v) {
    for (const auto& l : layouts) {
      if (l.cone == Cone::Free) continue;
      const Index n = l.dim;
      const ComplexMatrix x = unvec_hermitian(v, l);
      const ComplexMatrix e = hermitian_embed(x);
      Eigen::MatrixXd em(2 * n, 2 * n);
      for (Index r = 0; r < 2 * n; ++r)
        for (Index cidx = 0; cidx < 2 * n; ++cidx) em(r, cidx) = e(r, cidx).real();
      eig.compute(em);
      const auto& w = eig.eigenvalues();
      const auto& vv = eig.eigenvectors();
      Eigen::MatrixXd plus = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      for (Index k = 0; k < 2 * n; ++k) {
        if (w(k) <= 0.0) continue;
        plus.noalias() += w(k) * vv.col(k) * vv.col(k).transpose();
      }
      ComplexMatrix xp(n, n);
      for (Index r = 0; r < n; ++r) {
        for (Index cidx = 0; cidx < n; ++cidx) {
          const double re = 0.5 * (plus(r, cidx) + plus(r + n, cidx + n));
          const double im = 0.5 * (plus(r + n, cidx) - plus(r, cidx + n));
          xp(r, cidx) = Complex(re, im);
        }
      }
      vec_hermitian(xp, l, v);
    }
  };

  // ADMM state.
  std::vector<double> x(static_cast<std::size_t>(total), 0.0);
  std::vector<double> z(static_cast<std::size_t>(total), 0.0);
  std::vector<double> u(static_cast<std::size_t>(total), 0.0);
  std::vector<double> z_prev(static_cast<std::size_t>(total), 0.0);
  std::vector<double> xh(static_cast<std::size_t>(total), 0.0);

  double rho = options.rho;
  long iter = 0;
  bool converged = false;
  double pri = 0.0, dua = 0.0;

  for (iter = 1; iter <= options.max_iter; ++iter) {
    // x-update: affine projection of z - u + c/rho.
    for (long i = 0; i < total; ++i) {
      x[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] -
                                       u[static_cast<std::size_t>(i)] +
                                       c[static_cast<std::size_t>(i)] / rho;
    }
    project_affine(x);

    // Over-relaxation, cone projection, dual ascent.
    z_prev = z;
    for (long i = 0; i < total; ++i) {
      xh[static_cast<std::size_t>(i)] = options.alpha * x[static_cast<std::size_t>(i)] +
                                        (1.0 - options.alpha) * z[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(i)] = xh[static_cast<std::size_t>(i)] + u[static_cast<std::size_t>(i)];
    }
    project_cone(z);
    for (long i = 0; i < total; ++i) {
      u[static_cast<std::size_t>(i)] += xh[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
    }

    // Scaled residuals.
    double diff_xz = 0.0, diff_zz = 0.0, nx = 0.0, nz = 0.0, nu = 0.0;
    for (long i = 0; i < total; ++i) {
      const double dxz = x[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
      const double dzz = z[static_cast<std::size_t>(i)] - z_prev[static_cast<std::size_t>(i)];
      diff_xz += dxz * dxz;
      diff_zz += dzz * dzz;
      nx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      nz += z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
      nu += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    }
    pri = std::sqrt(diff_xz) / std::max(1.0, std::sqrt(std::max(nx, nz)));
    dua = rho * std::sqrt(diff_zz) / std::max(1.0, rho * std::sqrt(nu));

    if (options.log_every > 0 && iter % options.log_every == 0) {
      std::fprintf(stderr, "iter %6ld  pri %.3e  dual %.3e  rho %.2e\n", iter, pri, dua, rho);
    }
    if (pri <= options.eps && dua <= options.eps) {
      // Both splitting residuals are small; accept only if the returned
      // iterate actually satisfies the affine constraints (an infeasible
      // problem stalls on the least-squares compromise instead).
      double viol = 0.0;
      if (m > 0) {
        apply_a(z, av);
        for (long j = 0; j < m; ++j) {
          const double dj = av[static_cast<std::size_t>(j)] - b_vec[static_cast<std::size_t>(j)];
          viol += dj * dj;
        }
        viol = std::sqrt(viol) / (1.0 + b_norm);
      }
      if (viol <= 10.0 * options.eps) {
        converged = true;
        break;
      }
    }
    if (options.adaptive_rho && iter % 100 == 0) {
      if (pri > 10.0 * dua && rho < 1e6) {
        rho *= 2.0;
        for (auto& ui : u) ui *= 0.5;
      } else if (dua > 10.0 * pri && rho > 1e-6) {
        rho *= 0.5;
        for (auto& ui : u) ui *= 2.0;
      }
    }
  }
  if (iter > options.max_iter) iter = options.max_iter;

  SolverResult result;
  result.iterations = iter;
  result.converged = converged;
  result.rho_final = rho;
  result.dual_residual = dua;

  // Report from the returned (cone-feasible) solution z.
  if (m > 0) {
    apply_a(z, av);
    double viol = 0.0;
    for (long j = 0; j < m; ++j) {
      const double d = av[static_cast<std::size_t>(j)] - b_vec[static_cast<std::size_t>(j)];
      viol += d * d;
    }
    result.primal_residual = std::sqrt(viol) / (1.0 + b_norm);
  }
  const double val_z = dot(c, z);
  const double val_x = dot(c, x);
  result.value = val_z;
  result.gap = (val_x - val_z) / (1.0 + std::abs(val_z));

  for (const auto& l : layouts) {
    result.solutions.push_back(unvec_hermitian(z, l));
  }
  return result;
}

std::string problem_to_json(const ConicProblem& problem) {
  nlohmann::json j;
  j["blocks"] = nlohmann::json::array();
  for (const auto& b : problem.blocks()) {
    j["blocks"].push_back({{"name", b.name},
                           {"dim", b.dim},
                           {"cone", b.cone == Cone::Psd ? "psd" : "free"}});
  }
  j["objectives"] = nlohmann::json::array();
  for (const auto& c : problem.objectives()) {
    nlohmann::json jc;
    jc["rows"] = c.rows();
    jc["cols"] = c.cols();
    std::vector<double> re, im;
    for (Index i = 0; i < c.size(); ++i) {
      re.push_back(c.data()[i].real());
      im.push_back(c.data()[i].imag());
    }
    jc["re"] = re;
    jc["im"] = im;
    j["objectives"].push_back(jc);
  }
  j["constraints"] = nlohmann::json::array();
  for (const auto& con : problem.constraints()) {
    nlohmann::json jc;
    jc["rhs"] = con.rhs;
    jc["terms"] = nlohmann::json::array();
    for (const auto& t : con.terms) {
      jc["terms"].push_back({{"block", t.block},
                             {"row", t.row},
                             {"col", t.col},
                             {"re", t.value.real()},
                             {"im", t.value.imag()}});
    }
    j["constraints"].push_back(jc);
  }
  return j.dump();
}

ConicProblem problem_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ConicProblem p;
  for (const auto& jb : j.at("blocks")) {
    p.add_block(jb.at("name").get<std::string>(), jb.at("dim").get<Index>(),
                jb.at("cone").get<std::string>() == "psd" ? Cone::Psd : Cone::Free);
  }
  const auto& jobj = j.at("objectives");
  for (std::size_t bi = 0; bi < jobj.size(); ++bi) {
    const Index rows = jobj[bi].at("rows").get<Index>();
    const Index cols = jobj[bi].at("cols").get<Index>();
    if (rows == 0) continue;
    const auto re = jobj[bi].at("re").get<std::vector<double>>();
    const auto im = jobj[bi].at("im").get<std::vector<double>>();
    ComplexMatrix c(rows, cols);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = Complex(re[static_cast<std::size_t>(i)], im[static_cast<std::size_t>(i)]);
    p.set_objective(static_cast<int>(bi), std::move(c));
  }
  for (const auto& jc : j.at("constraints")) {
    std::vector<ConstraintTerm> terms;
    for (const auto& jt : jc.at("terms")) {
      terms.push_back({jt.at("block").get<int>(), jt.at("row").get<Index>(),
                       jt.at("col").get<Index>(),
                       Complex(jt.at("re").get<double>(), jt.at("im").get<double>())});
    }
    p.add_constraint(std::move(terms), jc.at("rhs").get<double>());
  }
  return p;
}

std::string result_to_json(const SolverResult& result) {
  nlohmann::json j;
  j["value"] = result.value;
  j["primal_residual"] = result.primal_residual;
  j["dual_residual"] = result.dual_residual;
  j["gap"] = result.gap;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["rho_final"] = result.rho_final;
  return j.dump();
}

}  // namespace measlearn::sdp
