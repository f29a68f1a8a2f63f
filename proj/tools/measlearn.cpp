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

// Command-line front end: the scheme comparison table, the verification
// suite, asymptotic-exponent fits, twirl cross-checks, and the conic solves,
// each emitting CSV or JSON with the full resolved configuration embedded.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "measlearn/pbt.hpp"
#include "measlearn/pgls.hpp"
#include "measlearn/quantum.hpp"
#include "measlearn/sdp.hpp"
#include "measlearn/tester.hpp"
#include "measlearn/twirl.hpp"

namespace {

using namespace measlearn;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitUsage = 3;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string csv_header_from_config(const json& config) {
  std::ostringstream os;
  for (auto it = config.begin(); it != config.end(); ++it) {
    os << "# " << it.key() << "=" << it.value().dump() << "\n";
  }
  return os.str();
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

struct TableCell {
  std::optional<double> value;
  std::optional<std::string> exact;
  json diagnostics = json::object();
};

int cmd_table(long max_n, const std::vector<std::string>& schemes, bool exact,
              double eps, long max_iter, const std::string& format,
              const std::string& out_path) {
  json config{{"command", "table"}, {"max_n", max_n}, {"schemes", schemes},
              {"exact", exact},     {"eps", eps},     {"max_iter", max_iter},
              {"format", format}};
  bool solver_trouble = false;

  std::vector<std::pair<std::string, std::vector<TableCell>>> rows;
  for (const auto& scheme : schemes) {
    std::vector<TableCell> cells(static_cast<std::size_t>(max_n));
    for (long n = 1; n <= max_n; ++n) {
      TableCell& cell = cells[static_cast<std::size_t>(n - 1)];
      if (scheme == "pgls") {
        cell.value = pgls::avg_fidelity(n);
        if (exact && n <= 40) cell.exact = pgls::avg_fidelity_exact(static_cast<int>(n)).to_string();
      } else if (scheme == "dpbt") {
        cell.value = pbt::dpbt_avg_fidelity_qubit(n);
      } else if (scheme == "ppbt") {
        cell.value = pbt::ppbt_avg_fidelity(n);
        if (exact) cell.exact = pbt::ppbt_avg_fidelity_exact(static_cast<int>(n)).to_string();
      } else if (scheme == "parallel" || scheme == "adaptive") {
        if (n > 3) continue;  // explicitly null beyond the desk-scale cap
        sdp::SolverOptions opts;
        opts.eps = eps;
        opts.max_iter = max_iter;
        const pbt::SchemeReport rep = tester::solve_scheme(
            scheme == "parallel" ? tester::Kind::Parallel : tester::Kind::Adaptive,
            static_cast<int>(n), opts);
        cell.value = rep.value;
        for (const auto& [k, v] : rep.diagnostics) cell.diagnostics[k] = v;
        if (rep.diagnostics.at("converged") != 1.0) solver_trouble = true;
      } else {
        throw CLI::ValidationError("unknown scheme: " + scheme);
      }
    }
    rows.emplace_back(scheme, std::move(cells));
  }

  std::string text;
  if (format == "json") {
    json j{{"config", config}};
    j["rows"] = json::array();
    for (const auto& [scheme, cells] : rows) {
      json jr{{"scheme", scheme}};
      json values = json::array();
      json exacts = json::array();
      json diags = json::array();
      for (const auto& cell : cells) {
        values.push_back(cell.value ? json(*cell.value) : json(nullptr));
        exacts.push_back(cell.exact ? json(*cell.exact) : json(nullptr));
        diags.push_back(cell.diagnostics);
      }
      jr["values"] = values;
      if (exact) jr["exact"] = exacts;
      jr["diagnostics"] = diags;
      j["rows"].push_back(jr);
    }
    text = j.dump(2);
  } else {
    std::ostringstream os;
    os << csv_header_from_config(config);
    os << "scheme";
    for (long n = 1; n <= max_n; ++n) os << ",N=" << n;
    os << "\n";
    for (const auto& [scheme, cells] : rows) {
      os << scheme;
      for (const auto& cell : cells) {
        os << ",";
        if (cell.value) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.4f", round4(*cell.value));
          os << buf;
        }
      }
      os << "\n";
    }
    text = os.str();
  }
  write_output(text, out_path);
  return solver_trouble ? kExitNoConvergence : kExitOk;
}

struct CheckLine {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

void report_check(std::vector<CheckLine>& lines, const std::string& name, bool pass,
                  double residual) {
  lines.push_back({name, pass, residual});
  std::printf("%s  %s  residual=%.3e\n", pass ? "PASS" : "FAIL", name.c_str(), residual);
}

int run_pgls_checks(std::vector<CheckLine>& lines, int max_n, long long fault) {
  // Exact integer/rational identities behind the retrieval effect.
  bool square_ok = true, symmetric_ok = true, generating_ok = true;
  for (int n = 0; n <= max_n; ++n) {
    square_ok = square_ok && pgls::check_s_matrix_square(n, fault);
    symmetric_ok = symmetric_ok && pgls::check_weighted_product_symmetric(n, fault);
  }
  for (int n = 0; n <= std::min(max_n, 10); ++n) {
    for (long long x : {2LL, 3LL, -1LL}) {
      generating_ok = generating_ok && pgls::check_generating_identity(n, x, fault);
    }
  }
  report_check(lines, "s-matrix square identity (exact)", square_ok, 0.0);
  report_check(lines, "weighted-product symmetry (exact)", symmetric_ok, 0.0);
  report_check(lines, "generating-function identity (exact)", generating_ok, 0.0);
  return 0;
}

void run_pgls_numeric_checks(std::vector<CheckLine>& lines) {
  // Retrieval effect is a valid measurement with orthonormal support.
  double worst_gram = 0.0, worst_povm = 0.0;
  bool povm_ok = true;
  for (int n0 = 1; n0 <= 8; ++n0) {
    const pgls::Effect e = pgls::effect(n0);
    const ComplexMatrix gram = e.basis_vectors.adjoint() * e.basis_vectors;
    worst_gram = std::max(worst_gram, (gram - ComplexMatrix::identity(n0)).max_abs());
    Povm povm;
    povm.dim = e.r.rows();
    povm.effects = {e.r, ComplexMatrix::identity(e.r.rows()) - e.r};
    const PovmReport rep = validate_povm(povm, 1e-9);
    povm_ok = povm_ok && rep.pass;
    for (double ev : rep.min_eigenvalues) worst_povm = std::min(worst_povm, ev);
  }
  report_check(lines, "retrieval effect support orthonormal (N0 <= 8)", worst_gram <= 1e-10,
               worst_gram);
  report_check(lines, "retrieval pair is a valid POVM (N0 <= 8)", povm_ok,
               std::abs(worst_povm));

  // Retrieved effect equals N0/(N0+1) P_{U,0} for Haar samples.
  Rng rng(20260810);
  double worst = 0.0;
  for (int n0 = 1; n0 <= 6; ++n0) {
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix u = haar_unitary(2, rng);
      const ComplexMatrix q = pgls::retrieved_effect(u, n0);
      const ComplexMatrix p0 = vn_effects(VonNeumannMeasurement(u)).effects[0];
      const double c = static_cast<double>(n0) / (n0 + 1.0);
      worst = std::max(worst, (q - Complex(c) * p0).max_abs());
    }
  }
  report_check(lines, "retrieved effect closed form (100 Haar, N0 <= 6)", worst <= 1e-10,
               worst);
}

void run_twirl_checks(std::vector<CheckLine>& lines) {
  // Group average of the dephasing Choi operator, d = 2 and 3.
  double worst = 0.0;
  for (Index d : {2L, 3L}) {
    const SubsystemShape shape{{"a", d}, {"b", d}};
    const twirl::PermGroupBasis basis = twirl::gram_basis(2, d);
    const ComplexMatrix jd = dephasing_choi(d).matrix;
    const ComplexMatrix flipped = partial_transpose(jd, shape, "b");
    const ComplexMatrix averaged =
        partial_transpose(twirl::commutant_twirl(flipped, shape, {"a", "b"}, basis), shape, "b");
    const ComplexMatrix vec_id = vectorize(ComplexMatrix::identity(d));
    ComplexMatrix want = ComplexMatrix::identity(d * d) + vec_id * vec_id.adjoint();
    want *= Complex(1.0 / static_cast<double>(d + 1));
    worst = std::max(worst, (averaged - want).max_abs());
  }
  report_check(lines, "dephasing-Choi group average (d = 2, 3)", worst <= 1e-10, worst);

  // Idempotence and invariance on a random Hermitian input.
  Rng rng(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const SubsystemShape shape{{"t1", 2}, {"anc", 2}, {"t2", 2}, {"t3", 2}};
  ComplexMatrix x(16, 16);
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c) x(r, c) = Complex(gauss(rng), gauss(rng));
  x = hermitian_part(x);
  const twirl::PermGroupBasis basis = twirl::gram_basis(3, 2);
  const std::vector<std::string> labels{"t1", "t2", "t3"};
  const ComplexMatrix t = twirl::commutant_twirl(x, shape, labels, basis);
  const double idem = (twirl::commutant_twirl(t, shape, labels, basis) - t).max_abs();
  report_check(lines, "twirl idempotence (3 copies + ancilla)", idem <= 1e-8, idem);
  double inv = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix u = haar_unitary(2, rng);
    const ComplexMatrix g = kron(u, kron(ComplexMatrix::identity(2), kron(u, u)));
    inv = std::max(inv, (g * t - t * g).max_abs());
  }
  report_check(lines, "twirl invariance (50 sampled group elements)", inv <= 1e-8, inv);
}

int cmd_verify(int max_n, bool exact_only, long long fault) {
  std::vector<CheckLine> lines;
  run_pgls_checks(lines, max_n, fault);
  if (!exact_only) {
    run_pgls_numeric_checks(lines);
    run_twirl_checks(lines);
  }
  bool all = true;
  for (const auto& l : lines) all = all && l.pass;
  std::printf("%s (%zu checks)\n", all ? "ALL PASS" : "FAILURES PRESENT", lines.size());
  return all ? kExitOk : kExitVerifyFail;
}

int cmd_asymptotics(const std::vector<std::string>& schemes, long from, long to,
                    const std::string& format, const std::string& out_path) {
  json config{{"command", "asymptotics"}, {"schemes", schemes}, {"from", from},
              {"to", to},                 {"format", format}};
  const std::vector<long> grid = pbt::integer_range(from, to);

  json jrows = json::array();
  std::ostringstream csv;
  csv << csv_header_from_config(config);
  csv << "scheme,slope,intercept\n";
  std::ostringstream points;
  points << "scheme,n,one_minus_f\n";
  for (const auto& scheme : schemes) {
    std::function<double(long)> f;
    if (scheme == "dpbt") f = [](long n) { return pbt::dpbt_avg_fidelity_qubit(n); };
    else if (scheme == "pgls") f = [](long n) { return pgls::avg_fidelity(n); };
    else if (scheme == "ppbt") f = [](long n) { return pbt::ppbt_avg_fidelity(n); };
    else throw CLI::ValidationError("unknown scheme: " + scheme);
    const pbt::SlopeFit fit = pbt::slope_fit(f, grid);
    csv << scheme << "," << fit.slope << "," << fit.intercept << "\n";
    json jp = json::array();
    for (long n : grid) {
      const double deficit = 1.0 - f(n);
      points << scheme << "," << n << "," << deficit << "\n";
      jp.push_back({{"n", n}, {"one_minus_f", deficit}});
    }
    jrows.push_back({{"scheme", scheme},
                     {"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"points", jp}});
  }
  std::string text;
  if (format == "json") {
    text = json{{"config", config}, {"fits", jrows}}.dump(2);
  } else {
    text = csv.str() + points.str();
  }
  write_output(text, out_path);
  return kExitOk;
}

int cmd_twirl_check(int n, long samples, unsigned long long seed, const std::string& format,
                    const std::string& out_path) {
  json config{{"command", "twirl-check"}, {"n", n}, {"samples", samples},
              {"seed", seed},             {"format", format}};
  const twirl::TwirledObjective obj = twirl::objective_operator(n);

  Rng rng(seed);
  ComplexMatrix head(2, 2);
  head(0, 0) = 1.0;
  ComplexMatrix x = head;
  for (int k = 0; k < n; ++k) x = kron(x, dephasing_choi(2).matrix);
  const ComplexMatrix mc = twirl::mc_twirl(
      x, [&](const ComplexMatrix& u) { return twirl::objective_group_element(n, u); }, 2,
      samples, rng);
  const double spec = spectral_norm_hermitian(hermitian_part(mc - obj.omega[0]));

  double inv = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix g = twirl::objective_group_element(n, haar_unitary(2, rng));
    inv = std::max(inv, (g * obj.omega[0] - obj.omega[0] * g).max_abs());
  }

  // Re-twirling the already-averaged operator must leave it fixed.
  const twirl::PermGroupBasis basis = twirl::gram_basis(n + 1, 2);
  std::vector<std::string> labels{"r"};
  for (int k = 1; k <= n; ++k) labels.push_back("i" + std::to_string(k));
  const ComplexMatrix y = {{0.0, 1.0}, {-1.0, 0.0}};
  ComplexMatrix rot = ComplexMatrix::identity(2);
  for (int k = 0; k < n; ++k) rot = kron(rot, kron(ComplexMatrix::identity(2), y));
  const ComplexMatrix inner = rot.adjoint() * obj.omega[0] * rot;
  const ComplexMatrix re_twirled =
      rot * twirl::commutant_twirl(inner, obj.shape, labels, basis) * rot.adjoint();
  const double idem = (re_twirled - obj.omega[0]).max_abs();

  json j{{"config", config},
         {"exact_vs_mc_specnorm", spec},
         {"invariance_residual", inv},
         {"idempotence_residual", idem}};
  write_output(format == "csv" ? csv_header_from_config(config) +
                                     "exact_vs_mc_specnorm,invariance_residual,idempotence_residual\n" +
                                     std::to_string(spec) + "," + std::to_string(inv) + "," +
                                     std::to_string(idem) + "\n"
                               : j.dump(2),
               out_path);
  return kExitOk;
}

int cmd_sdp(const std::string& kind, int n, double eps, long max_iter, bool allow_large,
            long log_every, const std::string& dump_vars, const std::string& format,
            const std::string& out_path) {
  json config{{"command", "sdp"}, {"kind", kind},         {"n", n},
              {"eps", eps},       {"max_iter", max_iter}, {"format", format}};
  sdp::SolverOptions opts;
  opts.eps = eps;
  opts.max_iter = max_iter;
  opts.log_every = log_every;
  const auto [report, vars] = tester::solve_scheme_full(
      kind == "parallel" ? tester::Kind::Parallel : tester::Kind::Adaptive, n, opts,
      allow_large);

  json j{{"config", config}, {"scheme", kind}, {"n", n}, {"value", report.value}};
  for (const auto& [k, v] : report.diagnostics) j[k] = v;
  const tester::Feasibility feas = tester::feasibility(vars);
  j["network_normalization_error"] = feas.normalization_error;
  j["network_min_eigenvalue"] = feas.min_eigenvalue;

  if (!dump_vars.empty()) {
    json dump{{"config", config}};
    dump["l0"] = json::parse(matrix_to_json_text(vars.l[0]));
    dump["l1"] = json::parse(matrix_to_json_text(vars.l[1]));
    if (vars.kind == tester::Kind::Parallel) {
      dump["sigma"] = json::parse(matrix_to_json_text(vars.sigma));
    } else {
      dump["gammas"] = json::array();
      for (const auto& g : vars.gammas) {
        dump["gammas"].push_back(json::parse(matrix_to_json_text(g)));
      }
    }
    std::ofstream f(dump_vars);
    if (!f) throw std::runtime_error("cannot open dump file: " + dump_vars);
    f << dump.dump();
  }

  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << csv_header_from_config(config);
    os << "kind,n,value,primal_residual,dual_residual,converged\n";
    os << kind << "," << n << "," << report.value << ","
       << report.diagnostics.at("primal_residual") << ","
       << report.diagnostics.at("dual_residual") << ","
       << report.diagnostics.at("converged") << "\n";
    text = os.str();
  } else {
    text = j.dump(2);
  }
  write_output(text, out_path);
  return report.diagnostics.at("converged") == 1.0 ? kExitOk : kExitNoConvergence;
}

int cmd_pgls_avg(long n, bool exact, const std::string& format, const std::string& out_path) {
  json config{{"command", "pgls avg"}, {"n", n}, {"exact", exact}, {"format", format}};
  json j{{"config", config}, {"value", pgls::avg_fidelity(n)}};
  if (exact && n <= 40) j["exact"] = pgls::avg_fidelity_exact(static_cast<int>(n)).to_string();
  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << csv_header_from_config(config) << "n,value\n"
       << n << "," << pgls::avg_fidelity(n) << "\n";
    text = os.str();
  } else {
    text = j.dump(2);
  }
  write_output(text, out_path);
  return kExitOk;
}

int cmd_pgls_simulate(int n, long samples, unsigned long long seed, const std::string& format,
                      const std::string& out_path) {
  json config{{"command", "pgls simulate"}, {"n", n}, {"samples", samples},
              {"seed", seed},               {"format", format}};
  Rng rng(seed);
  const ComplexMatrix u = haar_unitary(2, rng);
  double sum = 0.0, sum_sq = 0.0;
  std::vector<long> majority_histogram(static_cast<std::size_t>(n + 1), 0);
  for (long s = 0; s < samples; ++s) {
    const pgls::SimulationResult res = pgls::simulate(u, n, rng);
    sum += res.record.fidelity;
    sum_sq += res.record.fidelity * res.record.fidelity;
    ++majority_histogram[static_cast<std::size_t>(res.record.n_major)];
  }
  const double mean = sum / static_cast<double>(samples);
  double std_error = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(samples)) /
                                         static_cast<double>(samples - 1));
    std_error = std::sqrt(var / static_cast<double>(samples));
  }
  json j{{"config", config},
         {"mean", mean},
         {"std_error", std_error},
         {"closed_form", pgls::avg_fidelity(n)},
         {"majority_histogram", majority_histogram}};
  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << csv_header_from_config(config) << "mean,std_error,closed_form\n"
       << mean << "," << std_error << "," << pgls::avg_fidelity(n) << "\n";
    text = os.str();
  } else {
    text = j.dump(2);
  }
  write_output(text, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for storage and retrieval of projective measurements"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "Output path (default: stdout)");

  // table
  auto* table = app.add_subcommand("table", "Average-fidelity comparison table");
  long table_max_n = 5;
  std::vector<std::string> table_schemes{"pgls", "dpbt", "ppbt"};
  bool table_exact = false;
  double table_eps = 1e-6;
  long table_max_iter = 200000;
  table->add_option("--max-n", table_max_n, "Largest number of uses")->check(CLI::Range(1L, 64L));
  table->add_option("--schemes", table_schemes, "Schemes (pgls,dpbt,ppbt,parallel,adaptive)")
      ->delimiter(',');
  table->add_flag("--exact", table_exact, "Include exact rationals where closed form allows");
  table->add_option("--eps", table_eps, "Solver tolerance for SDP cells");
  table->add_option("--max-iter", table_max_iter, "Solver iteration cap");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  int verify_max_n = 12;
  bool verify_exact = false;
  bool inject_fault = false;
  verify->add_option("--max-n", verify_max_n, "Largest index for the exact identities")
      ->check(CLI::Range(0, 12));
  verify->add_flag("--exact", verify_exact, "Run only the exact integer/rational checks");
  verify->add_flag("--inject-s-fault", inject_fault,
                   "Perturb the binomial convolution by +1 (fault-injection self test)")
      ->group("");

  // asymptotics
  auto* asym = app.add_subcommand("asymptotics", "Fit the fidelity-deficit exponent");
  std::vector<std::string> asym_schemes{"dpbt", "pgls", "ppbt"};
  long asym_from = 64, asym_to = 1024;
  asym->add_option("--scheme,--schemes", asym_schemes, "Schemes (dpbt,pgls,ppbt)")->delimiter(',');
  asym->add_option("--from", asym_from, "Smallest N")->check(CLI::Range(2L, 1000000L));
  asym->add_option("--to", asym_to, "Largest N")->check(CLI::Range(2L, 1000000L));

  // twirl-check
  auto* twirl_check = app.add_subcommand("twirl-check", "Exact vs Monte-Carlo group average");
  int tc_n = 1;
  long tc_samples = 100000;
  unsigned long long tc_seed = 0;
  twirl_check->add_option("--n", tc_n, "Number of uses")->check(CLI::Range(1, 4));
  twirl_check->add_option("--samples", tc_samples, "Monte-Carlo samples")
      ->check(CLI::Range(1L, 100000000L));
  twirl_check->add_option("--seed", tc_seed, "Random seed");

  // sdp
  auto* sdp_cmd = app.add_subcommand("sdp", "Solve the optimal learning network");
  std::string sdp_kind = "parallel";
  int sdp_n = 1;
  double sdp_eps = 1e-6;
  long sdp_max_iter = 200000;
  bool sdp_allow_large = false;
  long sdp_log_every = 0;
  std::string sdp_dump;
  sdp_cmd->add_option("--kind", sdp_kind, "parallel or adaptive")
      ->check(CLI::IsMember({"parallel", "adaptive"}));
  sdp_cmd->add_option("--n", sdp_n, "Number of uses")->check(CLI::Range(1, 4));
  sdp_cmd->add_option("--eps", sdp_eps, "Residual tolerance");
  sdp_cmd->add_option("--max-iter", sdp_max_iter, "Iteration cap");
  sdp_cmd->add_flag("--allow-large", sdp_allow_large, "Permit the slow N = 4 solve");
  sdp_cmd->add_option("--log-every", sdp_log_every, "Print residuals every k iterations");
  sdp_cmd->add_option("--dump-vars", sdp_dump, "Write the solution network to a JSON file");

  // pgls
  auto* pgls_cmd = app.add_subcommand("pgls", "Entangled-pair majority-vote scheme");
  pgls_cmd->require_subcommand(1);
  auto* pgls_avg = pgls_cmd->add_subcommand("avg", "Closed-form average fidelity");
  long pa_n = 1;
  bool pa_exact = false;
  pgls_avg->add_option("--n", pa_n, "Number of uses")->check(CLI::Range(1L, 1000000L));
  pgls_avg->add_flag("--exact", pa_exact, "Also print the exact rational");
  auto* pgls_sim = pgls_cmd->add_subcommand("simulate", "Stochastic runs of the scheme");
  int ps_n = 1;
  long ps_samples = 10000;
  unsigned long long ps_seed = 0;
  pgls_sim->add_option("--n", ps_n, "Number of uses")->check(CLI::Range(1, 64));
  pgls_sim->add_option("--samples", ps_samples, "Number of runs")->check(CLI::Range(1L, 100000000L));
  pgls_sim->add_option("--seed", ps_seed, "Random seed");
  auto* pgls_verify = pgls_cmd->add_subcommand("verify", "Exact identities of the retrieval");
  int pv_max_n = 12;
  pgls_verify->add_option("--max-n", pv_max_n, "Largest index")->check(CLI::Range(0, 12));

  // pbt
  auto* pbt_cmd = app.add_subcommand("pbt", "Teleportation-based schemes");
  pbt_cmd->require_subcommand(1);
  auto* pbt_dpbt = pbt_cmd->add_subcommand("dpbt", "Deterministic scheme closed form");
  long pd_n = 1;
  pbt_dpbt->add_option("--n", pd_n, "Number of ports")->check(CLI::Range(1L, 1000000L));
  auto* pbt_ppbt = pbt_cmd->add_subcommand("ppbt", "Heralded scheme closed form");
  long pp_n = 1;
  pbt_ppbt->add_option("--n", pp_n, "Number of ports")->check(CLI::Range(1L, 1000000L));

  try {
    app.parse(argc, argv);

    if (*table) {
      return cmd_table(table_max_n, table_schemes, table_exact, table_eps, table_max_iter,
                       format, out_path);
    }
    if (*verify) {
      return cmd_verify(verify_max_n, verify_exact, inject_fault ? 1 : 0);
    }
    if (*asym) {
      return cmd_asymptotics(asym_schemes, asym_from, asym_to, format, out_path);
    }
    if (*twirl_check) {
      return cmd_twirl_check(tc_n, tc_samples, tc_seed, format, out_path);
    }
    if (*sdp_cmd) {
      return cmd_sdp(sdp_kind, sdp_n, sdp_eps, sdp_max_iter, sdp_allow_large, sdp_log_every,
                     sdp_dump, format, out_path);
    }
    if (*pgls_cmd) {
      if (*pgls_avg) return cmd_pgls_avg(pa_n, pa_exact, format, out_path);
      if (*pgls_sim) return cmd_pgls_simulate(ps_n, ps_samples, ps_seed, format, out_path);
      if (*pgls_verify) {
        std::vector<CheckLine> lines;
        run_pgls_checks(lines, pv_max_n, 0);
        run_pgls_numeric_checks(lines);
        bool all = true;
        for (const auto& l : lines) all = all && l.pass;
        std::printf("%s (%zu checks)\n", all ? "ALL PASS" : "FAILURES PRESENT", lines.size());
        return all ? kExitOk : kExitVerifyFail;
      }
    }
    if (*pbt_cmd) {
      json config{{"command", *pbt_dpbt ? "pbt dpbt" : "pbt ppbt"},
                  {"n", *pbt_dpbt ? pd_n : pp_n},
                  {"format", format}};
      json j{{"config", config}};
      if (*pbt_dpbt) {
        j["teleportation_fidelity"] = pbt::dpbt_entanglement_fidelity_qubit(pd_n);
        j["value"] = pbt::dpbt_avg_fidelity_qubit(pd_n);
      } else {
        j["success_probability"] = pbt::ppbt_success_probability(pp_n);
        j["value"] = pbt::ppbt_avg_fidelity(pp_n);
        j["exact"] = pbt::ppbt_avg_fidelity_exact(static_cast<int>(pp_n)).to_string();
      }
      write_output(j.dump(2), out_path);
      return kExitOk;
    }
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
