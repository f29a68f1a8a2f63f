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

#include "measlearn/pbt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace measlearn::pbt {

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::Pgls: return "pgls";
    case SchemeId::Dpbt: return "dpbt";
    case SchemeId::Ppbt: return "ppbt";
    case SchemeId::ParallelSdp: return "parallel";
    case SchemeId::AdaptiveSdp: return "adaptive";
  }
  return "unknown";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::MonteCarlo: return "monte-carlo";
    case Method::Sdp: return "sdp";
  }
  return "unknown";
}

double dpbt_entanglement_fidelity_qubit(long n) {
  if (n < 1) throw std::invalid_argument("dpbt fidelity: requires N >= 1");
  const double c = std::cos(std::numbers::pi / static_cast<double>(n + 2));
  return c * c;
}

double dpbt_avg_fidelity(int d, double f_star) {
  if (d < 2) throw std::invalid_argument("dpbt_avg_fidelity: requires d >= 2");
  if (f_star < 0.0 || f_star > 1.0) {
    throw std::invalid_argument("dpbt_avg_fidelity: f_star must lie in [0, 1]");
  }
  const double dd = static_cast<double>(d);
  return 1.0 / (dd + 1.0) + dd / (dd + 1.0) * f_star;
}

double dpbt_avg_fidelity_qubit(long n) {
  return dpbt_avg_fidelity(2, dpbt_entanglement_fidelity_qubit(n));
}

double ppbt_success_probability(long n) {
  if (n < 1) throw std::invalid_argument("ppbt probability: requires N >= 1");
  return static_cast<double>(n) / static_cast<double>(n + 3);
}

Rational ppbt_success_probability_exact(int n) {
  if (n < 1) throw std::invalid_argument("ppbt probability: requires N >= 1");
  return Rational(n, n + 3);
}

double ppbt_avg_fidelity(long n) {
  if (n < 1) throw std::invalid_argument("ppbt fidelity: requires N >= 1");
  return static_cast<double>(2 * n + 3) / static_cast<double>(2 * n + 6);
}

Rational ppbt_avg_fidelity_exact(int n) {
  if (n < 1) throw std::invalid_argument("ppbt fidelity: requires N >= 1");
  return Rational(2 * n + 3, 2 * n + 6);
}

Povm mixture_povm(const ComplexMatrix& u, double p0) {
  if (p0 < 0.0 || p0 > 1.0) {
    throw std::invalid_argument("mixture_povm: weight must lie in [0, 1]");
  }
  const Povm vn = vn_effects(VonNeumannMeasurement(u));
  const Povm flat = depolarize_effects(vn.dim);
  Povm out;
  out.dim = vn.dim;
  for (std::size_t i = 0; i < vn.effects.size(); ++i) {
    out.effects.push_back(Complex(p0) * vn.effects[i] +
                          Complex(1.0 - p0) * flat.effects[i]);
  }
  return out;
}

SlopeFit slope_fit(const std::function<double(long)>& avg_fidelity,
                   const std::vector<long>& n_values) {
  if (n_values.size() < 2) {
    throw std::invalid_argument("slope_fit: need at least two points");
  }
  std::vector<double> xs, ys;
  for (long n : n_values) {
    const double f = avg_fidelity(n);
    if (f >= 1.0) {
      throw std::invalid_argument("slope_fit: fidelity must stay below 1");
    }
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(1.0 - f));
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("slope_fit: degenerate range (zero variance)");
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::vector<long> integer_range(long from, long to) {
  if (from < 1 || to < from) throw std::invalid_argument("bad range");
  std::vector<long> out;
  out.reserve(static_cast<std::size_t>(to - from + 1));
  for (long n = from; n <= to; ++n) out.push_back(n);
  return out;
}

}  // namespace measlearn::pbt
