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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "measlearn/quantum.hpp"
#include "measlearn/rational.hpp"

namespace measlearn::pbt {

enum class SchemeId { Pgls, Dpbt, Ppbt, ParallelSdp, AdaptiveSdp };
enum class Method { ClosedForm, MonteCarlo, Sdp };

std::string scheme_name(SchemeId id);
std::string method_name(Method m);

/// One computed table cell: which scheme, how many uses, what value, and how
/// the number was obtained, with free-form numeric diagnostics attached.
struct SchemeReport {
  SchemeId scheme{};
  long n = 0;
  double value = 0.0;
  Method method{};
  std::map<std::string, double> diagnostics;
};

/// Entanglement fidelity of optimal deterministic port-based teleportation
/// with N ports on qubits: cos^2(pi / (N + 2)).
double dpbt_entanglement_fidelity_qubit(long n);

/// Average fidelity of the teleportation-based learning scheme as an affine
/// function of the teleportation fidelity: 1/(d+1) + d/(d+1) * f_star.
double dpbt_avg_fidelity(int d, double f_star);

/// Qubit closed form: 1/3 + 2/3 cos^2(pi / (N + 2)).
double dpbt_avg_fidelity_qubit(long n);

/// Success probability of probabilistic port-based teleportation: N/(N+3).
double ppbt_success_probability(long n);
Rational ppbt_success_probability_exact(int n);

/// Average fidelity of the heralded scheme: (2N+3)/(2N+6).
double ppbt_avg_fidelity(long n);
Rational ppbt_avg_fidelity_exact(int n);

/// The POVM p0 * P_U + (1 - p0) * uniform; throws if p0 is outside [0, 1].
Povm mixture_povm(const ComplexMatrix& u, double p0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(1 - F(N)) against log N over `n_values`.
/// Throws std::invalid_argument on degenerate input (fewer than two points,
/// values at or above 1, or zero variance).
SlopeFit slope_fit(const std::function<double(long)>& avg_fidelity,
                   const std::vector<long>& n_values);

/// Every integer from `from` to `to` inclusive; the grid used for exponent
/// fits (a sparse power-of-two grid leaves visible pre-asymptotic bias).
std::vector<long> integer_range(long from, long to);

}  // namespace measlearn::pbt
