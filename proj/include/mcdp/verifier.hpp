// Copyright 2026 The mcdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCDP_VERIFIER_HPP_
#define MCDP_VERIFIER_HPP_

#include <cstdint>
#include <functional>
#include <optional>

#include "mcdp/estimators.hpp"
#include "mcdp/mechanism.hpp"
#include "mcdp/moment_bounds.hpp"

namespace mcdp {

// Estimate-verify-release: a proposed (eps, delta_est) is accepted iff a
// Monte Carlo estimate delta-hat stays below delta_est/tau - Delta.  With
// m from plan_sample_size the tau-relaxed false positive rate is at most
// delta_est/tau, which makes the gated mechanism (eps, delta_est/tau)-DP.

struct SampleSizeResult {
  std::uint64_t m = 0;
  bool feasible = true;  // false when the required m exceeds 2^63 - 1
};

/// Offset heuristic Delta = 0.4 (1/tau - 1/rho) delta_est; requires
/// 0 < tau < rho <= 1 and delta_est > 0.
double delta_offset_heuristic(double tau, double rho, double delta_est);

/// Smallest m with exp(-m Delta^2 / (2 nu)) <= delta_est / tau, i.e.
/// ceil((2 nu / Delta^2) ln(tau / delta_est)).  Requires delta_est < tau.
SampleSizeResult plan_sample_size(double nu, double delta_offset, double tau,
                                  double delta_est);

struct EvrPlan {
  double epsilon = 0.0;
  double delta_est = 0.0;     // proposed delta, in (0,1)
  double tau = 1.0;           // underestimation smoothing, (0,1]
  double rho = 1.0;           // overestimation smoothing, (tau,1]
  double delta_offset = 0.0;  // Delta
  std::uint64_t m = 0;
  double nu = 1.0;            // second-moment bound backing m
  EstimatorConfig estimator;
  bool heuristic_nu = false;  // nu was supplied empirically, not proven
  bool feasible = true;
  std::optional<MomentBoundResult> bound;  // when nu came from a bound

  double threshold() const { return delta_est / tau - delta_offset; }
  void validate() const;
};

struct Verdict {
  bool accepted = false;
  double delta_hat = 0.0;
  double threshold = 0.0;  // delta_est/tau - Delta
  EvrPlan plan;
  double fp_bound = 0.0;  // guaranteed tau-relaxed FP rate when m meets plan
};

struct BuildPlanOptions {
  std::optional<double> rho;           // default (1 + tau)/2
  std::optional<double> delta_offset;  // default heuristic
  std::optional<double> nu_override;   // empirical nu; flags heuristic_nu
  BoundMethod bound_method = BoundMethod::kIsHolder;
  EstimatorMethod estimator_method = EstimatorMethod::kImportanceSampling;
  std::uint64_t chunk_size = kDefaultChunkSize;
  std::optional<double> theta_override;
};

/// Assembles a full plan: offset heuristic, analytic (or supplied) nu, and
/// Theorem-2 sample size.  Infeasible m is reported in the plan, not thrown.
EvrPlan build_plan(const MechanismSpec& spec, double epsilon, double delta_est,
                   double tau, std::uint64_t seed,
                   const BuildPlanOptions& options = {});

/// Runs the plan's estimator and applies the acceptance rule
/// accepted <=> delta_hat < delta_est/tau - Delta.
Verdict verify(const MechanismSpec& spec, const EvrPlan& plan);

/// Release gate: runs `payload` only when verification accepts; otherwise
/// the payload is never invoked and the outcome carries no value.
template <class Payload>
struct EvrOutcome {
  Verdict verdict;
  std::optional<Payload> output;  // empty means rejected
  bool rejected() const { return !output.has_value(); }
};

template <class Payload>
EvrOutcome<std::invoke_result_t<Payload>> run_evr(const MechanismSpec& spec,
                                                  const EvrPlan& plan,
                                                  Payload&& payload) {
  EvrOutcome<std::invoke_result_t<Payload>> out{verify(spec, plan),
                                                std::nullopt};
  if (out.verdict.accepted) out.output = std::forward<Payload>(payload)();
  return out;
}

}  // namespace mcdp

#endif  // MCDP_VERIFIER_HPP_
