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

#include "mcdp/verifier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcdp {

double delta_offset_heuristic(double tau, double rho, double delta_est) {
  if (!(tau > 0.0 && tau < rho && rho <= 1.0)) {
    throw std::invalid_argument("offset heuristic requires 0 < tau < rho <= 1");
  }
  if (!(delta_est > 0.0)) {
    throw std::invalid_argument("delta_est must be > 0");
  }
  return 0.4 * (1.0 / tau - 1.0 / rho) * delta_est;
}

SampleSizeResult plan_sample_size(double nu, double delta_offset, double tau,
                                  double delta_est) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
  if (!(delta_offset > 0.0)) {
    throw std::invalid_argument("delta_offset must be > 0");
  }
  if (!(delta_est > 0.0 && delta_est < tau)) {
    throw std::invalid_argument(
        "plan requires delta_est < tau (log argument must exceed 1)");
  }
  double need =
      (2.0 * nu / (delta_offset * delta_offset)) * std::log(tau / delta_est);
  if (!(need < 9.223372036854775e18)) return {0, false};
  return {static_cast<std::uint64_t>(std::ceil(need)), true};
}

void EvrPlan::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(delta_est > 0.0 && delta_est < 1.0)) {
    throw std::invalid_argument("delta_est must lie in (0,1)");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in (0,1]");
  }
  if (!(rho > tau && rho <= 1.0)) {
    throw std::invalid_argument("rho must lie in (tau,1]");
  }
  if (!(delta_offset >= 0.0)) {
    throw std::invalid_argument("delta_offset must be >= 0");
  }
  if (!(threshold() > 0.0)) {
    throw std::invalid_argument(
        "delta_est/tau - delta_offset must be positive; the verifier would "
        "reject everything");
  }
  if (!feasible) {
    throw std::invalid_argument("plan is infeasible (required m overflows)");
  }
  if (m < 1) throw std::invalid_argument("plan has no samples");
}

EvrPlan build_plan(const MechanismSpec& spec, double epsilon, double delta_est,
                   double tau, std::uint64_t seed,
                   const BuildPlanOptions& options) {
  spec.validate();
  EvrPlan plan;
  plan.epsilon = epsilon;
  plan.delta_est = delta_est;
  plan.tau = tau;
  plan.rho = options.rho.value_or(0.5 * (1.0 + tau));
  plan.delta_offset =
      options.delta_offset.value_or(
          delta_offset_heuristic(tau, plan.rho, delta_est));

  plan.estimator.method = options.estimator_method;
  plan.estimator.seed = seed;
  plan.estimator.chunk_size = options.chunk_size;
  plan.estimator.theta_override = options.theta_override;

  if (options.nu_override) {
    plan.nu = *options.nu_override;
    plan.heuristic_nu = true;
  } else if (options.bound_method == BoundMethod::kSmcRdp ||
             options.estimator_method == EstimatorMethod::kSimpleMonteCarlo) {
    MomentBoundResult b = smc_moment_bound(spec, epsilon, 2.0);
    plan.nu = b.nu;
    plan.bound = b;
  } else {
    double theta = options.theta_override
                       ? *options.theta_override
                       : heuristic_theta(spec, epsilon);
    MomentBoundResult b;
    switch (options.bound_method) {
      case BoundMethod::kIsJs:
        b = is_moment_bound_js(spec, epsilon, theta,
                               smc_moment_bound(spec, epsilon, 2.0).nu);
        break;
      case BoundMethod::kIsMax: {
        b.log_nu = kInf;
        for (std::uint64_t lam = 1; lam <= 16; ++lam) {
          MomentBoundResult c =
              is_moment_bound_max(spec, epsilon, theta, lam, {});
          if (c.log_nu < b.log_nu) b = c;
        }
        break;
      }
      default:
        b = is_moment_bound_holder(spec, epsilon, theta);
        break;
    }
    plan.nu = b.nu;
    plan.bound = b;
  }

  SampleSizeResult ms =
      plan_sample_size(plan.nu, plan.delta_offset, tau, delta_est);
  plan.m = ms.m;
  plan.feasible = ms.feasible;
  plan.estimator.m = ms.feasible && ms.m > 0 ? ms.m : 1;
  if (plan.feasible && !(plan.threshold() > 0.0)) {
    throw std::invalid_argument(
        "plan threshold is not positive; choose a smaller offset");
  }
  return plan;
}

Verdict verify(const MechanismSpec& spec, const EvrPlan& plan) {
  plan.validate();
  EstimatorConfig config = plan.estimator;
  config.m = plan.m;
  DeltaEstimate est = estimate(spec, plan.epsilon, config);
  Verdict v;
  v.delta_hat = est.value;
  v.threshold = plan.threshold();
  v.accepted = v.delta_hat < v.threshold;
  v.plan = plan;
  v.fp_bound = plan.delta_est / plan.tau;
  return v;
}

}  // namespace mcdp
