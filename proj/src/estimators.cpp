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

#include "mcdp/estimators.hpp"

#include <cmath>
#include <vector>

#include "moments_impl.hpp"

namespace mcdp {
namespace {

using internal::ChunkMoments;

ContributionMoments accumulate(const MechanismSpec& spec, double epsilon,
                               const EstimatorConfig& config,
                               const std::optional<TiltPlan>& tilt) {
  const std::uint64_t n_chunks = chunk_count(config.m, config.chunk_size);
  std::vector<ChunkMoments> partial(n_chunks);
  for_each_prv_sample(
      spec, config.m, config.seed, tilt, config.chunk_size,
      [&](std::uint64_t c, const StreamedSample& s) {
        double x = 0.0;
        if (s.y > epsilon) {
          double g = -std::expm1(epsilon - s.y);
          x = tilt ? g * std::exp(s.log_weight) : g;
        }
        partial[c].add_contribution(x);
      });
  ContributionMoments out = internal::fold_chunks(partial, config.m);
  out.theta = tilt ? std::optional<double>(tilt->theta) : std::nullopt;
  return out;
}

std::optional<TiltPlan> tilt_for(const MechanismSpec& spec, double epsilon,
                                 const EstimatorConfig& config) {
  if (config.method == EstimatorMethod::kSimpleMonteCarlo) {
    return std::nullopt;
  }
  if (spec.k < 1) {
    throw std::invalid_argument("importance sampling requires k >= 1");
  }
  if (spec.q == 0.0) {
    throw std::invalid_argument("importance sampling requires q > 0");
  }
  double theta = config.theta_override ? *config.theta_override
                                       : heuristic_theta(spec, epsilon);
  return make_tilt_plan(spec, theta);
}

}  // namespace

double heuristic_theta(const MechanismSpec& spec, double epsilon) {
  spec.validate();
  if (spec.q == 0.0) {
    throw std::invalid_argument("tilting heuristic undefined for q = 0");
  }
  if (!std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite");
  }
  double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
  if (spec.q == 1.0) return inv2s2 + epsilon;
  double num = std::expm1(epsilon) + spec.q;  // e^eps - (1-q)
  if (!(num > 0.0)) {
    throw std::domain_error("tilting heuristic requires e^eps > 1 - q");
  }
  return inv2s2 + std::log(num) - std::log(spec.q);
}

ContributionMoments compute_moments(const MechanismSpec& spec, double epsilon,
                                    const EstimatorConfig& config) {
  spec.validate();
  config.validate();
  if (!std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite");
  }
  return accumulate(spec, epsilon, config, tilt_for(spec, epsilon, config));
}

DeltaEstimate delta_estimate_from_moments(const ContributionMoments& mm,
                                          double epsilon,
                                          EstimatorMethod method) {
  DeltaEstimate est;
  est.value = mm.mean;
  est.second_moment = mm.second;
  est.std_error = std::sqrt(
      std::max(mm.second - mm.mean * mm.mean, 0.0) / double(mm.m));
  est.m = mm.m;
  est.method = method;
  est.theta = mm.theta;
  est.epsilon = epsilon;
  return est;
}

DeltaEstimate smc_estimate(const MechanismSpec& spec, double epsilon,
                           const EstimatorConfig& config) {
  if (config.method != EstimatorMethod::kSimpleMonteCarlo) {
    throw std::invalid_argument("smc_estimate requires method = smc");
  }
  return delta_estimate_from_moments(compute_moments(spec, epsilon, config),
                                     epsilon, config.method);
}

DeltaEstimate is_estimate(const MechanismSpec& spec, double epsilon,
                          const EstimatorConfig& config) {
  if (config.method != EstimatorMethod::kImportanceSampling) {
    throw std::invalid_argument("is_estimate requires method = is");
  }
  return delta_estimate_from_moments(compute_moments(spec, epsilon, config),
                                     epsilon, config.method);
}

DeltaEstimate estimate(const MechanismSpec& spec, double epsilon,
                       const EstimatorConfig& config) {
  return config.method == EstimatorMethod::kSimpleMonteCarlo
             ? smc_estimate(spec, epsilon, config)
             : is_estimate(spec, epsilon, config);
}

double estimate_zero_mass(const MechanismSpec& spec, double epsilon,
                          const EstimatorConfig& config) {
  return compute_moments(spec, epsilon, config).zero_fraction;
}

}  // namespace mcdp
