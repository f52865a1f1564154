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

#ifndef MCDP_ESTIMATORS_HPP_
#define MCDP_ESTIMATORS_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "mcdp/mechanism.hpp"
#include "mcdp/sampling.hpp"

namespace mcdp {

enum class EstimatorMethod { kSimpleMonteCarlo, kImportanceSampling };

inline std::string method_name(EstimatorMethod m) {
  return m == EstimatorMethod::kSimpleMonteCarlo ? "smc" : "is";
}

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::kSimpleMonteCarlo;
  std::uint64_t m = 1'000'000;
  std::uint64_t seed = 0;
  std::uint64_t chunk_size = kDefaultChunkSize;
  std::optional<double> theta_override;

  void validate() const {
    if (m < 1) throw std::invalid_argument("sample count m must be >= 1");
    if (chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
    if (method == EstimatorMethod::kSimpleMonteCarlo &&
        theta_override.has_value()) {
      throw std::invalid_argument("theta_override is meaningless for smc");
    }
  }
};

struct DeltaEstimate {
  double value = 0.0;          // delta-hat
  double second_moment = 0.0;  // mean of squared per-sample contributions
  double std_error = 0.0;      // sqrt(max(second_moment - value^2, 0) / m)
  std::uint64_t m = 0;
  EstimatorMethod method = EstimatorMethod::kSimpleMonteCarlo;
  std::optional<double> theta;
  double epsilon = 0.0;
};

// Raw accumulated moments of the per-sample contribution X; the fourth
// moment supports error bars on empirical second moments.
struct ContributionMoments {
  double mean = 0.0;
  double second = 0.0;
  double fourth = 0.0;
  double zero_fraction = 0.0;
  std::uint64_t m = 0;
  std::optional<double> theta;
};

/// Tilting parameter heuristic theta* = 1/(2 sigma^2) + log((e^eps-(1-q))/q).
/// Requires q > 0 and e^eps > 1-q; reduces to 1/(2 sigma^2) + eps at q = 1.
double heuristic_theta(const MechanismSpec& spec, double epsilon);

/// Streams the configured estimator and accumulates contribution moments.
ContributionMoments compute_moments(const MechanismSpec& spec, double epsilon,
                                    const EstimatorConfig& config);

DeltaEstimate delta_estimate_from_moments(const ContributionMoments& moments,
                                          double epsilon,
                                          EstimatorMethod method);

/// Simple Monte Carlo estimate of delta_Y(eps): mean of (1 - e^{eps-y})_+.
DeltaEstimate smc_estimate(const MechanismSpec& spec, double epsilon,
                           const EstimatorConfig& config);

/// Importance sampling estimate; theta from theta_override when present,
/// else heuristic_theta.  Requires k >= 1 and q > 0.
DeltaEstimate is_estimate(const MechanismSpec& spec, double epsilon,
                          const EstimatorConfig& config);

DeltaEstimate estimate(const MechanismSpec& spec, double epsilon,
                       const EstimatorConfig& config);

/// Empirical Pr[contribution = 0]; for SMC this is the fraction of y_i <= eps.
double estimate_zero_mass(const MechanismSpec& spec, double epsilon,
                          const EstimatorConfig& config);

/// Contribution of one weighted loss sample to delta-hat(eps).
inline double delta_contribution(double epsilon, double y, double weight) {
  return y > epsilon ? -std::expm1(epsilon - y) * weight : 0.0;
}

}  // namespace mcdp

#endif  // MCDP_ESTIMATORS_HPP_
