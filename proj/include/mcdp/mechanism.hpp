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

#ifndef MCDP_MECHANISM_HPP_
#define MCDP_MECHANISM_HPP_

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "mcdp/special.hpp"

namespace mcdp {

// Mechanisms are described through their dominating pair
//   Q = N(0, sigma^2),  P = (1-q) N(0, sigma^2) + q N(1, sigma^2),
// with the Gaussian mechanism as the q = 1 specialization.  The privacy loss
// of a k-fold composition is the sum of k independent per-mechanism losses
// y(t) = log(P(t)/Q(t)) with t ~ P.
struct MechanismSpec {
  enum class Kind { kGaussian, kPoissonSubsampledGaussian };

  Kind kind = Kind::kGaussian;
  double sigma = 1.0;   // noise multiplier, > 0
  double q = 1.0;       // subsampling rate in [0, 1]; 1 for pure Gaussian
  std::uint64_t k = 1;  // number of adaptively composed copies

  static MechanismSpec gaussian(double sigma, std::uint64_t k) {
    MechanismSpec s{Kind::kGaussian, sigma, 1.0, k};
    s.validate();
    return s;
  }

  static MechanismSpec subsampled_gaussian(double sigma, double q,
                                           std::uint64_t k) {
    MechanismSpec s{Kind::kPoissonSubsampledGaussian, sigma, q, k};
    s.validate();
    return s;
  }

  void validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(q >= 0.0 && q <= 1.0)) {
      throw std::invalid_argument("q must lie in [0, 1]");
    }
    if (kind == Kind::kGaussian && q != 1.0) {
      throw std::invalid_argument("gaussian mechanism fixes q = 1");
    }
  }

  bool pure_gaussian() const { return q == 1.0; }
};

/// Per-mechanism privacy loss y(t) = log(1 - q + q e^{(2t-1)/(2 sigma^2)}),
/// in nats.  Evaluated in log space; total on real t for any q in [0,1].
inline double log_ratio(const MechanismSpec& spec, double t) {
  double s = (t - 0.5) / (spec.sigma * spec.sigma);
  if (spec.q == 1.0) return s;
  if (spec.q == 0.0) return 0.0;
  if (s < 700.0) return std::log1p(spec.q * std::expm1(s));
  // q * e^s would overflow; peel the exponential out first.
  return s + std::log(spec.q + (1.0 - spec.q) * std::exp(-s));
}

/// Inverse of log_ratio in t, defined for y > log(1-q).
inline double log_ratio_inverse(const MechanismSpec& spec, double y) {
  if (spec.q == 1.0) return 0.5 + spec.sigma * spec.sigma * y;
  if (spec.q == 0.0) {
    throw std::domain_error("log_ratio is identically 0 when q = 0");
  }
  double em = std::expm1(y) + spec.q;  // e^y - (1-q)
  if (!(em > 0.0)) {
    throw std::domain_error("log_ratio_inverse requires y > log(1-q)");
  }
  return 0.5 + spec.sigma * spec.sigma * (std::log(em) - std::log(spec.q));
}

/// log M_P(theta) for the mixture P; M_P(theta) =
/// (1-q) e^{sigma^2 theta^2 / 2} + q e^{theta + sigma^2 theta^2 / 2}.
inline double log_mp_theta(const MechanismSpec& spec, double theta) {
  double base = 0.5 * spec.sigma * spec.sigma * theta * theta;
  if (spec.q == 1.0) return base + theta;
  if (spec.q == 0.0) return base;
  return base + log_sum_exp(std::log1p(-spec.q), std::log(spec.q) + theta);
}

/// Moment generating function of P, exact closed form; strictly positive.
inline double mp_theta(const MechanismSpec& spec, double theta) {
  return std::exp(log_mp_theta(spec, theta));
}

/// E_{t~P}[e^{lambda y(t)}] for integer lambda >= 0, via the binomial/erf
/// expansion evaluated in log space.  The composed MGF is this value to the
/// k-th power.  Overflow of exp(log_value) is flagged, not thrown.
struct MgfResult {
  double log_value = 0.0;
  bool saturated = false;  // exp(log_value) does not fit in a double
  double value() const { return saturated ? kInf : std::exp(log_value); }
};
MgfResult mgf_single(const MechanismSpec& spec, std::uint64_t lambda);

/// Mean and variance of the composed Gaussian privacy loss:
/// N(k/(2 sigma^2), k/sigma^2).
inline std::pair<double, double> gaussian_prv_params(double sigma,
                                                     std::uint64_t k) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  double kk = static_cast<double>(k);
  return {kk / (2.0 * sigma * sigma), kk / (sigma * sigma)};
}

}  // namespace mcdp

#endif  // MCDP_MECHANISM_HPP_
