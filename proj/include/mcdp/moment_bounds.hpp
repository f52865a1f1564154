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

#ifndef MCDP_MOMENT_BOUNDS_HPP_
#define MCDP_MOMENT_BOUNDS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcdp/mechanism.hpp"
#include "mcdp/quadrature.hpp"

namespace mcdp {

// Renyi-DP curve: order alpha > 1 to eps_R(alpha) in nats.
struct RdpCurve {
  std::function<double(double)> eps_r;
};

/// alpha -> k * alpha / (2 sigma^2), the composed Gaussian curve.
RdpCurve gaussian_rdp_curve(double sigma, std::uint64_t k);

/// Integer-order curve built from the exact single-mechanism MGF:
/// eps_R(alpha) = k log mgf_single(alpha-1) / (alpha-1).  Defined only at
/// integer alpha >= 2; other orders throw.
RdpCurve rdp_curve_from_mgf(const MechanismSpec& spec);

enum class BoundMethod { kSmcRdp, kIsJs, kIsMax, kIsHolder };

std::string bound_method_name(BoundMethod m);

struct MomentBoundResult {
  double nu = 1.0;      // bound on E[delta-hat^2], capped at 1
  double log_nu = 0.0;  // uncapped, log domain
  BoundMethod method = BoundMethod::kSmcRdp;
  std::optional<std::uint64_t> lambda_star;
  std::optional<double> theta;
  std::optional<double> a;
  std::optional<double> b;
  bool saturated = false;  // every candidate overflowed; nu = 1 fallback
};

/// M_Y(lambda) <= exp(lambda eps_R(lambda + 1)); saturates instead of
/// overflowing.
MgfResult mgf_bound_from_rdp(const RdpCurve& curve, double lambda);

/// Default lambda grid: integers 1..64 plus powers of two up to 256.
std::vector<std::uint64_t> default_lambda_grid();
/// Default Holder exponent grid.
std::vector<double> default_a_grid();

/// min over the grid of M_Y(lambda) e^{-eps lambda} u^u lambda^lambda /
/// (u+lambda)^{u+lambda}, with M_Y = mgf_single^k.  u >= 1; u = 2 bounds the
/// second moment of the simple MC contribution.
MomentBoundResult smc_moment_bound(const MechanismSpec& spec, double epsilon,
                                   double u,
                                   std::span<const std::uint64_t> lambda_grid);
MomentBoundResult smc_moment_bound(const MechanismSpec& spec, double epsilon,
                                   double u);

/// log of r(lambda, x) = E_{t~P}[e^{lambda y(t)} 1{t <= x}], the truncated
/// mixture MGF; lambda = 0 degenerates to the mixture CDF.
double log_r_lambda_x(const MechanismSpec& spec, std::uint64_t lambda,
                      double x);
double r_lambda_x(const MechanismSpec& spec, std::uint64_t lambda, double x);

/// M_P(theta) [ (eps/q + k)/k ]^{-theta sigma^2} e^{-theta/2} nu_mc; valid
/// for theta >= 1/sigma^2 (hypothesis enforced).
MomentBoundResult is_moment_bound_js(const MechanismSpec& spec, double epsilon,
                                     double theta, double nu_mc);

/// k M_P(theta) theta e^{-lambda eps} integral of r(lambda,x)^k e^{-theta x}.
MomentBoundResult is_moment_bound_max(const MechanismSpec& spec,
                                      double epsilon, double theta,
                                      std::uint64_t lambda,
                                      const QuadratureSpec& quad);

/// Holder interpolation between the js (a = 1) and max (b = 1) bounds:
/// min over (a, lambda) of k M_P(theta) (E[delta_mc^{2a}])^{1/a}
/// (b theta e^{-lambda eps} integral r^k e^{-b theta x})^{1/b}.  The a grid
/// is augmented with the b = 1 limit, which reproduces the max bound.
MomentBoundResult is_moment_bound_holder(
    const MechanismSpec& spec, double epsilon, double theta,
    std::span<const double> a_grid, std::span<const std::uint64_t> lambda_grid,
    const QuadratureSpec& quad);
MomentBoundResult is_moment_bound_holder(const MechanismSpec& spec,
                                         double epsilon, double theta,
                                         const QuadratureSpec& quad = {});

/// argmin of the Holder bound over the theta grid; ties break toward the
/// smaller theta.
std::pair<double, MomentBoundResult> optimal_theta(
    const MechanismSpec& spec, double epsilon, std::span<const double> theta_grid,
    const QuadratureSpec& quad = {});

}  // namespace mcdp

#endif  // MCDP_MOMENT_BOUNDS_HPP_
