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

#ifndef MCDP_ORACLE_HPP_
#define MCDP_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "mcdp/mechanism.hpp"
#include "mcdp/quadrature.hpp"

// Ground-truth computations used by tests and for relative-error reporting.
// Deliberately independent of the sampling machinery: only the scalar
// log_ratio formula (and its inverse) is shared with the estimators.
namespace mcdp::oracle {

/// Closed-form delta for the k-fold Gaussian loss Y ~ N(mu, s^2),
/// mu = k/(2 sigma^2), s^2 = k/sigma^2:
///   delta = Phi((mu-eps)/s) - e^{eps-mu+s^2/2} Phi((mu-eps)/s - s),
/// evaluated through log Phi so values down to 1e-300 survive.
double gaussian_exact_delta(double sigma, std::uint64_t k, double epsilon);

/// Direct quadrature of E[(1 - e^{eps-y(t)})_+] at k = 1.
double quadrature_delta_single(const MechanismSpec& spec, double epsilon,
                               const QuadratureSpec& quad = {});

// Discretized single-step loss law on a uniform grid; masses plus spill sum
// to 1.  `spill` is mass pushed beyond the grid: at +inf for the upper
// coupling (counts as contribution 1), at -inf for the lower (counts 0).
struct GridPld {
  double y0 = 0.0;    // position of cell 0
  double step = 0.0;  // uniform spacing h
  std::vector<double> masses;
  double spill = 0.0;

  double total_mass() const;
};

struct ConvolutionParams {
  double step = 1e-3;        // grid spacing in nats
  double tail_mass = 1e-22;  // single-step mass allowed beyond the grid
  double trim_mass = 1e-26;  // working-tail mass trimmed per convolution
};

struct DeltaBracket {
  double lower = 0.0;
  double upper = 0.0;
  double spill = 0.0;    // spill mass of the upper coupling
  bool reliable = true;  // false when spill exceeds 1e-3 of the bracket
};

/// Certified bracket for delta_Y(eps) of the k-fold composition: the
/// single-step law is rounded down (lower) and up (upper) onto the grid,
/// convolved to power k by repeated squaring, and evaluated with spill
/// handled pessimistically.  k <= 2^14.
DeltaBracket convolution_delta(const MechanismSpec& spec, double epsilon,
                               const ConvolutionParams& params = {});

/// Single-step loss law on the grid, rounded toward the requested coupling.
GridPld discretize_single_step(const MechanismSpec& spec,
                               const ConvolutionParams& params, bool upper);

}  // namespace mcdp::oracle

#endif  // MCDP_ORACLE_HPP_
