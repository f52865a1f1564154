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

#ifndef MCDP_QUADRATURE_HPP_
#define MCDP_QUADRATURE_HPP_

#include <functional>
#include <stdexcept>

namespace mcdp {

struct QuadratureSpec {
  double rel_tol = 1e-9;       // must lie in (0, 1e-2]
  int max_subdivisions = 4000;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
      throw std::invalid_argument("quadrature tolerance must be in (0, 1e-2]");
    }
    if (max_subdivisions < 1) {
      throw std::invalid_argument("max_subdivisions must be >= 1");
    }
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  bool converged = true;
  int panels = 0;
};

/// Adaptive composite Gauss-Legendre (15-point panels, bisection on
/// disagreement with the two-half refinement).  Integrand must be finite on
/// [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureSpec& spec);

/// Integrates exp(g(x)) over [a, b], returning log of the integral.
/// Internally shifts by the max of g over a coarse scan so that peaked
/// integrands with g up to +-1e6 do not overflow.
struct LogQuadratureResult {
  double log_value;
  bool converged;
};
LogQuadratureResult integrate_exp_log(const std::function<double(double)>& g,
                                      double a, double b,
                                      const QuadratureSpec& spec);

}  // namespace mcdp

#endif  // MCDP_QUADRATURE_HPP_
