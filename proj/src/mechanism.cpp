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

#include "mcdp/mechanism.hpp"

#include <cmath>
#include <vector>

namespace mcdp {

// Expanding (1-q + q e^{(2t-1)/(2s^2)})^lambda binomially and integrating
// each e^{jt/s^2} term against the two mixture components gives, with
// j = number of q-branch factors,
//   sum_j C(lambda,j) (1-q)^{lambda-j} q^j e^{-j/(2s^2)}
//         [ (1-q) e^{j^2/(2s^2)} + q e^{((j+1)^2 - 1)/(2s^2)} ].
// Same expansion truncated at t <= x underlies r_lambda_x in moment_bounds.
MgfResult mgf_single(const MechanismSpec& spec, std::uint64_t lambda) {
  const double s2 = spec.sigma * spec.sigma;
  const double inv2s2 = 1.0 / (2.0 * s2);
  if (lambda == 0) return {0.0, false};
  if (spec.q == 0.0) return {0.0, false};

  const double logq = std::log(spec.q);
  const double log1mq = spec.q < 1.0 ? std::log1p(-spec.q) : kNegInf;
  std::vector<double> terms;
  terms.reserve(lambda + 1);
  for (std::uint64_t j = 0; j <= lambda; ++j) {
    double jj = static_cast<double>(j);
    double rem = static_cast<double>(lambda) - jj;
    double lead = log_binom(static_cast<unsigned>(lambda),
                            static_cast<unsigned>(j)) +
                  (rem > 0.0 ? rem * log1mq : 0.0) + jj * logq - jj * inv2s2;
    if (lead == kNegInf) continue;  // C(l,j)(1-q)^{l-j} vanishes at q = 1
    double comp0 = log1mq + jj * jj * inv2s2;
    double comp1 = logq + ((jj + 1.0) * (jj + 1.0) - 1.0) * inv2s2;
    terms.push_back(lead + log_sum_exp(comp0, comp1));
  }
  MgfResult out;
  out.log_value = log_sum_exp(terms);
  out.saturated = out.log_value > kLogDblMax;
  return out;
}

}  // namespace mcdp
