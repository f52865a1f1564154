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

#include "mcdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcdp/special.hpp"
#include "mcdp/summation.hpp"

namespace mcdp::oracle {
namespace {

// Mixture CDF of t under P = (1-q) N(0, s^2) + q N(1, s^2).
double mixture_cdf(const MechanismSpec& spec, double t) {
  double a = norm_cdf(t / spec.sigma);
  if (spec.q == 0.0) return a;
  double b = norm_cdf((t - 1.0) / spec.sigma);
  return spec.q == 1.0 ? b : (1.0 - spec.q) * a + spec.q * b;
}

// CDF of the single-step loss Y: F(y) = Pr[t <= t(y)].
double loss_cdf(const MechanismSpec& spec, double y) {
  if (spec.q == 0.0) return y >= 0.0 ? 1.0 : 0.0;
  double floor_y = spec.q < 1.0 ? std::log1p(-spec.q) : kNegInf;
  if (y <= floor_y) return 0.0;
  return mixture_cdf(spec, log_ratio_inverse(spec, y));
}

}  // namespace

GridPld discretize_single_step(const MechanismSpec& spec,
                               const ConvolutionParams& params, bool upper) {
  const double h = params.step;
  MechanismSpec one = spec;
  one.k = 1;

  // Support: from the loss floor to the y whose upper tail mass is below
  // tail_mass (found from the Gaussian-mixture tails of t).
  double z = std::sqrt(-2.0 * std::log(params.tail_mass / 4.0));
  double t_hi = 1.0 + z * spec.sigma;
  double y_hi = log_ratio(one, t_hi);
  double y_lo;
  if (spec.q == 1.0) {
    double t_lo = 1.0 - z * spec.sigma;
    y_lo = log_ratio(one, t_lo);
  } else {
    y_lo = std::log1p(-spec.q);
  }
  // Align grid on multiples of h so lower/upper couplings share the lattice.
  std::int64_t i_lo = static_cast<std::int64_t>(std::floor(y_lo / h)) - 1;
  std::int64_t i_hi = static_cast<std::int64_t>(std::ceil(y_hi / h)) + 1;

  GridPld law;
  law.step = h;
  std::size_t n = static_cast<std::size_t>(i_hi - i_lo);
  // Upper coupling rounds each value up to the right edge: cell c of the
  // upper law holds mass F(edge_{c}) - F(edge_{c-1}) placed AT edge_c.
  // Lower coupling places the same mass at the left edge.
  law.y0 = (upper ? (i_lo + 1) : i_lo) * h;
  law.masses.assign(n, 0.0);
  double prev = loss_cdf(spec, i_lo * h);
  for (std::size_t c = 0; c < n; ++c) {
    double cur = loss_cdf(spec, (i_lo + 1 + static_cast<std::int64_t>(c)) * h);
    law.masses[c] = std::max(cur - prev, 0.0);
    prev = cur;
  }
  double below = loss_cdf(spec, i_lo * h);
  double rest = std::max(1.0 - prev, 0.0);
  if (upper) {
    law.spill = rest;          // beyond the top edge; f = 1 there
    law.masses[0] += below;    // moved up to the first edge
  } else {
    law.masses.back() += rest;  // moved down to the top edge
    law.spill = below;          // dropped to -inf, where f = 0
  }
  return law;
}

namespace {

// Direct convolution: out[o] = sum_i a[i] b[o-i].  Parallel over output
// cells, so each cell is written by exactly one worker in a fixed inner
// order.  Spill (mass at the coupling's infinity) composes additively.
GridPld convolve(const GridPld& a, const GridPld& b,
                 const ConvolutionParams& params, bool upper) {
  GridPld out;
  out.step = a.step;
  out.y0 = a.y0 + b.y0;
  const std::size_t na = a.masses.size();
  const std::size_t nb = b.masses.size();
  const std::size_t no = na + nb - 1;
  out.masses.assign(no, 0.0);
  const double* pa = a.masses.data();
  const double* pb = b.masses.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t o = 0; o < static_cast<std::int64_t>(no); ++o) {
    std::size_t oo = static_cast<std::size_t>(o);
    std::size_t i_lo = oo >= nb - 1 ? oo - (nb - 1) : 0;
    std::size_t i_hi = std::min(oo, na - 1);
    double acc = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) acc += pa[i] * pb[oo - i];
    out.masses[oo] = acc;
  }
  out.spill = a.spill + b.spill - a.spill * b.spill;

  // Trim negligible tails.
  double total = 0.0;
  for (double v : out.masses) total += v;
  double cut = params.trim_mass * total;
  std::size_t lo = 0, hi = out.masses.size();
  double acc = 0.0;
  while (lo < hi && acc + out.masses[lo] < cut) acc += out.masses[lo++];
  double acc_hi = 0.0;
  while (hi > lo && acc_hi + out.masses[hi - 1] < cut) {
    acc_hi += out.masses[--hi];
  }
  if (upper) {
    // Low tail may move up to the first kept cell; high tail spills to +inf.
    out.spill += acc_hi;
    if (lo < hi) out.masses[lo] += acc;
  } else {
    // High tail may move down to the last kept cell; low tail drops to -inf
    // where the integrand vanishes.
    out.spill += acc;
    if (hi > lo) out.masses[hi - 1] += acc_hi;
  }
  out.masses = std::vector<double>(out.masses.begin() + lo,
                                   out.masses.begin() + hi);
  out.y0 += static_cast<double>(lo) * out.step;
  return out;
}

GridPld power(const GridPld& base, std::uint64_t k,
              const ConvolutionParams& params, bool upper) {
  GridPld result;  // identity: point mass at 0
  result.step = base.step;
  result.y0 = 0.0;
  result.masses = {1.0};
  GridPld sq = base;
  std::uint64_t kk = k;
  bool first = true;
  while (kk) {
    if (kk & 1) {
      result = first ? sq : convolve(result, sq, params, upper);
      first = false;
    }
    kk >>= 1;
    if (kk) sq = convolve(sq, sq, params, upper);
  }
  if (first) {
    GridPld id;
    id.step = base.step;
    id.y0 = 0.0;
    id.masses = {1.0};
    return id;
  }
  return result;
}

double evaluate_delta(const GridPld& law, double epsilon, bool upper) {
  NeumaierSum acc;
  for (std::size_t c = 0; c < law.masses.size(); ++c) {
    double y = law.y0 + law.step * static_cast<double>(c);
    if (y > epsilon && law.masses[c] > 0.0) {
      acc.add(-std::expm1(epsilon - y) * law.masses[c]);
    }
  }
  double v = acc.value();
  if (upper) v += law.spill;  // spilled mass sits at +inf where f = 1
  return std::min(std::max(v, 0.0), 1.0);
}

}  // namespace

double GridPld::total_mass() const {
  NeumaierSum s;
  for (double v : masses) s.add(v);
  return s.value() + spill;
}

double gaussian_exact_delta(double sigma, std::uint64_t k, double epsilon) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (k == 0) {
    return epsilon >= 0.0 ? 0.0 : -std::expm1(epsilon);
  }
  double mu = static_cast<double>(k) / (2.0 * sigma * sigma);
  double s = std::sqrt(static_cast<double>(k)) / sigma;
  double z = (mu - epsilon) / s;
  double l1 = log_norm_cdf(z);
  double l2 = (epsilon - mu + 0.5 * s * s) + log_norm_cdf(z - s);
  if (l1 == kNegInf) return 0.0;
  double d = -std::exp(l1) * std::expm1(l2 - l1);
  return std::min(std::max(d, 0.0), 1.0);
}

double quadrature_delta_single(const MechanismSpec& spec, double epsilon,
                               const QuadratureSpec& quad) {
  spec.validate();
  if (spec.q == 0.0) return 0.0;
  MechanismSpec one = spec;
  one.k = 1;

  // Integrand vanishes below t(eps); find the start of the support.
  double floor_y = spec.q < 1.0 ? std::log1p(-spec.q) : kNegInf;
  double t_start;
  if (epsilon > floor_y) {
    t_start = log_ratio_inverse(one, epsilon);
  } else {
    t_start = -14.0 * spec.sigma;  // whole line contributes
  }
  const double s = spec.sigma;
  const double inv_s = 1.0 / s;
  const double norm = 1.0 / (s * std::sqrt(2.0 * M_PI));
  auto density = [&](double t) {
    double d1 = std::exp(-0.5 * (t * inv_s) * (t * inv_s));
    double d2 = std::exp(-0.5 * ((t - 1.0) * inv_s) * ((t - 1.0) * inv_s));
    if (spec.q == 1.0) return norm * d2;
    return norm * ((1.0 - spec.q) * d1 + spec.q * d2);
  };
  auto f = [&](double t) {
    double y = log_ratio(one, t);
    return y > epsilon ? -std::expm1(epsilon - y) * density(t) : 0.0;
  };
  // Extend the upper limit until the remaining mixture tail is negligible
  // relative to the accumulated integral.
  double t_hi = std::max(t_start, 1.0) + 8.0 * s;
  QuadratureResult r = integrate(f, t_start, t_hi, quad);
  double value = r.value;
  for (int rounds = 0; rounds < 40; ++rounds) {
    double tail = norm_cdf(-(t_hi - 1.0) * inv_s);  // >= mixture tail
    if (tail <= quad.rel_tol * std::max(value, 1e-300)) break;
    double next = t_hi + 8.0 * s;
    QuadratureResult more = integrate(f, t_hi, next, quad);
    value += more.value;
    r.converged = r.converged && more.converged;
    t_hi = next;
  }
  if (!r.converged) {
    throw std::runtime_error("quadrature_delta_single did not converge");
  }
  return std::min(std::max(value, 0.0), 1.0);
}

DeltaBracket convolution_delta(const MechanismSpec& spec, double epsilon,
                               const ConvolutionParams& params) {
  spec.validate();
  if (spec.k > (1ull << 14)) {
    throw std::invalid_argument("convolution oracle limited to k <= 2^14");
  }
  if (!(params.step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (spec.q == 0.0 || spec.k == 0) {
    double v = epsilon >= 0.0 ? 0.0 : -std::expm1(epsilon);
    return {v, v, 0.0, true};
  }
  GridPld lo1 = discretize_single_step(spec, params, /*upper=*/false);
  GridPld up1 = discretize_single_step(spec, params, /*upper=*/true);
  GridPld lo = power(lo1, spec.k, params, /*upper=*/false);
  GridPld up = power(up1, spec.k, params, /*upper=*/true);
  DeltaBracket b;
  b.lower = evaluate_delta(lo, epsilon, /*upper=*/false);
  b.upper = evaluate_delta(up, epsilon, /*upper=*/true);
  b.spill = up.spill;
  double scale = std::max(b.upper, 1e-300);
  b.reliable = up.spill <= 1e-3 * scale;
  if (b.lower > b.upper) std::swap(b.lower, b.upper);
  return b;
}

}  // namespace mcdp::oracle
