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

#include "mcdp/moment_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcdp {
namespace {

constexpr double kIntTol = 1e-9;

double require_integer_order(double alpha) {
  double r = std::round(alpha);
  if (std::abs(alpha - r) > kIntTol || r < 2.0) {
    throw std::domain_error(
        "curve defined only at integer orders alpha >= 2");
  }
  return r;
}

// log of u^u lambda^lambda / (u+lambda)^{u+lambda}; lambda = 0 gives 0.
double log_peak_factor(double u, double lambda) {
  if (lambda == 0.0) return 0.0;
  return u * std::log(u) + lambda * std::log(lambda) -
         (u + lambda) * std::log(u + lambda);
}

MomentBoundResult finish(double log_nu, BoundMethod method) {
  MomentBoundResult out;
  out.method = method;
  out.log_nu = log_nu;
  if (log_nu >= 0.0 || !std::isfinite(log_nu)) {
    out.nu = 1.0;
    out.saturated = true;
  } else {
    out.nu = std::exp(log_nu);
  }
  return out;
}

// log integral of r(lambda, x)^k e^{-theta_eff x} dx over the ledgered
// domain [-12 sigma, x_hi] plus the closed-form tail above x_hi.
struct TailIntegral {
  double log_value;
  bool converged;
};
TailIntegral log_r_power_integral(const MechanismSpec& spec,
                                  std::uint64_t lambda, double theta_eff,
                                  const QuadratureSpec& quad) {
  const double kk = static_cast<double>(spec.k);
  const double log_r_inf = mgf_single(spec, lambda).log_value;
  // Smallest x with log r(x) within 1e-12 of its limit.
  double lo = 0.0;
  double hi = static_cast<double>(lambda) + 2.0 + 20.0 * spec.sigma;
  while (log_r_inf - log_r_lambda_x(spec, lambda, hi) > 1e-12) hi += 8.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    if (log_r_inf - log_r_lambda_x(spec, lambda, mid) > 1e-12) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x_hi = hi;
  const double x_lo = -12.0 * spec.sigma;
  auto g = [&](double x) {
    return kk * log_r_lambda_x(spec, lambda, x) - theta_eff * x;
  };
  LogQuadratureResult main = integrate_exp_log(g, x_lo, x_hi, quad);
  double log_tail =
      kk * log_r_inf - theta_eff * x_hi - std::log(theta_eff);
  return {log_sum_exp(main.log_value, log_tail), main.converged};
}

}  // namespace

std::string bound_method_name(BoundMethod m) {
  switch (m) {
    case BoundMethod::kSmcRdp:
      return "smc_rdp";
    case BoundMethod::kIsJs:
      return "is_js";
    case BoundMethod::kIsMax:
      return "is_max";
    case BoundMethod::kIsHolder:
      return "is_holder";
  }
  return "unknown";
}

RdpCurve gaussian_rdp_curve(double sigma, std::uint64_t k) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  double scale = static_cast<double>(k) / (2.0 * sigma * sigma);
  return {[scale](double alpha) {
    if (!(alpha > 1.0)) throw std::domain_error("RDP order must be > 1");
    return scale * alpha;
  }};
}

RdpCurve rdp_curve_from_mgf(const MechanismSpec& spec) {
  return {[spec](double alpha) {
    double a = require_integer_order(alpha);
    auto lam = static_cast<std::uint64_t>(a - 1.0);
    return static_cast<double>(spec.k) * mgf_single(spec, lam).log_value /
           (a - 1.0);
  }};
}

MgfResult mgf_bound_from_rdp(const RdpCurve& curve, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  MgfResult out;
  out.log_value = lambda * curve.eps_r(lambda + 1.0);
  out.saturated = out.log_value > kLogDblMax;
  return out;
}

std::vector<std::uint64_t> default_lambda_grid() {
  std::vector<std::uint64_t> g;
  for (std::uint64_t i = 1; i <= 64; ++i) g.push_back(i);
  g.push_back(128);
  g.push_back(256);
  return g;
}

std::vector<double> default_a_grid() {
  return {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0};
}

MomentBoundResult smc_moment_bound(const MechanismSpec& spec, double epsilon,
                                   double u,
                                   std::span<const std::uint64_t> lambda_grid) {
  spec.validate();
  if (!(u >= 1.0)) throw std::invalid_argument("u must be >= 1");
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid empty");
  double best = kInf;
  std::uint64_t best_lambda = 0;
  for (std::uint64_t lam : lambda_grid) {
    double log_my =
        static_cast<double>(spec.k) * mgf_single(spec, lam).log_value;
    double cand = log_my - epsilon * static_cast<double>(lam) +
                  log_peak_factor(u, static_cast<double>(lam));
    if (cand < best) {
      best = cand;
      best_lambda = lam;
    }
  }
  MomentBoundResult out = finish(best, BoundMethod::kSmcRdp);
  out.lambda_star = best_lambda;
  return out;
}

MomentBoundResult smc_moment_bound(const MechanismSpec& spec, double epsilon,
                                   double u) {
  auto grid = default_lambda_grid();
  return smc_moment_bound(spec, epsilon, u, grid);
}

double log_r_lambda_x(const MechanismSpec& spec, std::uint64_t lambda,
                      double x) {
  const double sigma = spec.sigma;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double q = spec.q;
  if (q == 0.0) {
    // y == 0, so r is just the N(0, sigma^2) CDF for every lambda.
    return log_norm_cdf(x / sigma);
  }
  const double logq = std::log(q);
  const double log1mq = q < 1.0 ? std::log1p(-q) : kNegInf;
  double acc = kNegInf;
  for (std::uint64_t j = 0; j <= lambda; ++j) {
    double jj = static_cast<double>(j);
    double rem = static_cast<double>(lambda) - jj;
    double lead = log_binom(static_cast<unsigned>(lambda),
                            static_cast<unsigned>(j)) +
                  (rem > 0.0 ? rem * log1mq : 0.0) + jj * logq - jj * inv2s2;
    if (lead == kNegInf) continue;
    double comp0 =
        log1mq + jj * jj * inv2s2 + log_norm_cdf((x - jj) / sigma);
    double comp1 = logq + ((jj + 1.0) * (jj + 1.0) - 1.0) * inv2s2 +
                   log_norm_cdf((x - jj - 1.0) / sigma);
    acc = log_sum_exp(acc, lead + log_sum_exp(comp0, comp1));
  }
  return acc;
}

double r_lambda_x(const MechanismSpec& spec, std::uint64_t lambda, double x) {
  double lv = log_r_lambda_x(spec, lambda, x);
  return lv > kLogDblMax ? kInf : std::exp(lv);
}

MomentBoundResult is_moment_bound_js(const MechanismSpec& spec, double epsilon,
                                     double theta, double nu_mc) {
  spec.validate();
  if (!(nu_mc > 0.0)) throw std::invalid_argument("nu_mc must be > 0");
  if (spec.q == 0.0) throw std::invalid_argument("js bound requires q > 0");
  double s2 = spec.sigma * spec.sigma;
  if (!(theta >= 1.0 / s2)) {
    throw std::invalid_argument("js bound requires theta >= 1/sigma^2");
  }
  double kk = static_cast<double>(spec.k);
  double bracket = std::log((epsilon / spec.q + kk) / kk);
  double log_nu = log_mp_theta(spec, theta) - theta * s2 * bracket -
                  0.5 * theta + std::log(nu_mc);
  MomentBoundResult out = finish(log_nu, BoundMethod::kIsJs);
  out.theta = theta;
  return out;
}

MomentBoundResult is_moment_bound_max(const MechanismSpec& spec,
                                      double epsilon, double theta,
                                      std::uint64_t lambda,
                                      const QuadratureSpec& quad) {
  spec.validate();
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
  TailIntegral ti = log_r_power_integral(spec, lambda, theta, quad);
  if (!ti.converged) {
    throw std::runtime_error("max-bound quadrature did not converge");
  }
  double log_nu = std::log(static_cast<double>(spec.k)) +
                  log_mp_theta(spec, theta) + std::log(theta) -
                  static_cast<double>(lambda) * epsilon + ti.log_value;
  MomentBoundResult out = finish(log_nu, BoundMethod::kIsMax);
  out.theta = theta;
  out.lambda_star = lambda;
  return out;
}

MomentBoundResult is_moment_bound_holder(
    const MechanismSpec& spec, double epsilon, double theta,
    std::span<const double> a_grid, std::span<const std::uint64_t> lambda_grid,
    const QuadratureSpec& quad) {
  spec.validate();
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid empty");
  for (double a : a_grid) {
    if (!(a >= 1.0)) throw std::invalid_argument("every a must be >= 1");
  }
  const double log_k = std::log(static_cast<double>(spec.k));
  const double log_mp = log_mp_theta(spec, theta);
  const double s2 = spec.sigma * spec.sigma;

  MomentBoundResult best;
  best.log_nu = kInf;
  auto consider = [&](const MomentBoundResult& cand) {
    if (cand.log_nu < best.log_nu) best = cand;
  };

  for (double a : a_grid) {
    if (a == 1.0) {
      // b -> inf degenerates to the js direction; applies only under the
      // js hypothesis.
      if (theta >= 1.0 / s2) {
        double nu_mc = smc_moment_bound(spec, epsilon, 2.0).nu;
        MomentBoundResult js = is_moment_bound_js(spec, epsilon, theta, nu_mc);
        js.method = BoundMethod::kIsHolder;
        js.a = 1.0;
        consider(js);
      }
      continue;
    }
    double b = a / (a - 1.0);
    double log_f1 = smc_moment_bound(spec, epsilon, 2.0 * a).log_nu / a;
    for (std::uint64_t lam : lambda_grid) {
      TailIntegral ti = log_r_power_integral(spec, lam, b * theta, quad);
      if (!ti.converged) continue;
      double log_f2 = (std::log(b) + std::log(theta) -
                       static_cast<double>(lam) * epsilon + ti.log_value) /
                      b;
      MomentBoundResult cand =
          finish(log_k + log_mp + log_f1 + log_f2, BoundMethod::kIsHolder);
      cand.theta = theta;
      cand.lambda_star = lam;
      cand.a = a;
      cand.b = b;
      consider(cand);
    }
  }
  // b = 1 limit: the max bound verbatim (the 2a-th moment factor tends to a
  // bound <= 1 and is dropped).
  for (std::uint64_t lam : lambda_grid) {
    MomentBoundResult mx = is_moment_bound_max(spec, epsilon, theta, lam, quad);
    mx.method = BoundMethod::kIsHolder;
    mx.a = kInf;
    mx.b = 1.0;
    consider(mx);
  }
  if (best.log_nu == kInf) best = finish(kInf, BoundMethod::kIsHolder);
  best.theta = theta;
  return best;
}

MomentBoundResult is_moment_bound_holder(const MechanismSpec& spec,
                                         double epsilon, double theta,
                                         const QuadratureSpec& quad) {
  auto ag = default_a_grid();
  auto lg = default_lambda_grid();
  return is_moment_bound_holder(spec, epsilon, theta, ag, lg, quad);
}

std::pair<double, MomentBoundResult> optimal_theta(
    const MechanismSpec& spec, double epsilon,
    std::span<const double> theta_grid, const QuadratureSpec& quad) {
  if (theta_grid.empty()) throw std::invalid_argument("theta grid empty");
  std::vector<double> grid(theta_grid.begin(), theta_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double t : grid) {
    if (!(t > 0.0)) throw std::invalid_argument("theta grid must be positive");
  }
  double best_theta = grid.front();
  MomentBoundResult best;
  best.log_nu = kInf;
  for (double t : grid) {
    MomentBoundResult r = is_moment_bound_holder(spec, epsilon, t, quad);
    if (r.log_nu < best.log_nu) {
      best = r;
      best_theta = t;
    }
  }
  return {best_theta, best};
}

}  // namespace mcdp
