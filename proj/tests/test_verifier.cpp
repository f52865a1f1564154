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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mcdp/oracle.hpp"
#include "mcdp/verifier.hpp"

using namespace mcdp;

TEST_CASE("delta offset heuristic anchors") {
  // 0.4 (1/0.9 - 1/0.95) 1e-6, frozen from exact rational arithmetic.
  CHECK(delta_offset_heuristic(0.9, 0.95, 1e-6) ==
        doctest::Approx(2.3391812865497076e-8).epsilon(1e-12));
  CHECK(delta_offset_heuristic(0.5, 1.0, 1e-5) ==
        doctest::Approx(4e-6).epsilon(1e-12));
  // rho -> tau from above sends the offset to zero.
  CHECK(delta_offset_heuristic(0.9, 0.9 + 1e-9, 1e-6) <
        delta_offset_heuristic(0.9, 0.91, 1e-6));
  CHECK(delta_offset_heuristic(0.9, 0.9 + 1e-9, 1e-6) > 0.0);
  CHECK_THROWS_AS(delta_offset_heuristic(0.9, 0.9, 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(delta_offset_heuristic(0.95, 0.9, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("plan_sample_size is the smallest m satisfying the tail bound") {
  // The canonical case: (2 nu / Delta^2) ln(tau/delta_est) = 2742.030...,
  // so the smallest m with exp(-m Delta^2/(2 nu)) <= delta_est/tau is 2743.
  SampleSizeResult r = plan_sample_size(1e-10, 1e-6, 0.9, 1e-6);
  CHECK(r.feasible);
  CHECK(r.m == 2743);
  auto bound = [](double m, double nu, double off) {
    return std::exp(-m * off * off / (2.0 * nu));
  };
  CHECK(bound(double(r.m), 1e-10, 1e-6) <= 1e-6 / 0.9);
  CHECK(bound(double(r.m - 1), 1e-10, 1e-6) > 1e-6 / 0.9);
}

TEST_CASE("plan_sample_size scaling laws") {
  SampleSizeResult base = plan_sample_size(1e-10, 1e-6, 0.9, 1e-6);
  SampleSizeResult half_nu = plan_sample_size(0.5e-10, 1e-6, 0.9, 1e-6);
  CHECK(std::llabs(std::int64_t(base.m) - std::int64_t(2 * half_nu.m)) <= 2);
  SampleSizeResult dbl_off = plan_sample_size(1e-10, 2e-6, 0.9, 1e-6);
  CHECK(std::llabs(std::int64_t(base.m) - std::int64_t(4 * dbl_off.m)) <= 4);
}

TEST_CASE("plan_sample_size edge cases") {
  CHECK_THROWS_AS(plan_sample_size(1e-10, 1e-6, 0.5, 0.6),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_sample_size(0.0, 1e-6, 0.9, 1e-6),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_sample_size(1e-10, 0.0, 0.9, 1e-6),
                  std::invalid_argument);
  // Overflow to an explicit infeasible result.
  SampleSizeResult r = plan_sample_size(1.0, 1e-12, 0.9, 1e-6);
  CHECK_FALSE(r.feasible);
}

TEST_CASE("build_plan defaults and bennett consistency") {
  auto spec = MechanismSpec::subsampled_gaussian(0.6, 1e-3, 100);
  BuildPlanOptions opt;
  opt.nu_override = 1e-9;
  EvrPlan plan = build_plan(spec, 1.5, 1e-6, 0.9, 7, opt);
  CHECK(plan.rho == doctest::Approx(0.95));  // (1 + tau)/2
  CHECK(plan.delta_offset ==
        doctest::Approx(2.3391812865497076e-8).epsilon(1e-12));
  CHECK(plan.heuristic_nu);
  CHECK(plan.feasible);
  // Bennett consistency: plugging m back satisfies the FP target.
  double lhs = std::exp(-double(plan.m) * plan.delta_offset *
                        plan.delta_offset / (2.0 * plan.nu));
  CHECK(lhs <= plan.delta_est / plan.tau);
  CHECK(plan.threshold() ==
        doctest::Approx(1.0877192982456142e-6).epsilon(1e-12));
}

TEST_CASE("build_plan with analytic nu for smc") {
  auto spec = MechanismSpec::gaussian(1.0, 1);
  BuildPlanOptions opt;
  opt.estimator_method = EstimatorMethod::kSimpleMonteCarlo;
  opt.bound_method = BoundMethod::kSmcRdp;
  EvrPlan plan = build_plan(spec, 2.0, 0.04, 0.9, 11, opt);
  CHECK_FALSE(plan.heuristic_nu);
  CHECK(plan.bound.has_value());
  CHECK(plan.nu == plan.bound->nu);
  CHECK(plan.feasible);
  double lhs = std::exp(-double(plan.m) * plan.delta_offset *
                        plan.delta_offset / (2.0 * plan.nu));
  CHECK(lhs <= plan.delta_est / plan.tau);
}

TEST_CASE("fig-3 gaussian setting yields a sub-2-minute plan") {
  // tau=0.99, rho=0.995, sigma=70, k=1200; delta_est=2e-3 at its own eps.
  // "Under 2 minutes of samples" at 1e7 samples/s means m <= 1.2e9.
  auto spec = MechanismSpec::gaussian(70.0, 1200);
  // eps with oracle delta 1e-3: invert the closed form coarsely.
  double lo = 0.0, hi = 6.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (oracle::gaussian_exact_delta(70.0, 1200, mid) > 2e-3 ? lo : hi) = mid;
  }
  double eps = 0.5 * (lo + hi);
  BuildPlanOptions opt;
  opt.rho = 0.995;
  opt.estimator_method = EstimatorMethod::kSimpleMonteCarlo;
  opt.bound_method = BoundMethod::kSmcRdp;
  EvrPlan plan = build_plan(spec, eps, 2e-3, 0.99, 3, opt);
  CHECK(plan.feasible);
  CHECK(plan.m <= 1200000000ull);
}

TEST_CASE("infeasible plans are marked, not thrown") {
  // Saturated nu = 1 with a tiny offset overflows the required m.
  auto spec = MechanismSpec::subsampled_gaussian(0.05, 1.0, 1000);
  BuildPlanOptions opt;
  opt.estimator_method = EstimatorMethod::kSimpleMonteCarlo;
  opt.bound_method = BoundMethod::kSmcRdp;
  EvrPlan plan = build_plan(spec, 0.1, 1e-9, 0.9, 5, opt);
  CHECK(plan.bound.has_value());
  CHECK(plan.bound->saturated);
  CHECK_FALSE(plan.feasible);
  CHECK_THROWS_AS(verify(spec, plan), std::invalid_argument);
}

TEST_CASE("plan validation rejects a non-positive threshold") {
  EvrPlan plan;
  plan.epsilon = 1.0;
  plan.delta_est = 1e-6;
  plan.tau = 0.9;
  plan.rho = 0.95;
  plan.delta_offset = 2e-6;  // exceeds delta_est/tau
  plan.m = 100;
  plan.nu = 1e-9;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
}

TEST_CASE("verify accepts the trivially private mechanism") {
  auto q0 = MechanismSpec::subsampled_gaussian(1.0, 0.0, 10);
  EvrPlan plan;
  plan.epsilon = 1.0;
  plan.delta_est = 1e-6;
  plan.tau = 0.9;
  plan.rho = 0.95;
  plan.delta_offset = delta_offset_heuristic(0.9, 0.95, 1e-6);
  plan.m = 1000;
  plan.nu = 1e-9;
  plan.estimator.method = EstimatorMethod::kSimpleMonteCarlo;
  plan.estimator.seed = 19;
  Verdict v = verify(q0, plan);
  CHECK(v.accepted);
  CHECK(v.delta_hat == 0.0);
  CHECK(v.threshold == doctest::Approx(1.0877192982456142e-6).epsilon(1e-12));
  CHECK(v.fp_bound == doctest::Approx(1e-6 / 0.9));
  // Gate soundness is bit-exact on the reported fields.
  CHECK(v.accepted == (v.delta_hat < v.threshold));
}

TEST_CASE("monotone safety: smaller delta_est can only flip accept->reject") {
  auto spec = MechanismSpec::gaussian(1.0, 1);
  double truth = oracle::gaussian_exact_delta(1.0, 1, 1.0);
  bool prev_accepted = false;
  // Increasing delta_est with fixed seed and m; acceptance must be monotone.
  for (double scale : {0.2, 0.5, 0.8, 1.0, 1.3, 2.0, 4.0}) {
    EvrPlan plan;
    plan.epsilon = 1.0;
    plan.delta_est = truth * scale;
    plan.tau = 0.9;
    plan.rho = 0.95;
    plan.delta_offset =
        delta_offset_heuristic(plan.tau, plan.rho, plan.delta_est);
    plan.m = 20000;
    plan.nu = 0.1;
    plan.estimator.method = EstimatorMethod::kSimpleMonteCarlo;
    plan.estimator.seed = 777;
    Verdict v = verify(spec, plan);
    if (prev_accepted) CHECK(v.accepted);
    prev_accepted = v.accepted;
  }
  CHECK(prev_accepted);  // 4x overestimate is accepted
}

TEST_CASE("run_evr gates the payload") {
  auto q0 = MechanismSpec::subsampled_gaussian(1.0, 0.0, 10);
  EvrPlan plan;
  plan.epsilon = 1.0;
  plan.delta_est = 1e-6;
  plan.tau = 0.9;
  plan.rho = 0.95;
  plan.delta_offset = delta_offset_heuristic(0.9, 0.95, 1e-6);
  plan.m = 500;
  plan.nu = 1e-9;
  plan.estimator.method = EstimatorMethod::kSimpleMonteCarlo;
  plan.estimator.seed = 23;

  int calls = 0;
  auto out = run_evr(q0, plan, [&] {
    ++calls;
    return 42;
  });
  CHECK(out.verdict.accepted);
  CHECK(out.output.has_value());
  CHECK(*out.output == 42);
  CHECK(calls == 1);

  // A mechanism far above the proposed budget: rejected, payload untouched.
  auto leaky = MechanismSpec::gaussian(0.5, 4);
  calls = 0;
  auto bad = run_evr(leaky, plan, [&] {
    ++calls;
    return 7;
  });
  CHECK_FALSE(bad.verdict.accepted);
  CHECK(bad.rejected());
  CHECK(calls == 0);
}

TEST_CASE("desk-scale false rates at reduced m") {
  // Accurate estimate is almost always accepted; a 0.3 tau underestimate is
  // almost always rejected.  30 seeded trials each (the acceptance suite
  // runs the full 200-trial version).
  auto spec = MechanismSpec::gaussian(1.0, 1);
  const double eps = 1.0;
  const double truth = oracle::gaussian_exact_delta(1.0, 1, eps);
  EstimatorConfig probe;
  probe.m = 100000;
  probe.seed = 9090;
  double nu_emp = compute_moments(spec, eps, probe).second;

  int accept_accurate = 0, accept_violation = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    BuildPlanOptions opt;
    opt.rho = 0.95;
    opt.nu_override = nu_emp;
    opt.estimator_method = EstimatorMethod::kSimpleMonteCarlo;
    EvrPlan good = build_plan(spec, eps, truth, 0.9, 5000 + t, opt);
    if (verify(spec, good).accepted) ++accept_accurate;
    EvrPlan bad = build_plan(spec, eps, 0.3 * 0.9 * truth, 0.9, 6000 + t, opt);
    if (verify(spec, bad).accepted) ++accept_violation;
  }
  CHECK(accept_accurate >= trials - 1);
  CHECK(accept_violation == 0);
}
