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

using namespace mcdp;
using namespace mcdp::oracle;

TEST_CASE("gaussian_exact_delta frozen anchors") {
  // 40-digit arithmetic anchors.
  CHECK(gaussian_exact_delta(1.0, 1, 0.0) ==
        doctest::Approx(0.3829249225480262).epsilon(1e-13));
  CHECK(gaussian_exact_delta(1.0, 1, 1.0) ==
        doctest::Approx(0.1269367375066439).epsilon(1e-13));
  CHECK(gaussian_exact_delta(1.0, 1, 3.0) ==
        doctest::Approx(1.537185369400955e-3).epsilon(1e-12));
  CHECK(gaussian_exact_delta(70.0, 1200, 2.0) ==
        doctest::Approx(7.772356946449464e-6).epsilon(1e-12));
  CHECK(gaussian_exact_delta(70.0, 1200, 3.0) ==
        doctest::Approx(2.270812473712944e-10).epsilon(1e-12));
  CHECK(gaussian_exact_delta(70.0, 1200, 4.5) ==
        doctest::Approx(2.353031987014673e-20).epsilon(1e-11));
  CHECK(gaussian_exact_delta(1.0, 8, 1.0) ==
        doctest::Approx(0.7507882266582613).epsilon(1e-13));
}

TEST_CASE("gaussian_exact_delta edge and deep-tail behavior") {
  CHECK(gaussian_exact_delta(3.0, 0, 0.0) == 0.0);
  CHECK(gaussian_exact_delta(3.0, 0, 5.0) == 0.0);
  CHECK(gaussian_exact_delta(3.0, 0, -1.0) ==
        doctest::Approx(-std::expm1(-1.0)).epsilon(1e-15));

  // Strictly decreasing in eps, below 1e-15 and still representable.
  double prev = 1.0;
  for (double eps = 0.0; eps <= 6.0; eps += 0.25) {
    double d = gaussian_exact_delta(70.0, 1200, eps);
    CHECK(d < prev);
    CHECK(d >= 0.0);
    prev = d;
  }
  double deep = gaussian_exact_delta(70.0, 1200, 6.0);
  CHECK(deep < 1e-15);
  CHECK(deep > 0.0);
  // Way out: representable far below 1e-250; genuine underflow past the
  // double range returns an honest 0.
  double extreme = gaussian_exact_delta(1.0, 1, 36.0);
  CHECK(extreme > 0.0);
  CHECK(extreme < 1e-270);
  CHECK(gaussian_exact_delta(1.0, 1, 60.0) == 0.0);
}

TEST_CASE("quadrature_delta_single anchors") {
  auto q0 = MechanismSpec::subsampled_gaussian(1.0, 0.0, 1);
  CHECK(quadrature_delta_single(q0, 1.0) == 0.0);

  auto g = MechanismSpec::gaussian(1.0, 1);
  CHECK(quadrature_delta_single(g, 0.0) ==
        doctest::Approx(0.3829249225480262).epsilon(1e-8));

  // Frozen from 40-digit quadrature.
  auto sub = MechanismSpec::subsampled_gaussian(0.6, 1e-3, 1);
  double v1 = quadrature_delta_single(sub, 1.5);
  CHECK(v1 == doctest::Approx(6.70096130587151e-9).epsilon(1e-6));

  // Self-consistency under tolerance tightening.
  QuadratureSpec tight;
  tight.rel_tol = 1e-11;
  CHECK(quadrature_delta_single(sub, 1.5, tight) ==
        doctest::Approx(v1).epsilon(1e-8));
}

TEST_CASE("quadrature matches the closed form across gaussian cases") {
  for (double sigma : {0.5, 1.0, 2.0, 10.0, 70.0}) {
    auto g = MechanismSpec::gaussian(sigma, 1);
    double mu = 1.0 / (2.0 * sigma * sigma);
    double s = 1.0 / sigma;
    for (double z : {0.5, 2.0, 4.0}) {
      double eps = mu + z * s;
      double exact = gaussian_exact_delta(sigma, 1, eps);
      CHECK(quadrature_delta_single(g, eps) ==
            doctest::Approx(exact).epsilon(1e-8));
    }
  }
}

TEST_CASE("grid law conserves mass") {
  ConvolutionParams p;
  p.step = 1e-3;
  for (bool upper : {false, true}) {
    GridPld law = discretize_single_step(
        MechanismSpec::subsampled_gaussian(0.6, 1e-3, 100), p, upper);
    CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    for (double m : law.masses) CHECK(m >= 0.0);
    GridPld gl = discretize_single_step(MechanismSpec::gaussian(1.0, 8), p,
                                        upper);
    CHECK(gl.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("convolution bracket contains the gaussian closed form") {
  ConvolutionParams p;
  p.step = 5e-4;
  auto g = MechanismSpec::gaussian(1.0, 8);
  double exact = gaussian_exact_delta(1.0, 8, 1.0);
  DeltaBracket b = convolution_delta(g, 1.0, p);
  CHECK(b.lower <= exact);
  CHECK(b.upper >= exact);
  CHECK(b.lower <= b.upper);
  CHECK(b.reliable);
  // The bracket is tight at this scale.
  CHECK(b.upper - b.lower < 0.02 * exact);
}

TEST_CASE("convolution bracket contains the k=1 quadrature value") {
  ConvolutionParams p;
  p.step = 5e-4;
  auto sub = MechanismSpec::subsampled_gaussian(0.6, 1e-3, 1);
  double quad = quadrature_delta_single(sub, 1.5);
  DeltaBracket b = convolution_delta(sub, 1.5, p);
  CHECK(b.lower <= quad);
  CHECK(b.upper >= quad);
}

TEST_CASE("convolution bracket at the fig-5 configuration") {
  // True value 6.7929e-7 from an independent FFT run (the figure's printed
  // 7.7e-6 corresponds to k=1000).
  ConvolutionParams p;
  p.step = 2e-3;
  auto sub = MechanismSpec::subsampled_gaussian(0.6, 1e-3, 100);
  DeltaBracket b = convolution_delta(sub, 1.5, p);
  CHECK(b.lower <= 6.793e-7);
  CHECK(b.upper >= 6.793e-7);
  CHECK(b.reliable);
  CHECK(b.lower > 6.793e-8);
  CHECK(b.upper < 6.793e-6);
}

TEST_CASE("refinement never widens the bracket") {
  auto sub = MechanismSpec::subsampled_gaussian(0.8, 0.01, 16);
  ConvolutionParams coarse;
  coarse.step = 4e-3;
  ConvolutionParams fine;
  fine.step = 2e-3;
  DeltaBracket a = convolution_delta(sub, 1.0, coarse);
  DeltaBracket b = convolution_delta(sub, 1.0, fine);
  CHECK(b.upper - b.lower <= (a.upper - a.lower) * 1.0001);
  CHECK(b.lower >= a.lower * 0.9999);
  CHECK(b.upper <= a.upper * 1.0001);
}

TEST_CASE("oracle outputs are monotone in eps and k") {
  auto mk = [](std::uint64_t k) {
    return MechanismSpec::subsampled_gaussian(0.8, 0.02, k);
  };
  ConvolutionParams p;
  p.step = 1e-3;
  double prev = 2.0;
  for (double eps : {0.2, 0.5, 1.0, 2.0}) {
    DeltaBracket b = convolution_delta(mk(8), eps, p);
    CHECK(b.upper <= prev + 1e-12);
    prev = b.upper;
  }
  double prev_lo = -1.0;
  for (std::uint64_t k : {std::uint64_t(1), std::uint64_t(2),
                          std::uint64_t(4), std::uint64_t(8)}) {
    DeltaBracket b = convolution_delta(mk(k), 0.5, p);
    CHECK(b.lower >= prev_lo - 1e-12);
    prev_lo = b.lower;
  }
}

TEST_CASE("spill beyond a permille of the bracket flags unreliable") {
  // Force a fat tail cut: huge tail_mass with a small k.
  ConvolutionParams p;
  p.step = 1e-3;
  p.tail_mass = 2e-4;
  auto sub = MechanismSpec::subsampled_gaussian(0.6, 1e-3, 4);
  DeltaBracket b = convolution_delta(sub, 1.5, p);
  CHECK_FALSE(b.reliable);
  CHECK(b.spill > 0.0);
}

TEST_CASE("convolution input validation") {
  auto sub = MechanismSpec::subsampled_gaussian(0.6, 1e-3, (1ull << 14) + 1);
  CHECK_THROWS_AS(convolution_delta(sub, 1.0, {}), std::invalid_argument);
  ConvolutionParams bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(
      convolution_delta(MechanismSpec::gaussian(1.0, 1), 1.0, bad),
      std::invalid_argument);
  // Degenerate mechanisms have exact brackets.
  auto q0 = MechanismSpec::subsampled_gaussian(1.0, 0.0, 3);
  DeltaBracket b = convolution_delta(q0, 1.0, {});
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 0.0);
}
