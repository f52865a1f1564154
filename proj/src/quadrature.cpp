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

#include "mcdp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcdp/special.hpp"

namespace mcdp {
namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gl15(const std::function<double(double)>& f, double a, double b) {
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 15; ++i) acc += kWeights[i] * f(mid + half * kNodes[i]);
  return acc * half;
}

struct Panel {
  double a, b, coarse;
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureSpec& spec) {
  spec.validate();
  QuadratureResult out;
  if (a == b) return out;

  // Seed with a handful of panels so a narrow peak inside a wide interval is
  // not missed by the first coarse pass.
  constexpr int kSeedPanels = 16;
  std::vector<Panel> work;
  double h0 = (b - a) / kSeedPanels;
  double total = 0.0;
  for (int i = 0; i < kSeedPanels; ++i) {
    Panel p{a + i * h0, a + (i + 1) * h0, 0.0};
    p.coarse = gl15(f, p.a, p.b);
    total += p.coarse;
    work.push_back(p);
  }

  double value = 0.0, err = 0.0;
  int panels = 0;
  double scale = std::abs(total);
  while (!work.empty()) {
    Panel p = work.back();
    work.pop_back();
    double mid = 0.5 * (p.a + p.b);
    double left = gl15(f, p.a, mid);
    double right = gl15(f, mid, p.b);
    double fine = left + right;
    double diff = std::abs(fine - p.coarse);
    scale = std::max(scale, std::abs(value) + std::abs(fine));
    bool small_enough =
        diff <= spec.rel_tol * std::max(std::abs(fine), 1e-3 * scale);
    if (small_enough || panels >= spec.max_subdivisions) {
      value += fine;
      err += diff;
      if (!small_enough) out.converged = false;
      ++panels;
    } else {
      work.push_back({p.a, mid, left});
      work.push_back({mid, p.b, right});
      ++panels;
    }
  }
  out.value = value;
  out.error_estimate = err;
  out.panels = panels;
  if (std::abs(value) > 0 && err > 16 * spec.rel_tol * std::abs(value)) {
    out.converged = false;
  }
  return out;
}

LogQuadratureResult integrate_exp_log(const std::function<double(double)>& g,
                                      double a, double b,
                                      const QuadratureSpec& spec) {
  // Coarse scan for the peak of g.
  constexpr int kScan = 96;
  double shift = kNegInf;
  for (int i = 0; i <= kScan; ++i) {
    double x = a + (b - a) * i / kScan;
    shift = std::max(shift, g(x));
  }
  if (shift == kNegInf) return {kNegInf, true};
  auto f = [&](double x) {
    double e = g(x) - shift;
    return e < -745.0 ? 0.0 : std::exp(e);
  };
  QuadratureResult r = integrate(f, a, b, spec);
  double lv = r.value > 0 ? shift + std::log(r.value) : kNegInf;
  return {lv, r.converged};
}

}  // namespace mcdp
