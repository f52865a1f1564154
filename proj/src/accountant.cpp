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

#include "mcdp/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mcdp/rng.hpp"
#include "moments_impl.hpp"

namespace mcdp {

EvaluableBatch::EvaluableBatch(PrvSampleBatch batch)
    : batch_(std::move(batch)), m_(batch_.m) {
  if (m_ == 0) throw std::invalid_argument("empty batch");
  std::vector<std::uint64_t> order(m_);
  for (std::uint64_t i = 0; i < m_; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (batch_.values[a] != batch_.values[b]) {
      return batch_.values[a] > batch_.values[b];
    }
    return a < b;  // stable on ties so replays sort identically
  });
  sorted_y_.resize(m_);
  prefix_w_.resize(m_ + 1);
  prefix_wey_.resize(m_ + 1);
  NeumaierSum w, wey;
  prefix_w_[0] = 0.0;
  prefix_wey_[0] = 0.0;
  for (std::uint64_t i = 0; i < m_; ++i) {
    double y = batch_.values[order[i]];
    double wt = batch_.weights[order[i]];
    sorted_y_[i] = y;
    w.add(wt);
    wey.add(wt * std::exp(-y));
    prefix_w_[i + 1] = w.value();
    prefix_wey_[i + 1] = wey.value();
  }
}

double EvaluableBatch::delta_at(double epsilon) const {
  // First position with y <= epsilon in the descending order.
  auto it = std::lower_bound(sorted_y_.begin(), sorted_y_.end(), epsilon,
                             [](double y, double e) { return y > e; });
  std::uint64_t idx = static_cast<std::uint64_t>(it - sorted_y_.begin());
  if (idx == 0) return 0.0;
  double v = (prefix_w_[idx] - std::exp(epsilon) * prefix_wey_[idx]) /
             static_cast<double>(m_);
  return std::max(v, 0.0);
}

std::uint64_t EvaluableBatch::contributors_at(double epsilon) const {
  auto it = std::lower_bound(sorted_y_.begin(), sorted_y_.end(), epsilon,
                             [](double y, double e) { return y > e; });
  return static_cast<std::uint64_t>(it - sorted_y_.begin());
}

double EvaluableBatch::max_value() const { return sorted_y_.front(); }

double EvaluableBatch::resolution_floor() const {
  if (m_ < kMinContributors) return kInf;
  return delta_at(sorted_y_[kMinContributors - 1]);
}

EpsOfDeltaResult eps_on_batch(const EvaluableBatch& batch, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta target must lie in (0,1)");
  }
  if (!(batch.max_value() > 0.0)) {
    throw ResolutionError(
        "target below resolution: batch has no positive loss samples",
        batch.resolution_floor());
  }
  if (delta < batch.resolution_floor()) {
    throw ResolutionError(
        "target below resolution: fewer than 10 samples would contribute",
        batch.resolution_floor());
  }

  double hi = batch.max_value();  // delta_at(hi) == 0
  double lo = 0.0;
  if (batch.delta_at(lo) < delta) {
    // Loss mass sits below 0; expand to negative epsilon.
    double step = 1.0;
    while (batch.delta_at(lo) < delta) {
      if (lo < -1e4) {
        throw ResolutionError("target exceeds the achievable range of the batch",
                              batch.delta_at(lo));
      }
      hi = lo;
      lo -= step;
      step *= 2.0;
    }
  }

  EpsOfDeltaResult res;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    double d = batch.delta_at(mid);
    if (std::abs(d - delta) <= 1e-6 * delta) {
      res.epsilon = mid;
      res.achieved_delta = d;
      res.contributors = batch.contributors_at(mid);
      return res;
    }
    if (d > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.epsilon = lo;
  res.achieved_delta = batch.delta_at(lo);
  res.contributors = batch.contributors_at(lo);
  if (res.contributors < kMinContributors) {
    throw ResolutionError(
        "target below resolution: fewer than 10 samples contribute",
        batch.resolution_floor());
  }
  return res;
}

DeltaEstimate delta_of_eps(const AccountantQuery& query) {
  if (query.direction != QueryDirection::kDeltaOfEps) {
    throw std::invalid_argument("query direction must be delta_of_eps");
  }
  return estimate(query.spec, query.target, query.estimator);
}

EpsOfDeltaResult eps_of_delta(const AccountantQuery& query) {
  if (query.direction != QueryDirection::kEpsOfDelta) {
    throw std::invalid_argument("query direction must be eps_of_delta");
  }
  if (!(query.target > 0.0 && query.target < 1.0)) {
    throw std::invalid_argument("eps_of_delta requires delta in (0,1)");
  }
  query.estimator.validate();
  std::optional<TiltPlan> tilt;
  if (query.estimator.method == EstimatorMethod::kImportanceSampling) {
    if (!query.estimator.theta_override) {
      throw std::invalid_argument(
          "eps_of_delta with importance sampling needs an explicit theta "
          "(the tilting heuristic depends on the unknown epsilon)");
    }
    tilt = make_tilt_plan(query.spec, *query.estimator.theta_override);
  }
  PrvSampleBatch batch =
      sample_prv(query.spec, query.estimator.m, query.estimator.seed, tilt,
                 query.estimator.chunk_size);
  return eps_on_batch(EvaluableBatch(std::move(batch)), query.target);
}

OnlineAccountant::OnlineAccountant(std::uint64_t m, std::uint64_t seed,
                                   std::uint64_t chunk_size)
    : m_(m), seed_(seed), chunk_size_(chunk_size) {
  if (m_ < 1) throw std::invalid_argument("sample count m must be >= 1");
  if (chunk_size_ < 1) throw std::invalid_argument("chunk_size must be >= 1");
  sums_.assign(m_, 0.0);
}

void OnlineAccountant::step(double sigma, double q) {
  MechanismSpec one = q == 1.0
                          ? MechanismSpec::gaussian(sigma, 1)
                          : MechanismSpec::subsampled_gaussian(sigma, q, 1);
  const std::uint64_t s = steps_ + 1;
  parallel_chunks(m_, chunk_size_,
                  [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t j = begin; j < end; ++j) {
                      double mean = 0.0;
                      if (one.q == 1.0) {
                        mean = 1.0;
                      } else if (one.q > 0.0) {
                        mean = step_unit(seed_, j, s, DrawPurpose::kBranch) <
                                       one.q
                                   ? 1.0
                                   : 0.0;
                      }
                      double t = mean + one.sigma * step_normal(seed_, j, s);
                      sums_[j] += log_ratio(one, t);
                    }
                  });
  ++steps_;
  history_.push_back({sigma, q});
}

DeltaEstimate OnlineAccountant::read_delta(double epsilon) const {
  if (!std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite");
  }
  const std::uint64_t n_chunks = chunk_count(m_, chunk_size_);
  std::vector<internal::ChunkMoments> partial(n_chunks);
  parallel_chunks(m_, chunk_size_,
                  [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t j = begin; j < end; ++j) {
                      double y = sums_[j];
                      double x = 0.0;
                      if (y > epsilon) x = -std::expm1(epsilon - y);
                      partial[c].add_contribution(x);
                    }
                  });
  ContributionMoments mm = internal::fold_chunks(partial, m_);
  return delta_estimate_from_moments(mm, epsilon,
                                     EstimatorMethod::kSimpleMonteCarlo);
}

EpsOfDeltaResult OnlineAccountant::read_eps(double delta) const {
  PrvSampleBatch batch;
  batch.values = sums_;
  batch.weights.assign(m_, 1.0);
  batch.m = m_;
  batch.seed = seed_;
  batch.theta = 0.0;
  return eps_on_batch(EvaluableBatch(std::move(batch)), delta);
}

}  // namespace mcdp
