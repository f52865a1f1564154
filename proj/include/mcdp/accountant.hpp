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

#ifndef MCDP_ACCOUNTANT_HPP_
#define MCDP_ACCOUNTANT_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mcdp/estimators.hpp"
#include "mcdp/mechanism.hpp"
#include "mcdp/sampling.hpp"

namespace mcdp {

enum class QueryDirection { kDeltaOfEps, kEpsOfDelta };

struct AccountantQuery {
  QueryDirection direction = QueryDirection::kDeltaOfEps;
  double target = 0.0;  // the fixed eps, or the fixed delta in (0,1)
  MechanismSpec spec;
  EstimatorConfig estimator;
};

/// Raised when a delta target is not supported by enough samples (fewer
/// than kMinContributors positive contributions at the matching epsilon).
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(const std::string& what, double floor)
      : std::runtime_error(what), floor_(floor) {}
  /// Smallest delta the batch can resolve reliably.
  double floor() const { return floor_; }

 private:
  double floor_;
};

inline constexpr std::uint64_t kMinContributors = 10;

// Batch frozen for epsilon searches: values sorted descending with prefix
// sums of w and w e^{-y}, so delta-hat(eps) costs one binary search.  On a
// fixed batch the map eps -> delta-hat is continuous and nonincreasing,
// which makes bisection valid.
class EvaluableBatch {
 public:
  explicit EvaluableBatch(PrvSampleBatch batch);

  double delta_at(double epsilon) const;
  std::uint64_t contributors_at(double epsilon) const;
  double max_value() const;
  /// delta at the epsilon where exactly kMinContributors samples contribute.
  double resolution_floor() const;
  std::uint64_t size() const { return m_; }
  const PrvSampleBatch& raw() const { return batch_; }

 private:
  PrvSampleBatch batch_;
  std::vector<double> sorted_y_;     // descending
  std::vector<double> prefix_w_;     // prefix sums over sorted order
  std::vector<double> prefix_wey_;   // prefix sums of w e^{-y}
  std::uint64_t m_ = 0;
};

struct EpsOfDeltaResult {
  double epsilon = 0.0;
  double achieved_delta = 0.0;
  std::uint64_t contributors = 0;
};

/// Bisection for eps with delta-hat(eps) = delta on a frozen batch; stops at
/// 1e-6 relative in delta or an eps interval below 1e-12.
EpsOfDeltaResult eps_on_batch(const EvaluableBatch& batch, double delta);

/// delta_Y(eps) estimate; wraps the configured estimator.
DeltaEstimate delta_of_eps(const AccountantQuery& query);

/// One batch is drawn and inverted; no re-sampling across bisection steps.
EpsOfDeltaResult eps_of_delta(const AccountantQuery& query);

/// r_err = |estimate - truth| / truth for truth > 0.
inline double relative_error(double estimate, double truth) {
  if (!(truth > 0.0)) throw std::invalid_argument("truth must be > 0");
  return std::abs(estimate - truth) / truth;
}

// Online accounting: one running loss sum per retained sample path; step i
// appends a fresh draw from substream (seed, i), so results after i steps
// equal a from-scratch offline run at k = i with the same seed, bit for bit.
// Untilted sampling only: a tilting parameter depends on eps and k jointly,
// so tilted samples cannot be reused across steps.
class OnlineAccountant {
 public:
  struct StepParams {
    double sigma;
    double q;
  };

  OnlineAccountant(std::uint64_t m, std::uint64_t seed,
                   std::uint64_t chunk_size = kDefaultChunkSize);

  void step(double sigma, double q);

  std::uint64_t steps() const { return steps_; }
  const std::vector<StepParams>& history() const { return history_; }

  /// delta-hat at eps over the current sums; identical arithmetic to the
  /// offline simple MC estimator at k = steps().
  DeltaEstimate read_delta(double epsilon) const;

  /// eps at delta over the current sums; identical to offline eps_of_delta.
  EpsOfDeltaResult read_eps(double delta) const;

  const std::vector<double>& sums() const { return sums_; }

 private:
  std::uint64_t m_;
  std::uint64_t seed_;
  std::uint64_t chunk_size_;
  std::uint64_t steps_ = 0;
  std::vector<double> sums_;
  std::vector<StepParams> history_;
};

}  // namespace mcdp

#endif  // MCDP_ACCOUNTANT_HPP_
