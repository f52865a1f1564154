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

#ifndef MCDP_SAMPLING_HPP_
#define MCDP_SAMPLING_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mcdp/mechanism.hpp"
#include "mcdp/rng.hpp"
#include "mcdp/summation.hpp"

namespace mcdp {

inline constexpr std::uint64_t kDefaultChunkSize = 8192;

// Exponential tilt of the dominating mixture P.  P_theta(t) proportional to
// e^{theta t} P(t); normalizing re-weights the components, so the shifted
// component carries probability q e^theta / (1-q + q e^theta), not q.
struct TiltPlan {
  double theta = 0.0;
  double log_mp_theta = 0.0;
  double mp_theta = 1.0;
  double shifted_prob = 0.0;  // tilted weight of the N(1+theta s^2, s^2) part
};

inline TiltPlan make_tilt_plan(const MechanismSpec& spec, double theta) {
  TiltPlan plan;
  plan.theta = theta;
  plan.log_mp_theta = log_mp_theta(spec, theta);
  plan.mp_theta = std::exp(plan.log_mp_theta);
  if (spec.q == 1.0) {
    plan.shifted_prob = 1.0;
  } else if (spec.q == 0.0) {
    plan.shifted_prob = 0.0;
  } else {
    // q e^theta / ((1-q) + q e^theta), computed in logs.
    double lq = std::log(spec.q) + theta;
    plan.shifted_prob = std::exp(lq - log_sum_exp(std::log1p(-spec.q), lq));
  }
  return plan;
}

struct PrvSampleBatch {
  std::vector<double> values;   // y_i, nats; each a sum over k base draws
  std::vector<double> weights;  // importance weights; all 1 for simple MC
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  double theta = 0.0;  // tilting parameter used; 0 for simple MC
};

namespace detail {

// One Philox block feeds two consecutive steps; cache it so the per-sample
// scan over steps costs one block per two base draws.
struct StepDraws {
  std::uint64_t seed;
  std::uint64_t sample;

  std::uint32_t normal_pair = 0;
  std::array<std::uint32_t, 4> normal_words{};
  std::uint32_t branch_pair = 0;
  std::array<std::uint32_t, 4> branch_words{};

  double normal(std::uint64_t step) {
    std::uint32_t pair = static_cast<std::uint32_t>((step + 1) >> 1);
    if (pair != normal_pair) {
      normal_words = Philox4x32::block(
          seed, static_cast<std::uint32_t>(sample),
          static_cast<std::uint32_t>(sample >> 32), pair,
          static_cast<std::uint32_t>(DrawPurpose::kNormal));
      normal_pair = pair;
    }
    std::uint64_t bits = (step & 1)
                             ? join_u64(normal_words[0], normal_words[1])
                             : join_u64(normal_words[2], normal_words[3]);
    return inverse_norm_cdf(to_unit(bits));
  }

  double branch_unit(std::uint64_t step) {
    std::uint32_t pair = static_cast<std::uint32_t>((step + 1) >> 1);
    if (pair != branch_pair) {
      branch_words = Philox4x32::block(
          seed, static_cast<std::uint32_t>(sample),
          static_cast<std::uint32_t>(sample >> 32), pair,
          static_cast<std::uint32_t>(DrawPurpose::kBranch));
      branch_pair = pair;
    }
    std::uint64_t bits = (step & 1)
                             ? join_u64(branch_words[0], branch_words[1])
                             : join_u64(branch_words[2], branch_words[3]);
    return to_unit(bits);
  }
};

inline std::uint64_t tilt_coordinate(std::uint64_t seed, std::uint64_t sample,
                                     std::uint64_t k) {
  double u = step_unit(seed, sample, 1, DrawPurpose::kTiltCoordinate);
  std::uint64_t i = static_cast<std::uint64_t>(u * static_cast<double>(k));
  return i >= k ? k - 1 : i;
}

}  // namespace detail

/// One privacy-loss sample: the sum of k per-step log ratios, accumulated in
/// step order (the online accountant replays the identical sequence).
/// Base draw for step s of sample j depends only on (seed, j, s).
inline double prv_sample_value(const MechanismSpec& spec, std::uint64_t seed,
                               std::uint64_t sample) {
  detail::StepDraws draws{seed, sample};
  const double sigma = spec.sigma;
  double y = 0.0;
  for (std::uint64_t s = 1; s <= spec.k; ++s) {
    double mean = 0.0;
    if (spec.q == 1.0) {
      mean = 1.0;
    } else if (spec.q > 0.0) {
      mean = draws.branch_unit(s) < spec.q ? 1.0 : 0.0;
    }
    y += log_ratio(spec, mean + sigma * draws.normal(s));
  }
  return y;
}

/// Tilted counterpart: coordinate i* ~ Unif[k] is drawn from the exact tilt
/// P_theta, the rest from P.  Returns the loss y and the log importance
/// weight log k + log M_P(theta) - logsumexp_i(theta t_i).
struct TiltedSample {
  double y;
  double log_weight;
};
inline TiltedSample prv_sample_tilted(const MechanismSpec& spec,
                                      const TiltPlan& tilt, std::uint64_t seed,
                                      std::uint64_t sample) {
  detail::StepDraws draws{seed, sample};
  const double sigma = spec.sigma;
  const double shift = tilt.theta * sigma * sigma;
  const std::uint64_t star = detail::tilt_coordinate(seed, sample, spec.k);

  double y = 0.0;
  // Streaming logsumexp of theta * t_i with running rescale.
  double mx = kNegInf, acc = 0.0;
  for (std::uint64_t s = 1; s <= spec.k; ++s) {
    bool tilted = (s - 1) == star;
    double mean;
    if (spec.q == 1.0) {
      mean = 1.0;
    } else if (spec.q == 0.0) {
      mean = 0.0;
    } else {
      double p1 = tilted ? tilt.shifted_prob : spec.q;
      mean = draws.branch_unit(s) < p1 ? 1.0 : 0.0;
    }
    double t = mean + (tilted ? shift : 0.0) + sigma * draws.normal(s);
    y += log_ratio(spec, t);
    double a = tilt.theta * t;
    if (a <= mx) {
      acc += std::exp(a - mx);
    } else {
      acc = acc * std::exp(mx - a) + 1.0;
      mx = a;
    }
  }
  double lse = mx + std::log(acc);
  double log_w =
      std::log(static_cast<double>(spec.k)) + tilt.log_mp_theta - lse;
  return {y, log_w};
}

/// Streams samples chunk by chunk.  `body(chunk_index, Sample&)` is invoked
/// once per sample; chunks run on any worker, so `body` must only touch
/// per-chunk state indexed by chunk_index.
struct StreamedSample {
  std::uint64_t index;
  double y;
  double log_weight;  // 0 for untilted
};
template <class Body>
void for_each_prv_sample(const MechanismSpec& spec, std::uint64_t m,
                         std::uint64_t seed,
                         const std::optional<TiltPlan>& tilt,
                         std::uint64_t chunk_size, const Body& body) {
  spec.validate();
  if (m == 0) throw std::invalid_argument("sample count m must be >= 1");
  if (chunk_size == 0) throw std::invalid_argument("chunk_size must be >= 1");
  if (tilt.has_value()) {
    if (spec.k < 1) {
      throw std::invalid_argument("tilted sampling requires k >= 1");
    }
    if (spec.q == 0.0) {
      throw std::invalid_argument(
          "tilted sampling undefined for q = 0 (degenerate loss)");
    }
  }
  parallel_chunks(m, chunk_size,
                  [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t j = begin; j < end; ++j) {
                      if (tilt.has_value()) {
                        TiltedSample s = prv_sample_tilted(spec, *tilt, seed, j);
                        body(c, StreamedSample{j, s.y, s.log_weight});
                      } else {
                        body(c, StreamedSample{
                                    j, prv_sample_value(spec, seed, j), 0.0});
                      }
                    }
                  });
}

/// Materializes a batch of m samples with weights (all 1 when untilted).
PrvSampleBatch sample_prv(const MechanismSpec& spec, std::uint64_t m,
                          std::uint64_t seed,
                          const std::optional<TiltPlan>& tilt = std::nullopt,
                          std::uint64_t chunk_size = kDefaultChunkSize);

}  // namespace mcdp

#endif  // MCDP_SAMPLING_HPP_
