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

#ifndef MCDP_SRC_MOMENTS_IMPL_HPP_
#define MCDP_SRC_MOMENTS_IMPL_HPP_

// Shared per-chunk moment accumulation.  The offline estimators and the
// online accountant's reads must run the exact same arithmetic in the exact
// same order so that replayed runs agree bit for bit.

#include <cstdint>
#include <vector>

#include "mcdp/estimators.hpp"
#include "mcdp/summation.hpp"

namespace mcdp::internal {

// Contributions below this count as exact zeros; (1 - e^{eps-y})_+ produces
// genuine zeros, the threshold only guards rounding dust.
inline constexpr double kZeroGuard = 1e-300;

struct ChunkMoments {
  NeumaierSum s1, s2, s4;
  std::uint64_t zeros = 0;

  void add_contribution(double x) {
    if (x < kZeroGuard) {
      ++zeros;
    } else {
      s1.add(x);
      double x2 = x * x;
      s2.add(x2);
      s4.add(x2 * x2);
    }
  }
};

inline ContributionMoments fold_chunks(const std::vector<ChunkMoments>& parts,
                                       std::uint64_t m) {
  NeumaierSum s1, s2, s4;
  std::uint64_t zeros = 0;
  for (const ChunkMoments& cm : parts) {
    s1.merge(cm.s1);
    s2.merge(cm.s2);
    s4.merge(cm.s4);
    zeros += cm.zeros;
  }
  ContributionMoments out;
  double mm = static_cast<double>(m);
  out.mean = s1.value() / mm;
  out.second = s2.value() / mm;
  out.fourth = s4.value() / mm;
  out.zero_fraction = static_cast<double>(zeros) / mm;
  out.m = m;
  return out;
}

}  // namespace mcdp::internal

#endif  // MCDP_SRC_MOMENTS_IMPL_HPP_
