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

#ifndef MCDP_RNG_HPP_
#define MCDP_RNG_HPP_

#include <array>
#include <cstdint>

#include "mcdp/special.hpp"

namespace mcdp {

// Counter-based randomness: every draw is a pure function of
// (seed, sample index, step index, purpose), so results do not depend on
// which worker produced them or in what order.  Philox4x32-10.
struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::uint32_t c0, std::uint32_t c1,
                                            std::uint32_t c2,
                                            std::uint32_t c3) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = std::uint64_t(kM0) * c0;
      std::uint64_t p1 = std::uint64_t(kM1) * c2;
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += kW0;
      k1 += kW1;
    }
    return {c0, c1, c2, c3};
  }
};

// Purpose tags keep the uniform streams for different uses disjoint.
enum class DrawPurpose : std::uint32_t {
  kNormal = 0,
  kBranch = 1,
  kTiltCoordinate = 2,
  kGeneric = 3,
};

inline std::uint64_t join_u64(std::uint32_t hi, std::uint32_t lo) {
  return (std::uint64_t(hi) << 32) | lo;
}

/// Maps a 64-bit word to a uniform deviate strictly inside (0,1).
inline double to_unit(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Two uniforms per Philox block: `step` is 1-based; steps 2p-1 and 2p share
/// the block with counter word c2 = p, so a step's draw never depends on how
/// many other steps exist.
inline double step_unit(std::uint64_t seed, std::uint64_t sample,
                        std::uint64_t step, DrawPurpose purpose) {
  std::uint32_t pair = static_cast<std::uint32_t>((step + 1) >> 1);
  auto w = Philox4x32::block(seed, static_cast<std::uint32_t>(sample),
                             static_cast<std::uint32_t>(sample >> 32), pair,
                             static_cast<std::uint32_t>(purpose));
  std::uint64_t bits =
      (step & 1) ? join_u64(w[0], w[1]) : join_u64(w[2], w[3]);
  return to_unit(bits);
}

inline double step_normal(std::uint64_t seed, std::uint64_t sample,
                          std::uint64_t step) {
  return inverse_norm_cdf(
      step_unit(seed, sample, step, DrawPurpose::kNormal));
}

}  // namespace mcdp

#endif  // MCDP_RNG_HPP_
