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

#include "mcdp/sampling.hpp"

namespace mcdp {

PrvSampleBatch sample_prv(const MechanismSpec& spec, std::uint64_t m,
                          std::uint64_t seed,
                          const std::optional<TiltPlan>& tilt,
                          std::uint64_t chunk_size) {
  PrvSampleBatch batch;
  batch.m = m;
  batch.seed = seed;
  batch.theta = tilt ? tilt->theta : 0.0;
  batch.values.resize(m);
  batch.weights.resize(m);
  for_each_prv_sample(spec, m, seed, tilt, chunk_size,
                      [&](std::uint64_t, const StreamedSample& s) {
                        batch.values[s.index] = s.y;
                        batch.weights[s.index] =
                            tilt ? std::exp(s.log_weight) : 1.0;
                      });
  return batch;
}

}  // namespace mcdp
