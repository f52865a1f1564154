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

#ifndef MCDP_SUMMATION_HPP_
#define MCDP_SUMMATION_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcdp {

/// Neumaier compensated sum.  Partial sums merge associatively enough that
/// combining per-chunk results in chunk order is reproducible and accurate
/// to well under 1e-12 relative for the workloads here.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  void merge(const NeumaierSum& o) {
    add(o.sum);
    comp += o.comp;
  }

  double value() const { return sum + comp; }
};

inline std::uint64_t chunk_count(std::uint64_t m, std::uint64_t chunk_size) {
  return (m + chunk_size - 1) / chunk_size;
}

/// Runs `body(chunk_index, begin, end)` over [0,m) split into fixed chunks.
/// Chunks may execute on any worker in any order; the caller owns per-chunk
/// state and must fold it in chunk order.
template <class Body>
void parallel_chunks(std::uint64_t m, std::uint64_t chunk_size,
                     const Body& body) {
  const std::int64_t n = static_cast<std::int64_t>(chunk_count(m, chunk_size));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::int64_t c = 0; c < n; ++c) {
    std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
    std::uint64_t end = begin + chunk_size;
    if (end > m) end = m;
    body(static_cast<std::uint64_t>(c), begin, end);
  }
}

}  // namespace mcdp

#endif  // MCDP_SUMMATION_HPP_
