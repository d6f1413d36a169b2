// Copyright 2026 The changeset Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -ffast-math so the loop maps onto the vector exp of libmvec.

#include "exp_kernel.hpp"

#include <cmath>

namespace changeset::detail {

#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
void accumulate_exp(const double* x, std::size_t n, double* sum, double* square) noexcept {
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::exp(x[k]);
    sum[k] += e;
    square[k] += e * e;
  }
}

}  // namespace changeset::detail
