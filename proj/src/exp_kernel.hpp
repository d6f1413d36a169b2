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

#ifndef CHANGESET_SRC_EXP_KERNEL_HPP
#define CHANGESET_SRC_EXP_KERNEL_HPP

#include <cstddef>

namespace changeset::detail {

/// sum[k] += exp(x[k]), square[k] += exp(x[k])^2 for k < n. The inputs must be
/// finite; this translation unit is built for vector math.
void accumulate_exp(const double* x, std::size_t n, double* sum, double* square) noexcept;

}  // namespace changeset::detail

#endif  // CHANGESET_SRC_EXP_KERNEL_HPP
