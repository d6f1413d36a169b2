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

#ifndef CHANGESET_RNG_HPP
#define CHANGESET_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace changeset {

/// Explicit random stream. There is no global generator: every consumer is
/// handed a stream, and parallel work derives independent streams from
/// (seed, index, label).
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for replication `index` and purpose `label` under a master seed.
  [[nodiscard]] static RandomStream derive(std::uint64_t seed, std::uint64_t index, std::string_view label) noexcept {
    return RandomStream(derive_seed(seed, index, label));
  }

  /// Seed of the sub-stream for (seed, index, label).
  [[nodiscard]] static constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                                           std::string_view label) noexcept {
    std::uint64_t state = seed;
    state = mix(state ^ mix(index + 0x632be59bd9b4e019ULL));
    return mix(state ^ fnv1a(label));
  }

  [[nodiscard]] double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  [[nodiscard]] double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
  [[nodiscard]] long poisson(double mean) {
    if (mean <= 0.0) {
      return 0;
    }
    return std::poisson_distribution<long>(mean)(engine_);
  }

  engine_type& engine() noexcept { return engine_; }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
      h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    }
    return h;
  }

  engine_type engine_;
};

}  // namespace changeset

#endif  // CHANGESET_RNG_HPP
