/*
 * Copyright 2026 The ACDC Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace acdc {

/// FNV-1a over raw bytes. Stable across runs and builds; used wherever a
/// reproducible seed must be derived from strings or mixed-type tuples.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(std::string_view s);

/// splitmix64 finalizer; decorrelates nearby seed values.
std::uint64_t mix64(std::uint64_t x);

/// Combines a master seed with any number of tags (integers or strings) into
/// an independent stream seed. derive_seed(s, "sample", i) gives each sample
/// its own RNG regardless of evaluation order.
std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t v);
std::uint64_t seed_combine(std::uint64_t seed, std::string_view v);

template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t master, Parts&&... parts) {
  std::uint64_t s = mix64(master ^ 0x9e3779b97f4a7c15ull);
  ((s = seed_combine(s, parts)), ...);
  return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

/// Shortest decimal form that parses back to the exact same double.
std::string format_double(double v);

}  // namespace acdc
