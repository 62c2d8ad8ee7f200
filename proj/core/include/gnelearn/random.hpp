// Copyright 2026 The gnelearn Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace gnelearn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Stream seed for run `index` of a sweep with master seed `master`:
//   mix_seed(master + (index + 1) * 0x9E3779B97F4A7C15).
// Streams for distinct indices are independent for practical purposes, and
// a single run always sees the same stream regardless of thread scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

}  // namespace gnelearn
