// Copyright 2026 The dp-decode Authors
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

#ifndef DPDECODE_RANDOM_H_
#define DPDECODE_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpdecode {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Deterministic uniform stream backed by std::mt19937_64 (whose output
// sequence is fully specified by the standard, so runs replay bit-exactly
// across platforms). A stream is owned by exactly one logical worker.
//
// Every draw is counted, which lets tests audit exactly how much randomness
// a code path consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Child stream for (seed, stream_index); distinct indices give streams
  // that do not overlap in practice.
  static RandomStream Derive(std::uint64_t seed, std::uint64_t stream_index);

  // Uniform double in the open interval (0, 1). Exactly one draw.
  double NextUnit() {
    ++draw_count_;
    // 53 random bits, offset by half a ulp so 0.0 and 1.0 are unreachable.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t draw_count() const { return draw_count_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draw_count_ = 0;
};

}  // namespace dpdecode

#endif  // DPDECODE_RANDOM_H_
