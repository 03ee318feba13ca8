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

#ifndef DPDECODE_SIPHASH_H_
#define DPDECODE_SIPHASH_H_

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dpdecode {

// SipHash-2-4: keyed 64-bit hash with a 128-bit key (key0 = first half,
// key1 = second half, both little-endian words of the 16-byte key).
std::uint64_t SipHash24(const void* data, std::size_t length,
                        std::uint64_t key0, std::uint64_t key1);

inline std::uint64_t SipHash24(std::string_view data, std::uint64_t key0,
                               std::uint64_t key1) {
  return SipHash24(data.data(), data.size(), key0, key1);
}

}  // namespace dpdecode

#endif  // DPDECODE_SIPHASH_H_
