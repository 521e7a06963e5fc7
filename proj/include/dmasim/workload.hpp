/*
 * Copyright 2026 the dmasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// @file workload.hpp
/// Deterministic workload construction: descriptor chains with controlled
/// randomness (transfer sizes, sequential-or-not placement with an exact
/// prediction hit rate) plus seeded payload patterns, preloaded into the
/// simulated memory through the backdoor.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmasim/descriptor.hpp"
#include "dmasim/mem_model.hpp"

namespace dmasim {

/// Small, portable, splittable generator (splitmix64). The standard
/// distributions are not bit-portable across implementations, so everything
/// random is derived from this.
struct Rng {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;

  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

enum class Placement : std::uint8_t {
  Sequential,      ///< descriptor i+1 at descriptor i + 32
  RandomizedNext,  ///< an exact fraction of links break the sequential run
};

struct WorkloadSpec {
  std::uint64_t transfer_count = 272;
  /// One entry: fixed size. Several: drawn per transfer by seed.
  std::vector<std::uint32_t> sizes = {64};
  Placement placement = Placement::Sequential;
  double hit_rate = 1.0;  ///< RandomizedNext: fraction of sequential links
  std::uint64_t seed = 1;
  bool irq_on_last = true;

  void validate() const;
  std::uint64_t fixed_size() const { return sizes.size() == 1 ? sizes[0] : 0; }
};

struct BuiltTransfer {
  std::uint64_t source = 0;
  std::uint64_t destination = 0;
  std::uint32_t length = 0;
};

struct BuiltWorkload {
  DescriptorChain chain;
  std::vector<BuiltTransfer> transfers;
  std::uint64_t expected_misses = 0;  ///< non-sequential links in the chain
  std::uint64_t payload_bytes = 0;
  std::uint64_t descriptor_base = 0;
  std::uint64_t required_capacity = 0;
};

/// Deterministic in (spec); layout leaves slack after the last descriptor so
/// speculative prefetch overruns stay inside memory.
BuiltWorkload build_workload(const WorkloadSpec& spec);

/// Load descriptors and source payload through the backdoor; destinations
/// stay zero.
void preload_workload(MemorySystem& memory, const BuiltWorkload& workload, std::uint64_t seed);

/// Post-run integrity: every destination range equals its source payload.
/// Returns true when clean; otherwise fills `error`.
bool verify_payload(const MemorySystem& memory, const BuiltWorkload& workload, std::uint64_t seed,
                    std::string* error);

/// Deterministic payload byte for (seed, flat index) pairs.
std::uint8_t payload_byte(std::uint64_t seed, std::uint64_t index);

}  // namespace dmasim
