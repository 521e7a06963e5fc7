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

#include "dmasim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmasim {

namespace {

constexpr std::uint64_t kDescriptorRegion = 0x1000;   // leaves page zero unused
constexpr std::uint64_t kRegionGap = 0x1000;
constexpr std::uint64_t kPrefetchSlack = 64 * kDescriptorBytes;

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

}  // namespace

void WorkloadSpec::validate() const {
  if (sizes.empty()) throw std::invalid_argument("workload needs at least one size");
  if (hit_rate < 0.0 || hit_rate > 1.0) throw std::invalid_argument("hit_rate must be in [0,1]");
}

std::uint8_t payload_byte(std::uint64_t seed, std::uint64_t index) {
  // One splitmix draw keyed by (seed, block), eight bytes per block.
  Rng rng(seed * 0x2545f4914f6cdd1dull + (index >> 3) + 1);
  const std::uint64_t word = rng.next();
  return static_cast<std::uint8_t>(word >> (8 * (index & 7)));
}

BuiltWorkload build_workload(const WorkloadSpec& spec) {
  spec.validate();
  BuiltWorkload built;
  const std::uint64_t count = spec.transfer_count;
  if (count == 0) {
    built.descriptor_base = kDescriptorRegion;
    built.required_capacity = kDescriptorRegion + kPrefetchSlack;
    return built;
  }

  Rng rng(spec.seed);

  // Which links break the sequential run. The draw is an exact-count shuffle,
  // so the miss count is round((1 - hit_rate) * links) by construction.
  const std::uint64_t links = count - 1;
  std::uint64_t miss_target = 0;
  std::vector<bool> link_miss(links, false);
  if (spec.placement == Placement::RandomizedNext && links > 0) {
    miss_target = static_cast<std::uint64_t>(
        std::llround((1.0 - spec.hit_rate) * static_cast<double>(links)));
    std::vector<std::uint64_t> order(links);
    for (std::uint64_t i = 0; i < links; ++i) order[i] = i;
    for (std::uint64_t i = links; i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::uint64_t i = 0; i < miss_target; ++i) link_miss[order[i]] = true;
  }
  built.expected_misses = miss_target;

  // Descriptor addresses: sequential runs are contiguous; a miss jumps the
  // cursor past a hole so the broken link can never equal prev + 32, and the
  // monotone cursor guarantees distinct addresses.
  std::vector<std::uint64_t> addresses(count);
  std::uint64_t cursor = kDescriptorRegion;
  addresses[0] = cursor;
  for (std::uint64_t i = 1; i < count; ++i) {
    cursor += link_miss[i - 1] ? 2 * kDescriptorBytes : kDescriptorBytes;
    addresses[i] = cursor;
  }
  const std::uint64_t descriptor_end = cursor + kDescriptorBytes + kPrefetchSlack;

  // Sizes and payload placement (bus-aligned packing).
  std::vector<TransferDesc> transfers(count);
  std::uint64_t total_span = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t len =
        spec.sizes.size() == 1 ? spec.sizes[0]
                               : spec.sizes[rng.below(spec.sizes.size())];
    transfers[i].length = len;
    total_span += align_up(len, 8);
  }
  const std::uint64_t src_base = align_up(descriptor_end + kRegionGap, 8);
  const std::uint64_t dst_base = align_up(src_base + total_span + kRegionGap, 8);
  std::uint64_t offset = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    transfers[i].source = src_base + offset;
    transfers[i].destination = dst_base + offset;
    transfers[i].config = 0;
    offset += align_up(transfers[i].length, 8);
    built.payload_bytes += transfers[i].length;
  }
  if (spec.irq_on_last) transfers[count - 1].config |= kConfigIrqOnCompletion;

  built.chain = build_chain(transfers, std::span<const std::uint64_t>(addresses));
  built.transfers.reserve(count);
  for (const TransferDesc& t : transfers) {
    built.transfers.push_back(BuiltTransfer{t.source, t.destination, t.length});
  }
  built.descriptor_base = kDescriptorRegion;
  built.required_capacity = dst_base + total_span + kRegionGap;
  return built;
}

void preload_workload(MemorySystem& memory, const BuiltWorkload& workload, std::uint64_t seed) {
  for (const ChainEntry& e : workload.chain.entries) {
    DescriptorRecord rec = encode(e.descriptor);
    memory.backdoor_write(e.address, rec);
  }
  std::uint64_t flat = 0;
  std::vector<std::uint8_t> buf;
  for (const BuiltTransfer& t : workload.transfers) {
    buf.resize(t.length);
    for (std::uint32_t i = 0; i < t.length; ++i) buf[i] = payload_byte(seed, flat + i);
    if (t.length > 0) memory.backdoor_write(t.source, buf);
    flat += t.length;
  }
}

bool verify_payload(const MemorySystem& memory, const BuiltWorkload& workload, std::uint64_t seed,
                    std::string* error) {
  std::uint64_t flat = 0;
  for (std::size_t idx = 0; idx < workload.transfers.size(); ++idx) {
    const BuiltTransfer& t = workload.transfers[idx];
    if (t.length > 0) {
      const std::vector<std::uint8_t> got = memory.backdoor_read(t.destination, t.length);
      for (std::uint32_t i = 0; i < t.length; ++i) {
        if (got[i] != payload_byte(seed, flat + i)) {
          if (error) {
            *error = "payload mismatch at transfer " + std::to_string(idx) + " byte " +
                     std::to_string(i);
          }
          return false;
        }
      }
    }
    flat += t.length;
  }
  return true;
}

}  // namespace dmasim
