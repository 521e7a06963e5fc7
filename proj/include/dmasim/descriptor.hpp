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

/// @file descriptor.hpp
/// The 32-byte transfer descriptor: binary layout, chain construction and
/// chain validation. Descriptors live little-endian in simulated memory as
/// { u32 length, u32 config, u64 next, u64 source, u64 destination }.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmasim {

/// All-ones next pointer marking the final descriptor of a chain. No
/// descriptor can be placed at this address, so it is unambiguous.
inline constexpr std::uint64_t kEndOfChain = ~std::uint64_t{0};

/// Serialized descriptor size; also the required chain entry alignment, so a
/// descriptor fetch is one aligned 4-beat burst on a 64-bit bus.
inline constexpr std::uint64_t kDescriptorBytes = 32;

/// Config word bit 0: raise an interrupt once this transfer completes. Bits
/// 1..31 are reserved and round-trip untouched.
inline constexpr std::uint32_t kConfigIrqOnCompletion = 1u << 0;

struct Descriptor {
  std::uint32_t length = 0;       ///< payload bytes; 0 is legal and moves nothing
  std::uint32_t config = 0;
  std::uint64_t next = kEndOfChain;
  std::uint64_t source = 0;
  std::uint64_t destination = 0;

  bool irq_on_completion() const { return (config & kConfigIrqOnCompletion) != 0; }
  bool is_last() const { return next == kEndOfChain; }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

using DescriptorRecord = std::array<std::uint8_t, kDescriptorBytes>;

/// Little-endian field packing: length@0, config@4, next@8, source@16,
/// destination@24.
DescriptorRecord encode(const Descriptor& d);

/// Inverse of encode(). Throws std::invalid_argument unless the input is
/// exactly 32 bytes.
Descriptor decode(std::span<const std::uint8_t> record);

struct ChainEntry {
  std::uint64_t address = 0;
  Descriptor descriptor;

  friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

/// A validated linked list of descriptors. Entries appear in chain order;
/// each entry's next field equals the following entry's address and the last
/// one carries the end-of-chain sentinel.
struct DescriptorChain {
  std::uint64_t head_address = kEndOfChain;  ///< kEndOfChain for the empty chain
  std::vector<ChainEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// One linear transfer request used to build chains.
struct TransferDesc {
  std::uint64_t source = 0;
  std::uint64_t destination = 0;
  std::uint32_t length = 0;
  std::uint32_t config = 0;
};

enum class ChainFaultKind {
  Misaligned,
  DuplicateAddress,
  Cycle,
  TooLong,
  Unreadable,
};

class ChainError : public std::runtime_error {
public:
  ChainError(ChainFaultKind kind, std::uint64_t address, const std::string& what)
      : std::runtime_error(what), kind_(kind), address_(address) {}

  ChainFaultKind kind() const { return kind_; }
  std::uint64_t address() const { return address_; }

private:
  ChainFaultKind kind_;
  std::uint64_t address_;
};

/// Build a chain from `transfers` in order. With sequential placement entry i
/// sits at base_address + 32*i; with explicit placement the caller supplies
/// one 32-byte-aligned, distinct address per transfer (used by the mispredict
/// sweeps, which need non-sequential layouts).
DescriptorChain build_chain(std::span<const TransferDesc> transfers, std::uint64_t base_address);
DescriptorChain build_chain(std::span<const TransferDesc> transfers,
                            std::span<const std::uint64_t> explicit_addresses);

/// Walk next pointers through readable memory starting at `head`, returning
/// the parsed chain. `read_bytes` must fill the span from the given address
/// and return false if the range is unreadable. Detects unaligned entries,
/// cycles and chains longer than max_len.
using MemoryReader = std::function<bool(std::uint64_t address, std::span<std::uint8_t> out)>;
DescriptorChain validate_chain(const MemoryReader& read_bytes, std::uint64_t head,
                               std::size_t max_len);

/// Flat binary chain file: "DMACHN1\0" magic, entry count, head address, the
/// entry addresses, then the concatenated 32-byte records.
std::vector<std::uint8_t> serialize_chain(const DescriptorChain& chain);
DescriptorChain deserialize_chain(std::span<const std::uint8_t> bytes);

}  // namespace dmasim
