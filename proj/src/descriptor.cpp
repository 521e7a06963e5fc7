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

#include "dmasim/descriptor.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_set>

namespace dmasim {

namespace {

void put_le32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
  p[2] = static_cast<std::uint8_t>(v >> 16);
  p[3] = static_cast<std::uint8_t>(v >> 24);
}

void put_le64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

constexpr char kChainMagic[8] = {'D', 'M', 'A', 'C', 'H', 'N', '1', '\0'};

}  // namespace

DescriptorRecord encode(const Descriptor& d) {
  DescriptorRecord r{};
  put_le32(r.data() + 0, d.length);
  put_le32(r.data() + 4, d.config);
  put_le64(r.data() + 8, d.next);
  put_le64(r.data() + 16, d.source);
  put_le64(r.data() + 24, d.destination);
  return r;
}

Descriptor decode(std::span<const std::uint8_t> record) {
  if (record.size() != kDescriptorBytes) {
    throw std::invalid_argument("descriptor record must be 32 bytes, got " +
                                std::to_string(record.size()));
  }
  Descriptor d;
  d.length = get_le32(record.data() + 0);
  d.config = get_le32(record.data() + 4);
  d.next = get_le64(record.data() + 8);
  d.source = get_le64(record.data() + 16);
  d.destination = get_le64(record.data() + 24);
  return d;
}

namespace {

DescriptorChain link_entries(std::span<const TransferDesc> transfers,
                             std::span<const std::uint64_t> addresses) {
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t a : addresses) {
    if (a % kDescriptorBytes != 0) {
      throw ChainError(ChainFaultKind::Misaligned, a, "descriptor address not 32-byte aligned");
    }
    if (a == kEndOfChain) {
      throw ChainError(ChainFaultKind::Misaligned, a, "descriptor address collides with sentinel");
    }
    if (!seen.insert(a).second) {
      throw ChainError(ChainFaultKind::DuplicateAddress, a, "duplicate descriptor address");
    }
  }
  DescriptorChain chain;
  if (transfers.empty()) return chain;
  chain.head_address = addresses[0];
  chain.entries.reserve(transfers.size());
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    const TransferDesc& t = transfers[i];
    Descriptor d;
    d.length = t.length;
    d.config = t.config;
    d.source = t.source;
    d.destination = t.destination;
    d.next = (i + 1 < transfers.size()) ? addresses[i + 1] : kEndOfChain;
    chain.entries.push_back(ChainEntry{addresses[i], d});
  }
  return chain;
}

}  // namespace

DescriptorChain build_chain(std::span<const TransferDesc> transfers, std::uint64_t base_address) {
  if (base_address % kDescriptorBytes != 0) {
    throw ChainError(ChainFaultKind::Misaligned, base_address, "base address not 32-byte aligned");
  }
  std::vector<std::uint64_t> addresses(transfers.size());
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    addresses[i] = base_address + kDescriptorBytes * i;
  }
  return link_entries(transfers, addresses);
}

DescriptorChain build_chain(std::span<const TransferDesc> transfers,
                            std::span<const std::uint64_t> explicit_addresses) {
  if (transfers.size() != explicit_addresses.size()) {
    throw std::invalid_argument("one explicit address required per transfer");
  }
  return link_entries(transfers, explicit_addresses);
}

DescriptorChain validate_chain(const MemoryReader& read_bytes, std::uint64_t head,
                               std::size_t max_len) {
  DescriptorChain chain;
  if (head == kEndOfChain) return chain;  // degenerate: empty chain
  chain.head_address = head;
  std::unordered_set<std::uint64_t> visited;
  std::uint64_t at = head;
  while (at != kEndOfChain) {
    if (at % kDescriptorBytes != 0) {
      throw ChainError(ChainFaultKind::Misaligned, at, "chain entry not 32-byte aligned");
    }
    if (!visited.insert(at).second) {
      throw ChainError(ChainFaultKind::Cycle, at, "chain revisits descriptor address");
    }
    if (chain.entries.size() >= max_len) {
      throw ChainError(ChainFaultKind::TooLong, at,
                       "chain exceeds max_len=" + std::to_string(max_len));
    }
    DescriptorRecord raw{};
    if (!read_bytes(at, std::span<std::uint8_t>(raw))) {
      throw ChainError(ChainFaultKind::Unreadable, at, "descriptor address unreadable");
    }
    Descriptor d = decode(raw);
    chain.entries.push_back(ChainEntry{at, d});
    at = d.next;
  }
  return chain;
}

std::vector<std::uint8_t> serialize_chain(const DescriptorChain& chain) {
  std::vector<std::uint8_t> out;
  out.resize(8 + 8 + 8 + chain.entries.size() * (8 + kDescriptorBytes));
  std::uint8_t* p = out.data();
  std::memcpy(p, kChainMagic, 8);
  put_le64(p + 8, chain.entries.size());
  put_le64(p + 16, chain.head_address);
  p += 24;
  for (const ChainEntry& e : chain.entries) {
    put_le64(p, e.address);
    p += 8;
  }
  for (const ChainEntry& e : chain.entries) {
    DescriptorRecord r = encode(e.descriptor);
    std::memcpy(p, r.data(), kDescriptorBytes);
    p += kDescriptorBytes;
  }
  return out;
}

DescriptorChain deserialize_chain(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kChainMagic, 8) != 0) {
    throw std::invalid_argument("not a descriptor chain file");
  }
  const std::uint64_t count = get_le64(bytes.data() + 8);
  const std::uint64_t head = get_le64(bytes.data() + 16);
  const std::size_t need = 24 + count * (8 + kDescriptorBytes);
  if (bytes.size() != need) {
    throw std::invalid_argument("chain file truncated or oversized");
  }
  DescriptorChain chain;
  chain.head_address = count == 0 ? kEndOfChain : head;
  const std::uint8_t* addrs = bytes.data() + 24;
  const std::uint8_t* recs = addrs + count * 8;
  chain.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ChainEntry e;
    e.address = get_le64(addrs + i * 8);
    e.descriptor = decode(std::span<const std::uint8_t>(recs + i * kDescriptorBytes,
                                                        kDescriptorBytes));
    chain.entries.push_back(e);
  }
  return chain;
}

}  // namespace dmasim
