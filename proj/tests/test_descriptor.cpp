#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmasim/descriptor.hpp"
#include "dmasim/workload.hpp"

#include <cstring>
#include <map>

using namespace dmasim;

TEST_CASE("encode packs little-endian in declaration order") {
  Descriptor d;
  d.length = 64;
  d.config = 1;
  d.next = kEndOfChain;
  d.source = 0x1000;
  d.destination = 0x2000;
  const DescriptorRecord r = encode(d);

  CHECK(r[0] == 0x40);  // length = 64
  CHECK(r[1] == 0x00);
  CHECK(r[2] == 0x00);
  CHECK(r[3] == 0x00);
  CHECK(r[4] == 0x01);  // config
  for (int i = 8; i < 16; ++i) CHECK(r[static_cast<std::size_t>(i)] == 0xFF);  // next
  CHECK(r[16] == 0x00);
  CHECK(r[17] == 0x10);  // source = 0x1000
  CHECK(r[24] == 0x00);
  CHECK(r[25] == 0x20);  // destination = 0x2000
}

TEST_CASE("all-zero descriptor encodes to 32 zero bytes") {
  Descriptor d;
  d.next = 0;
  const DescriptorRecord r = encode(d);
  for (std::uint8_t b : r) CHECK(b == 0);
}

TEST_CASE("all-ones record decodes to saturated fields") {
  DescriptorRecord r;
  r.fill(0xFF);
  const Descriptor d = decode(r);
  CHECK(d.next == kEndOfChain);
  CHECK(d.length == 0xFFFFFFFFu);
  CHECK(d.config == 0xFFFFFFFFu);
  CHECK(d.source == kEndOfChain);
}

TEST_CASE("decode rejects anything but 32 bytes") {
  std::vector<std::uint8_t> short_record(31, 0);
  CHECK_THROWS_AS(decode(short_record), std::invalid_argument);
  std::vector<std::uint8_t> long_record(33, 0);
  CHECK_THROWS_AS(decode(long_record), std::invalid_argument);
}

TEST_CASE("encode/decode round-trips 1000 random descriptors") {
  Rng rng(0xD15C0001);
  for (int i = 0; i < 1000; ++i) {
    Descriptor d;
    d.length = static_cast<std::uint32_t>(rng.next());
    d.config = static_cast<std::uint32_t>(rng.next());
    d.next = rng.next();
    d.source = rng.next();
    d.destination = rng.next();
    CHECK(decode(encode(d)) == d);
  }
}

TEST_CASE("reserved config bits survive the round trip") {
  Descriptor d;
  d.config = 0xA5A5A5A4u;  // bit 0 clear, noise elsewhere
  const Descriptor back = decode(encode(d));
  CHECK(back.config == 0xA5A5A5A4u);
  CHECK_FALSE(back.irq_on_completion());
}

TEST_CASE("sequential chain of 3 at 0x8000") {
  std::vector<TransferDesc> ts(3);
  for (int i = 0; i < 3; ++i) {
    ts[static_cast<std::size_t>(i)] = TransferDesc{0x100000u + 64u * static_cast<std::uint64_t>(i),
                                                   0x200000u + 64u * static_cast<std::uint64_t>(i),
                                                   64, 0};
  }
  const DescriptorChain chain = build_chain(ts, std::uint64_t{0x8000});
  REQUIRE(chain.size() == 3);
  CHECK(chain.head_address == 0x8000);
  CHECK(chain.entries[0].address == 0x8000);
  CHECK(chain.entries[1].address == 0x8020);
  CHECK(chain.entries[2].address == 0x8040);
  CHECK(chain.entries[0].descriptor.next == 0x8020);
  CHECK(chain.entries[1].descriptor.next == 0x8040);
  CHECK(chain.entries[2].descriptor.next == kEndOfChain);
}

TEST_CASE("single-transfer chain terminates immediately") {
  std::vector<TransferDesc> ts(1);
  ts[0] = TransferDesc{0x0, 0x40, 8, 0};
  const DescriptorChain chain = build_chain(ts, std::uint64_t{0x40});
  REQUIRE(chain.size() == 1);
  CHECK(chain.entries[0].descriptor.next == kEndOfChain);
}

TEST_CASE("explicit non-sequential placement keeps the given order") {
  std::vector<TransferDesc> ts(3, TransferDesc{0, 0, 8, 0});
  const std::vector<std::uint64_t> addrs{0x8000, 0x9000, 0x8020};
  const DescriptorChain chain = build_chain(ts, std::span<const std::uint64_t>(addrs));
  CHECK(chain.entries[0].descriptor.next == 0x9000);
  CHECK(chain.entries[1].descriptor.next == 0x8020);
  CHECK(chain.entries[2].descriptor.next == kEndOfChain);
}

TEST_CASE("misaligned and duplicate addresses are rejected") {
  std::vector<TransferDesc> ts(2, TransferDesc{0, 0, 8, 0});
  CHECK_THROWS_AS(build_chain(ts, std::uint64_t{0x8004}), ChainError);
  const std::vector<std::uint64_t> dup{0x8000, 0x8000};
  CHECK_THROWS_AS(build_chain(ts, std::span<const std::uint64_t>(dup)), ChainError);
}

namespace {

MemoryReader map_reader(const std::map<std::uint64_t, DescriptorRecord>& mem) {
  return [&mem](std::uint64_t address, std::span<std::uint8_t> out) {
    auto it = mem.find(address);
    if (it == mem.end()) return false;
    std::memcpy(out.data(), it->second.data(), out.size());
    return true;
  };
}

}  // namespace

TEST_CASE("validate_chain recovers what build_chain made") {
  std::vector<TransferDesc> ts(3);
  for (std::size_t i = 0; i < 3; ++i) ts[i] = TransferDesc{i * 100, i * 200, 32, 0};
  const DescriptorChain chain = build_chain(ts, std::uint64_t{0x8000});
  std::map<std::uint64_t, DescriptorRecord> mem;
  for (const ChainEntry& e : chain.entries) mem[e.address] = encode(e.descriptor);

  const DescriptorChain got = validate_chain(map_reader(mem), 0x8000, 10);
  REQUIRE(got.size() == 3);
  CHECK(got.entries == chain.entries);
}

TEST_CASE("validate_chain flags a self-pointing descriptor as a cycle") {
  Descriptor d;
  d.next = 0x8000;
  std::map<std::uint64_t, DescriptorRecord> mem;
  mem[0x8000] = encode(d);
  try {
    validate_chain(map_reader(mem), 0x8000, 10);
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(e.kind() == ChainFaultKind::Cycle);
  }
}

TEST_CASE("validate_chain limits and faults") {
  std::map<std::uint64_t, DescriptorRecord> mem;
  // Two-entry loop 0x8000 -> 0x8020 -> 0x8000 also trips cycle detection.
  Descriptor a, b;
  a.next = 0x8020;
  b.next = 0x8000;
  mem[0x8000] = encode(a);
  mem[0x8020] = encode(b);
  CHECK_THROWS_AS(validate_chain(map_reader(mem), 0x8000, 10), ChainError);

  // Overlong chain.
  try {
    validate_chain(map_reader(mem), 0x8000, 1);
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(e.kind() == ChainFaultKind::TooLong);
  }

  // Unreadable next.
  Descriptor c;
  c.next = 0xdead0000;
  mem[0x8040] = encode(c);
  try {
    validate_chain(map_reader(mem), 0x8040, 10);
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(e.kind() == ChainFaultKind::Unreadable);
  }
}

TEST_CASE("end-of-chain head yields the empty chain") {
  std::map<std::uint64_t, DescriptorRecord> mem;
  const DescriptorChain chain = validate_chain(map_reader(mem), kEndOfChain, 10);
  CHECK(chain.empty());
}

TEST_CASE("chain file round-trips") {
  std::vector<TransferDesc> ts(5);
  for (std::size_t i = 0; i < 5; ++i) {
    ts[i] = TransferDesc{i * 64, 0x4000 + i * 64, static_cast<std::uint32_t>(8 * (i + 1)), 1};
  }
  const DescriptorChain chain = build_chain(ts, std::uint64_t{0x10000});
  const std::vector<std::uint8_t> blob = serialize_chain(chain);
  const DescriptorChain back = deserialize_chain(blob);
  CHECK(back.head_address == chain.head_address);
  CHECK(back.entries == chain.entries);

  std::vector<std::uint8_t> truncated(blob.begin(), blob.end() - 1);
  CHECK_THROWS_AS(deserialize_chain(truncated), std::invalid_argument);
}
