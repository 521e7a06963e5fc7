#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmasim/backend.hpp"
#include "dmasim/scenario.hpp"

#include <algorithm>

using namespace dmasim;

namespace {

// Standalone engine rig: memory + arbiter + backend, transfers dispatched by
// hand without the descriptor machinery.
struct EngineRig {
  Simulator sim;
  BusTrace trace;
  MemorySystem mem;
  Arbiter bus;
  DmaBackend engine;
  std::vector<std::unique_ptr<TransferRecord>> records;
  std::vector<std::uint64_t> done_order;

  explicit EngineRig(std::uint32_t latency = 1, BackendConfig cfg = {})
      : mem(sim, MemoryConfig{latency, 64, 1 << 20}, &trace), bus(sim, mem, &trace),
        engine(sim, bus, cfg, "engine") {
    engine.set_done_callback([this](TransferRecord* rec) { done_order.push_back(rec->index); });
  }

  TransferRecord* make_transfer(std::uint64_t src, std::uint64_t dst, std::uint32_t len) {
    auto rec = std::make_unique<TransferRecord>();
    rec->index = records.size();
    rec->descriptor.source = src;
    rec->descriptor.destination = dst;
    rec->descriptor.length = len;
    records.push_back(std::move(rec));
    return records.back().get();
  }

  void run_done(std::size_t count, std::uint64_t budget = 100000) {
    sim.run_until([&]() { return done_order.size() >= count && engine.idle(); }, budget);
  }
};

}  // namespace

TEST_CASE("a 64 B transfer moves 8 read and 8 write beats") {
  EngineRig rig;
  std::vector<std::uint8_t> payload(64);
  for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<std::uint8_t>(i);
  rig.mem.backdoor_write(0x1000, payload);
  TransferRecord* rec = rig.make_transfer(0x1000, 0x2000, 64);
  rig.sim.schedule(0, "dispatch", [&]() { rig.engine.try_dispatch(rec); });
  rig.run_done(1);

  std::uint64_t reads = 0, writes = 0;
  for (const BeatRecord& b : rig.trace.beats) {
    (b.dir == Direction::Read ? reads : writes)++;
  }
  CHECK(reads == 8);
  CHECK(writes == 8);
  CHECK(rig.mem.backdoor_read(0x2000, 64) == payload);
}

TEST_CASE("zero-length transfer completes immediately with zero beats") {
  EngineRig rig;
  TransferRecord* rec = rig.make_transfer(0x1000, 0x2000, 0);
  rig.sim.schedule(0, "dispatch", [&]() { rig.engine.try_dispatch(rec); });
  rig.run_done(1, 100);
  CHECK(rec->state == TransferState::Done);
  CHECK(rec->done_cycle == 0);
  CHECK(rig.trace.beats.empty());
}

TEST_CASE("burst planning splits at max_burst_beats and never overflows") {
  // 4 GiB - 1 on a 64-bit bus: ceil(len / 8) beats in total across bursts.
  BackendConfig cfg;
  cfg.queue_depth = 1;
  EngineRig rig(1, cfg);
  TransferRecord* rec = rig.make_transfer(0, 8, 0xFFFFFFFFu);
  (void)rec;
  // Plan-time arithmetic only: the range check fails this transfer against
  // the 1 MiB test memory, which is the boundary behavior wanted here; the
  // beat math itself is covered through beats_for.
  CHECK(beats_for(0, 0xFFFFFFFFull, 8) == (0xFFFFFFFFull + 7) / 8);
  CHECK(beats_for(8, 2048, 8) == 256);
  CHECK(beats_for(4, 8, 8) == 2);  // unaligned straddle costs an extra slot
}

TEST_CASE("back-to-back read beats re-emit as back-to-back write beats") {
  EngineRig rig;
  std::vector<std::uint8_t> payload(256, 0xCD);
  rig.mem.backdoor_write(0x4000, payload);
  TransferRecord* rec = rig.make_transfer(0x4000, 0x8000, 256);
  rig.sim.schedule(0, "dispatch", [&]() { rig.engine.try_dispatch(rec); });
  rig.run_done(1);

  std::vector<SimTime> read_cycles, write_cycles;
  for (const BeatRecord& b : rig.trace.beats) {
    (b.dir == Direction::Read ? read_cycles : write_cycles).push_back(b.cycle);
  }
  REQUIRE(read_cycles.size() == 32);
  REQUIRE(write_cycles.size() == 32);
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(write_cycles[i] == read_cycles[i] + 1);  // r-w forwarding delay
  }
  for (std::size_t i = 1; i < 32; ++i) {
    CHECK(read_cycles[i] == read_cycles[i - 1] + 1);  // no bubbles
  }
}

TEST_CASE("memcpy integrity holds for arbitrary alignment and length") {
  EngineRig rig(3);
  Rng rng(0xBEEF);
  std::uint64_t done = 0;
  for (int i = 0; i < 6; ++i) {
    const std::uint32_t len = static_cast<std::uint32_t>(1 + rng.below(600));
    const std::uint64_t src = 0x10000 + rng.below(512);          // any byte alignment
    const std::uint64_t dst = 0x40000 + rng.below(512);
    std::vector<std::uint8_t> payload(len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next());
    rig.mem.backdoor_write(src, payload);
    TransferRecord* rec = rig.make_transfer(src, dst, len);
    rig.sim.schedule(rig.sim.now(), "dispatch", [&rig, rec]() { rig.engine.try_dispatch(rec); });
    rig.run_done(++done);
    CHECK(rig.mem.backdoor_read(dst, len) == payload);
  }
}

TEST_CASE("done reports stay in dispatch order with overlapping transfers") {
  BackendConfig cfg;
  cfg.queue_depth = 4;
  EngineRig rig(1, cfg);
  std::vector<std::uint8_t> payload(4096, 0x11);
  rig.mem.backdoor_write(0x10000, payload);

  // A long transfer followed by a zero-length one: the second finishes its
  // work instantly but must still report after the first.
  TransferRecord* big = rig.make_transfer(0x10000, 0x20000, 4096);
  TransferRecord* nil = rig.make_transfer(0x10000, 0x30000, 0);
  rig.sim.schedule(0, "dispatch", [&]() {
    rig.engine.try_dispatch(big);
    rig.engine.try_dispatch(nil);
  });
  rig.run_done(2);
  CHECK(rig.done_order == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("out-of-range transfers fail without stalling the queue") {
  EngineRig rig;
  std::vector<std::uint8_t> payload(64, 0x3C);
  rig.mem.backdoor_write(0x1000, payload);
  TransferRecord* bad = rig.make_transfer(0x1000, 0xFFFFFFFF00000000ull, 64);
  TransferRecord* good = rig.make_transfer(0x1000, 0x2000, 64);
  rig.sim.schedule(0, "dispatch", [&]() {
    rig.engine.try_dispatch(bad);
    rig.engine.try_dispatch(good);
  });
  rig.run_done(2);
  CHECK(bad->failed);
  CHECK(bad->state == TransferState::Done);
  CHECK_FALSE(good->failed);
  CHECK(rig.mem.backdoor_read(0x2000, 64) == payload);
  CHECK(rig.done_order == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("dispatch back-pressures once the queue slots are busy") {
  BackendConfig cfg;
  cfg.queue_depth = 2;
  EngineRig rig(50, cfg);  // deep memory keeps slots busy long enough
  std::vector<std::uint8_t> payload(64, 0x9A);
  for (int i = 0; i < 3; ++i) {
    rig.mem.backdoor_write(0x1000 + 64u * static_cast<std::uint64_t>(i), payload);
  }
  TransferRecord* t0 = rig.make_transfer(0x1000, 0x2000, 64);
  TransferRecord* t1 = rig.make_transfer(0x1040, 0x2040, 64);
  TransferRecord* t2 = rig.make_transfer(0x1080, 0x2080, 64);
  bool third_rejected = false;
  rig.sim.schedule(0, "dispatch", [&]() {
    CHECK(rig.engine.try_dispatch(t0));
    CHECK(rig.engine.try_dispatch(t1));
    third_rejected = !rig.engine.try_dispatch(t2);
  });
  rig.run_done(2);
  CHECK(third_rejected);
  // Slots freed later; the retry succeeds.
  rig.sim.schedule(rig.sim.now(), "retry", [&]() { CHECK(rig.engine.try_dispatch(t2)); });
  rig.run_done(3);
  CHECK(t2->state == TransferState::Done);
}
