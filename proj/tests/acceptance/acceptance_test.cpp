// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL line;
// the binary exits nonzero if any check fails. Everything runs at desk scale
// (the full suite takes well under ten minutes on a laptop).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dmasim/driver_model.hpp"
#include "dmasim/interconnect.hpp"
#include "dmasim/metrics.hpp"
#include "dmasim/scenario.hpp"
#include "dmasim/workload.hpp"

using namespace dmasim;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool ok, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) g_failures++;
}

double utilization(const std::string& preset, std::uint32_t latency, std::uint32_t size) {
  const RunOutcome out = run_scenario(preset_scenario(preset, latency, size));
  if (!out.integrity_ok) {
    throw std::runtime_error("integrity failure in " + preset + " run: " + out.integrity_error);
  }
  return out.report.steady_state_utilization;
}

// -- 1 -------------------------------------------------------------------
void criterion_ideal_law() {
  bool ok = true;
  std::ostringstream detail;
  for (const std::uint32_t n : {8u, 16u, 32u, 64u, 128u, 256u, 512u, 1024u, 4096u}) {
    const double u = utilization("base", 1, n);
    const double ideal = ideal_utilization(n);
    if (std::abs(u - ideal) > 0.01) {
      ok = false;
      detail << "n=" << n << " u=" << u << " ideal=" << ideal << "; ";
    }
  }
  report(1, "ideal-memory utilization equals n/(n+32) within 0.01 for all sizes", ok,
         detail.str());
}

// -- 2 -------------------------------------------------------------------
void criterion_latency_table() {
  bool ok = true;
  std::ostringstream detail;
  for (const std::uint32_t latency : {1u, 13u, 100u}) {
    ScenarioConfig cfg = preset_scenario("scaled", latency, 64);
    cfg.workload.transfer_count = 4;
    const RunOutcome out = run_scenario(cfg);
    const SimTime want_rf_rb = 2ull * latency + 6;
    if (out.report.probes.i_rf != 3 || out.report.probes.rf_rb != want_rf_rb ||
        out.report.probes.r_w != 1) {
      ok = false;
      detail << "L=" << latency << " got (" << out.report.probes.i_rf << ","
             << out.report.probes.rf_rb << "," << out.report.probes.r_w << "); ";
    }
  }
  report(2, "latency probes exactly (i-rf 3; rf-rb 8/32/206; r-w 1)", ok, detail.str());
}

// -- 3 -------------------------------------------------------------------
void criterion_prefetch_ddr3() {
  bool ok = true;
  std::ostringstream detail;

  const double spec64 = utilization("speculation", 13, 64);
  if (spec64 < 0.99 * ideal_utilization(64)) {
    ok = false;
    detail << "speculation@64B=" << spec64 << "; ";
  }
  for (const std::uint32_t n : {8u, 16u, 32u, 64u, 128u}) {
    const double u = utilization("base", 13, n);
    if (u >= 0.99 * ideal_utilization(n)) {
      ok = false;
      detail << "base@" << n << "B unexpectedly ideal (" << u << "); ";
    }
    if (n == 64 && u >= 0.95 * ideal_utilization(64)) {
      ok = false;
      detail << "base@64B=" << u << " not below 0.95*ideal; ";
    }
  }
  for (const std::uint32_t n : {256u, 512u, 1024u, 4096u}) {
    const double u = utilization("base", 13, n);
    if (u < 0.99 * ideal_utilization(n)) {
      ok = false;
      detail << "base@" << n << "B=" << u << " below 0.99*ideal; ";
    }
  }
  report(3, "DDR3: speculation ideal at 64 B; base ideal only from 256 B", ok, detail.str());
}

// -- 4 -------------------------------------------------------------------
void criterion_deep_memory() {
  const double u = utilization("scaled", 100, 128);
  const bool ok = u >= 0.99 * ideal_utilization(128);
  report(4, "deep memory: scaled configuration ideal at 128 B",
         ok, "u=" + std::to_string(u));
}

// -- 5 -------------------------------------------------------------------
void criterion_baseline_gap() {
  bool ok = true;
  std::ostringstream detail;
  const double base_l1 = utilization("base", 1, 64);
  const double ref_l1 = utilization("baseline", 1, 64);
  const double ratio_l1 = base_l1 / ref_l1;
  if (ratio_l1 < 2.0 || ratio_l1 > 3.0) {
    ok = false;
    detail << "ideal-memory ratio=" << ratio_l1 << "; ";
  }
  const double base_l13 = utilization("base", 13, 64);
  const double spec_l13 = utilization("speculation", 13, 64);
  const double ref_l13 = utilization("baseline", 13, 64);
  if (base_l13 / ref_l13 < 1.5) {
    ok = false;
    detail << "DDR3 ratio without speculation=" << base_l13 / ref_l13 << "; ";
  }
  if (spec_l13 / ref_l13 < 3.0) {
    ok = false;
    detail << "DDR3 ratio with speculation=" << spec_l13 / ref_l13 << "; ";
  }
  std::ostringstream measured;
  measured << "ratios " << ratio_l1 << " / " << base_l13 / ref_l13 << " / "
           << spec_l13 / ref_l13;
  report(5, "throughput gap to the serialized-fetch reference", ok,
         ok ? measured.str() : detail.str());
}

// -- 6 -------------------------------------------------------------------
void criterion_zero_penalty() {
  bool ok = true;
  std::ostringstream detail;
  Rng rng(0xACCE6);
  const double hit_rates[4] = {0.0, 0.25, 0.5, 0.75};
  int checked_misses = 0;
  for (int w = 0; w < 100 && ok; ++w) {
    ScenarioConfig cfg = preset_scenario("speculation", w % 2 == 0 ? 13 : 1, 64);
    cfg.workload.transfer_count = 24 + rng.below(17);
    cfg.workload.sizes = {static_cast<std::uint32_t>(8u << rng.below(5))};
    cfg.workload.placement = Placement::RandomizedNext;
    cfg.workload.hit_rate = hit_rates[w % 4];
    cfg.workload.seed = 1000 + static_cast<std::uint64_t>(w);
    cfg.window.warmup_transfers = 2;
    cfg.window.measured_transfers = 4;

    ScenarioConfig paired = cfg;
    paired.name = "base";
    paired.frontend.prefetch_slots = 0;

    const RunOutcome spec = run_scenario(cfg);
    const RunOutcome flat = run_scenario(paired);

    // Issue-relative-to-trigger latency per architectural fetch address.
    std::map<std::uint64_t, SimTime> flat_latency;
    for (const FetchLogEntry& e : flat.fetch_log) {
      if (!e.speculative) flat_latency[e.address] = e.issue_cycle - e.trigger_cycle;
    }
    for (const FetchLogEntry& e : spec.fetch_log) {
      if (e.trigger != FetchTrigger::Miss) continue;
      checked_misses++;
      const SimTime spec_latency = e.issue_cycle - e.trigger_cycle;
      auto it = flat_latency.find(e.address);
      if (it == flat_latency.end() || spec_latency != it->second || spec_latency != 0) {
        ok = false;
        detail << "workload " << w << " addr 0x" << std::hex << e.address << std::dec
               << " latency " << spec_latency << "; ";
        break;
      }
    }
  }
  if (checked_misses == 0) {
    ok = false;
    detail << "no mispredictions exercised";
  }
  report(6, "mispredicted fetches issue with zero added latency versus s=0", ok,
         ok ? std::to_string(checked_misses) + " mispredictions checked" : detail.str());
}

// -- 7 -------------------------------------------------------------------
void criterion_area_model() {
  bool ok = std::abs(estimate_area(4, 0) - 41.42) < 1e-9 &&
            std::abs(estimate_area(4, 4) - 49.18) < 1e-9 &&
            std::abs(estimate_area(24, 24) - 193.58) < 1e-9;
  for (std::uint32_t d = 2; d <= 32 && ok; ++d) {
    for (std::uint32_t s = 0; s <= 32 && ok; ++s) {
      if (std::abs((estimate_area(d, s) - estimate_area(d - 1, s)) - 5.28) > 1e-9) ok = false;
      if (s >= 1 && std::abs((estimate_area(d, s) - estimate_area(d, s - 1)) - 1.94) > 1e-9) {
        ok = false;
      }
    }
  }
  report(7, "area model exact at the three configurations and affine over the grid", ok);
}

// -- 8 -------------------------------------------------------------------
struct CountingHandler : BusPortHandler {
  void on_read_beat(const BusTransaction&, std::uint32_t, std::uint64_t,
                    std::span<const std::uint8_t>) override {}
  void on_write_complete(const BusTransaction&) override {}
  void on_bus_fault(const BusTransaction&) override {}
};

void criterion_property_suite() {
  bool ok = true;
  std::ostringstream detail;

  // Descriptor encode/decode round-trip on 10^4 random records.
  Rng rng(0x5EED);
  for (int i = 0; i < 10000; ++i) {
    Descriptor d;
    d.length = static_cast<std::uint32_t>(rng.next());
    d.config = static_cast<std::uint32_t>(rng.next());
    d.next = rng.next();
    d.source = rng.next();
    d.destination = rng.next();
    if (decode(encode(d)) != d) {
      ok = false;
      detail << "round-trip miss at i=" << i << "; ";
      break;
    }
  }

  // Completion markers, payload integrity and outstanding-request bounds on
  // a mixed set of runs (the frontend additionally hard-faults the moment
  // either bound is exceeded).
  for (const double hit_rate : {1.0, 0.5}) {
    ScenarioConfig cfg = preset_scenario("speculation", 13, 64);
    cfg.workload.transfer_count = 128;
    cfg.workload.placement = Placement::RandomizedNext;
    cfg.workload.hit_rate = hit_rate;
    const RunOutcome out = run_scenario(cfg);
    if (!out.integrity_ok) {
      ok = false;
      detail << "integrity: " << out.integrity_error << "; ";
    }
    if (out.max_desc_reads_in_flight > cfg.frontend.descriptors_in_flight ||
        out.max_speculative_outstanding > cfg.frontend.prefetch_slots) {
      ok = false;
      detail << "outstanding bounds exceeded; ";
    }
    if (out.transfers_completed != cfg.workload.transfer_count) {
      ok = false;
      detail << "incomplete run; ";
    }
  }

  // Round-robin fairness under saturation.
  {
    Simulator sim;
    BusTrace trace;
    MemorySystem mem(sim, MemoryConfig{1, 64, 1 << 20}, &trace);
    Arbiter bus(sim, mem, &trace);
    CountingHandler handler;
    const PortId a = bus.register_port("a", &handler);
    const PortId b = bus.register_port("b", &handler);
    sim.schedule(0, "req", [&]() {
      for (int i = 0; i < 256; ++i) {
        bus.request_read(a, 8u * static_cast<std::uint64_t>(i), 8, PayloadClass::Payload);
        bus.request_read(b, 0x10000 + 8u * static_cast<std::uint64_t>(i), 8,
                         PayloadClass::Payload);
      }
    });
    try {
      sim.run_until([]() { return false; }, 300);
    } catch (const SimTimeout&) {
    }
    const long long ga = static_cast<long long>(bus.grant_count(a, Direction::Read));
    const long long gb = static_cast<long long>(bus.grant_count(b, Direction::Read));
    if (std::llabs(ga - gb) > 1) {
      ok = false;
      detail << "fairness |" << ga << "-" << gb << "| > 1; ";
    }
  }

  // Determinism: identical scenario, identical trace.
  {
    ScenarioConfig cfg = preset_scenario("speculation", 13, 64);
    cfg.workload.transfer_count = 96;
    cfg.workload.placement = Placement::RandomizedNext;
    cfg.workload.hit_rate = 0.25;
    RunOptions opts;
    opts.keep_trace = true;
    const RunOutcome r1 = run_scenario(cfg, opts);
    const RunOutcome r2 = run_scenario(cfg, opts);
    if (!(r1.trace == r2.trace)) {
      ok = false;
      detail << "traces differ between identical runs; ";
    }
  }

  report(8, "integrity and protocol property suite", ok, detail.str());
}

// -- 9 -------------------------------------------------------------------
void criterion_driver_flow() {
  bool ok = true;
  std::ostringstream detail;

  Simulator sim;
  MemorySystem mem(sim, MemoryConfig{13, 64, 1 << 22});
  Arbiter bus(sim, mem);
  Dmac dmac(sim, bus, FrontendConfig{}, BackendConfig{});
  DmaDriver driver(sim, mem, dmac, DriverConfig{0x1000, 1024, 4});

  std::map<HandleId, int> callback_counts;
  std::vector<HandleId> handles;
  for (std::size_t i = 0; i < 10; ++i) {
    const std::uint64_t src = 0x100000 + 0x1000 * i;
    const std::uint64_t dst = 0x200000 + 0x1000 * i;
    std::vector<std::uint8_t> payload(256);
    for (std::size_t bidx = 0; bidx < payload.size(); ++bidx) {
      payload[bidx] = static_cast<std::uint8_t>(i * 17 + bidx);
    }
    mem.backdoor_write(src, payload);
    const HandleId h = driver.prepare_memcpy(src, dst, 256, false);
    driver.set_callback(h, [&callback_counts, h]() { callback_counts[h]++; });
    driver.commit(std::vector<HandleId>{h});
    handles.push_back(h);
  }
  sim.schedule(0, "issue", [&]() { driver.issue(); });
  sim.run_until([&]() { return driver.all_complete() && dmac.idle(); }, 1000000);

  if (driver.peak_active_chains() != 4) {
    ok = false;
    detail << "peak active chains " << driver.peak_active_chains() << " != 4; ";
  }
  if (driver.chains_retired() != 10) {
    ok = false;
    detail << "retired " << driver.chains_retired() << " != 10; ";
  }
  for (HandleId h : handles) {
    if (driver.state(h) != HandleState::Completed || callback_counts[h] != 1) {
      ok = false;
      detail << "handle " << h << " callbacks=" << callback_counts[h] << "; ";
    }
  }
  // Interrupt count equals the number of chains whose final descriptor
  // carried the interrupt bit when fetched.
  std::uint64_t flagged = 0;
  for (const auto& rec : dmac.frontend().records()) {
    if (rec->descriptor.irq_on_completion()) flagged++;
  }
  if (dmac.frontend().irq_count() != flagged || driver.irq_events() != flagged || flagged != 10) {
    ok = false;
    detail << "irqs " << dmac.frontend().irq_count() << " flagged " << flagged << "; ";
  }
  report(9, "driver flow: 4-chain throttle, 10 chains complete, one callback each", ok,
         detail.str());
}

}  // namespace

int main() {
  try {
    criterion_ideal_law();
    criterion_latency_table();
    criterion_prefetch_ddr3();
    criterion_deep_memory();
    criterion_baseline_gap();
    criterion_zero_penalty();
    criterion_area_model();
    criterion_property_suite();
    criterion_driver_flow();
  } catch (const std::exception& e) {
    std::printf("FAIL suite aborted: %s\n", e.what());
    return 2;
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
