#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmasim/metrics.hpp"
#include "dmasim/scenario.hpp"

#include <cmath>

using namespace dmasim;

namespace {

ScenarioConfig baseline_cfg(std::uint32_t latency, std::uint32_t size, std::uint64_t count) {
  ScenarioConfig cfg = preset_scenario("baseline", latency, size);
  cfg.workload.transfer_count = count;
  return cfg;
}

}  // namespace

TEST_CASE("serialized-fetch launch latency is 10 cycles") {
  const RunOutcome out = run_scenario(baseline_cfg(1, 64, 1));
  CHECK(out.report.probes.i_rf == 10);
}

TEST_CASE("descriptor-request-to-engine latency is 2L+20") {
  CHECK(run_scenario(baseline_cfg(1, 64, 1)).report.probes.rf_rb == 22);
  CHECK(run_scenario(baseline_cfg(13, 64, 1)).report.probes.rf_rb == 46);
  CHECK(run_scenario(baseline_cfg(100, 64, 1)).report.probes.rf_rb == 220);
}

TEST_CASE("read-to-write forwarding matches the main engine at 1 cycle") {
  CHECK(run_scenario(baseline_cfg(13, 64, 4)).report.probes.r_w == 1);
}

TEST_CASE("descriptor fetch occupies 8 bus slots through the 32-bit port") {
  RunOptions opts;
  opts.keep_trace = true;
  const RunOutcome out = run_scenario(baseline_cfg(1, 64, 1), opts);
  std::uint64_t desc_beats = 0;
  SimTime first = kNoCycle, last = 0;
  for (const BeatRecord& b : out.trace.beats) {
    if (b.cls != PayloadClass::Descriptor || b.dir != Direction::Read) continue;
    desc_beats++;
    if (first == kNoCycle) first = b.cycle;
    last = b.cycle;
  }
  CHECK(desc_beats == 8);
  CHECK(last - first + 1 >= 8);
}

TEST_CASE("at most one descriptor read is ever outstanding") {
  const RunOutcome out = run_scenario(baseline_cfg(13, 64, 32));
  CHECK(out.max_desc_reads_in_flight == 1);
  CHECK(out.max_speculative_outstanding == 0);
  CHECK(out.integrity_ok);
}

TEST_CASE("descriptor fetches re-arm with a 2L+30 period") {
  const RunOutcome out = run_scenario(baseline_cfg(13, 64, 16));
  REQUIRE(out.fetch_log.size() == 16);
  for (std::size_t i = 0; i + 1 < out.fetch_log.size(); ++i) {
    CHECK(out.fetch_log[i + 1].issue_cycle - out.fetch_log[i].issue_cycle == 2 * 13 + 30);
  }
}

TEST_CASE("payload integrity and completion markers hold for the baseline") {
  RunOptions opts;
  opts.keep_trace = true;
  const RunOutcome out = run_scenario(baseline_cfg(1, 128, 24), opts);
  CHECK(out.integrity_ok);
  CHECK(out.transfers_completed == 24);
  // Marker writes pass through the 32-bit port: 2 slots per marker.
  CHECK(out.report.beats.writeback == 2 * 24);
}

TEST_CASE("baseline utilization never beats the main controller") {
  for (const std::uint32_t latency : {1u, 13u}) {
    for (const std::uint32_t n : {16u, 64u, 256u, 1024u}) {
      ScenarioConfig b = baseline_cfg(latency, n, 80);
      b.window.warmup_transfers = 8;
      b.window.measured_transfers = 64;
      ScenarioConfig m = preset_scenario("base", latency, n);
      m.workload.transfer_count = 80;
      m.window = b.window;
      const double ub = run_scenario(b).report.steady_state_utilization;
      const double um = run_scenario(m).report.steady_state_utilization;
      CHECK(ub <= um + 1e-9);
    }
  }
}

TEST_CASE("ideal-memory 64 B gap to the main controller is near 2.5x") {
  ScenarioConfig b = baseline_cfg(1, 64, 272);
  ScenarioConfig m = preset_scenario("base", 1, 64);
  const double ub = run_scenario(b).report.steady_state_utilization;
  const double um = run_scenario(m).report.steady_state_utilization;
  const double ratio = um / ub;
  CHECK(ratio >= 2.0);
  CHECK(ratio <= 3.0);
}
