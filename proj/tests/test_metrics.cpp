#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmasim/metrics.hpp"
#include "dmasim/scenario.hpp"

#include <cmath>

using namespace dmasim;

TEST_CASE("bandwidth ceiling law at the named sizes") {
  CHECK(ideal_utilization(64) == doctest::Approx(64.0 / 96.0).epsilon(1e-12));
  CHECK(ideal_utilization(0) == 0.0);
  CHECK(ideal_utilization(256) == doctest::Approx(256.0 / 288.0).epsilon(1e-12));
}

TEST_CASE("area model reproduces the fitted points exactly") {
  CHECK(estimate_area(4, 0) == doctest::Approx(41.42).epsilon(1e-12));
  CHECK(estimate_area(4, 4) == doctest::Approx(49.18).epsilon(1e-12));
  CHECK(estimate_area(24, 24) == doctest::Approx(193.58).epsilon(1e-12));
  CHECK_THROWS_AS(estimate_area(0, 0), MetricsError);
}

TEST_CASE("area model is affine in both parameters") {
  for (std::uint32_t d = 2; d <= 32; ++d) {
    for (std::uint32_t s = 0; s <= 32; s += 8) {
      CHECK(estimate_area(d, s) - estimate_area(d - 1, s) == doctest::Approx(5.28).epsilon(1e-9));
    }
  }
  for (std::uint32_t s = 1; s <= 32; ++s) {
    CHECK(estimate_area(4, s) - estimate_area(4, s - 1) == doctest::Approx(1.94).epsilon(1e-9));
  }
}

namespace {

std::vector<TransferRecord> synthetic_records(std::size_t count, SimTime first_beat,
                                              SimTime period, std::uint64_t beats) {
  // Perfectly periodic payload stream: one transfer of `beats` dense beats
  // every `period` cycles.
  std::vector<TransferRecord> recs(count);
  for (std::size_t i = 0; i < count; ++i) {
    recs[i].index = i;
    recs[i].payload_read_beats = beats;
    recs[i].first_payload_read_beat = first_beat + period * i;
    recs[i].last_payload_read_beat = first_beat + period * i + beats - 1;
    recs[i].state = TransferState::Done;
  }
  return recs;
}

}  // namespace

TEST_CASE("windowed utilization is exact on a synthetic periodic stream") {
  const auto recs = synthetic_records(40, 100, 12, 8);
  const MeasurementWindow window{8, 24};
  CHECK(measure_utilization(recs, window) == doctest::Approx(8.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("windowed utilization rejects windows outside the run") {
  const auto recs = synthetic_records(10, 100, 12, 8);
  CHECK_THROWS_AS(measure_utilization(recs, MeasurementWindow{8, 24}), MetricsError);
}

TEST_CASE("latency probes demand at least one launched transfer") {
  BusTrace trace;
  CHECK_THROWS_AS(latency_probes(0, {}, trace), MetricsError);
}

TEST_CASE("serialized-fetch floor bounds the measured DDR3 utilization") {
  // Closed-form oracle for a controller that cannot overlap a descriptor
  // fetch with anything: per transfer n/8 payload beats after a full
  // arbitration + fetch + latency round trip of n/8 + 4 + 2L cycles. The
  // pipelined controller must land between that floor and the ceiling.
  const std::uint32_t n = 64;
  const std::uint32_t latency = 13;
  const double floor_util =
      (n / 8.0) / (n / 8.0 + 4.0 + 2.0 * latency);
  const RunOutcome out = run_scenario(preset_scenario("base", latency, n));
  CHECK(out.report.steady_state_utilization >= floor_util - 1e-9);
  CHECK(out.report.steady_state_utilization < ideal_utilization(n));
}

TEST_CASE("rf_rb minus 2L is constant across memory depths") {
  std::vector<SimTime> residuals;
  for (const std::uint32_t latency : {1u, 13u, 100u}) {
    ScenarioConfig cfg = preset_scenario("scaled", latency, 64);
    cfg.workload.transfer_count = 1;
    const RunOutcome out = run_scenario(cfg);
    residuals.push_back(out.report.probes.rf_rb - 2ull * latency);
  }
  CHECK(residuals == std::vector<SimTime>{6, 6, 6});
}

TEST_CASE("beat classes partition the granted data beats") {
  RunOptions opts;
  opts.keep_trace = true;
  ScenarioConfig cfg = preset_scenario("speculation", 13, 64);
  cfg.workload.transfer_count = 64;
  cfg.workload.placement = Placement::RandomizedNext;
  cfg.workload.hit_rate = 0.5;
  const RunOutcome out = run_scenario(cfg, opts);
  const BeatTotals totals = count_beats(out.trace);
  CHECK(totals.total() == out.trace.beats.size());
  CHECK(totals.payload > 0);
  CHECK(totals.descriptor > 0);
  CHECK(totals.wasted > 0);
  CHECK(totals.writeback == 64);
}

TEST_CASE("measured utilization never beats the wasted-adjusted ceiling") {
  for (const double hit_rate : {1.0, 0.5, 0.0}) {
    ScenarioConfig cfg = preset_scenario("speculation", 13, 64);
    cfg.workload.placement = Placement::RandomizedNext;
    cfg.workload.hit_rate = hit_rate;
    const RunOutcome out = run_scenario(cfg);
    const double wasted_per_transfer =
        static_cast<double>(out.report.beats.wasted) / static_cast<double>(out.report.transfers);
    const double ceiling = 64.0 / (64.0 + 32.0 * (1.0 + wasted_per_transfer / 4.0));
    CHECK(out.report.steady_state_utilization <= ceiling + 0.005);
  }
  // Deep-memory scaled point: heavy prefetch must not let the window beat
  // the ceiling either.
  const RunOutcome deep = run_scenario(preset_scenario("scaled", 100, 128));
  CHECK(deep.report.steady_state_utilization <= ideal_utilization(128) + 0.005);
}

TEST_CASE("reports serialize to the documented CSV row and key-value forms") {
  RunReport rep;
  rep.config_name = "base";
  rep.memory_latency = 13;
  rep.transfer_size = 64;
  rep.hit_rate = 1.0;
  rep.steady_state_utilization = 0.285714;
  rep.probes = LatencyProbes{3, 32, 1};
  rep.beats = BeatTotals{2048, 1024, 0, 256};
  rep.miss_count = 0;
  rep.hit_count = 255;
  rep.total_cycles = 7168;
  rep.transfers = 256;
  CHECK(RunReport::csv_header() ==
        "config,latency,size,hit_rate,utilization,i_rf,rf_rb,r_w,payload_beats,descriptor_beats,"
        "wasted_beats,writeback_beats,miss_count,hit_count,total_cycles,transfers");
  CHECK(rep.csv_row() ==
        "base,13,64,1.0000,0.285714,3,32,1,2048,1024,0,256,0,255,7168,256");
  const std::string kv = rep.to_kv();
  CHECK(kv.find("utilization 0.285714\n") != std::string::npos);
  CHECK(kv.find("rf_rb 32\n") != std::string::npos);
}
