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

/// @file metrics.hpp
/// Post-run measurement: steady-state bus utilization, latency probes, beat
/// accounting by traffic class, and the gate-count cost model.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmasim/bus.hpp"
#include "dmasim/dmac_types.hpp"

namespace dmasim {

class MetricsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bandwidth ceiling: each transfer interleaves its payload with one 32-byte
/// descriptor fetch on the shared read channel, so utilization can reach at
/// most n / (n + 32) for n-byte transfers.
double ideal_utilization(std::uint64_t transfer_bytes);

/// Gate-count model, in kGE, as a function of descriptors in flight d and
/// speculation slots s: A = 20.30 + 5.28 d + 1.94 s.
double estimate_area(std::uint32_t descriptors_in_flight, std::uint32_t prefetch_slots);

struct MeasurementWindow {
  std::uint32_t warmup_transfers = 16;
  std::uint32_t measured_transfers = 256;
};

/// Steady-state utilization over the measured transfers: payload read beats
/// observed on the engine's manager port divided by the window span. The
/// window is clipped to payload-beat boundaries (from the last payload beat
/// preceding the measured range to the last payload beat inside it), which
/// pins the measurement to within one descriptor fetch of the steady-state
/// value instead of leaving it asymptotic in the run length.
double measure_utilization(std::span<const TransferRecord> records,
                           const MeasurementWindow& window);

struct LatencyProbes {
  SimTime i_rf = kNoCycle;   ///< launch acceptance to first descriptor request
  SimTime rf_rb = kNoCycle;  ///< descriptor request to engine hand-off
  SimTime r_w = kNoCycle;    ///< payload read beat to its write beat
};

/// First-transfer latency probes. Throws MetricsError when no transfer ran.
LatencyProbes latency_probes(SimTime csr_accept_cycle, std::span<const TransferRecord> records,
                             const BusTrace& trace);

struct BeatTotals {
  std::uint64_t payload = 0;
  std::uint64_t descriptor = 0;
  std::uint64_t wasted = 0;
  std::uint64_t writeback = 0;

  std::uint64_t total() const { return payload + descriptor + wasted + writeback; }
};

/// Count every data beat in the trace by effective class (both directions).
BeatTotals count_beats(const BusTrace& trace);

/// One run's results. Serializes to a flat key-value record and to one CSV
/// row with a fixed column order:
///   config,latency,size,hit_rate,utilization,i_rf,rf_rb,r_w,
///   payload_beats,descriptor_beats,wasted_beats,writeback_beats,
///   miss_count,hit_count,total_cycles,transfers
struct RunReport {
  std::string config_name;
  std::uint32_t memory_latency = 0;
  std::uint64_t transfer_size = 0;  ///< 0 when sizes are mixed
  double hit_rate = 1.0;

  double steady_state_utilization = 0.0;
  BeatTotals beats;
  LatencyProbes probes;
  std::uint64_t miss_count = 0;
  std::uint64_t hit_count = 0;
  SimTime total_cycles = 0;
  std::uint64_t transfers = 0;

  static std::string csv_header();
  std::string csv_row() const;
  std::string to_kv() const;
};

}  // namespace dmasim
