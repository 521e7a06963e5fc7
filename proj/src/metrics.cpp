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

#include "dmasim/metrics.hpp"

#include <cstdio>
#include <sstream>

namespace dmasim {

namespace {

std::string fmt_double(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_cycle(SimTime v) {
  return v == kNoCycle ? std::string("-") : std::to_string(v);
}

}  // namespace

double ideal_utilization(std::uint64_t transfer_bytes) {
  if (transfer_bytes == 0) return 0.0;
  return static_cast<double>(transfer_bytes) / static_cast<double>(transfer_bytes + 32);
}

double estimate_area(std::uint32_t descriptors_in_flight, std::uint32_t prefetch_slots) {
  if (descriptors_in_flight < 1) {
    throw MetricsError("area model requires at least one descriptor in flight");
  }
  return 20.30 + 5.28 * descriptors_in_flight + 1.94 * prefetch_slots;
}

double measure_utilization(std::span<const TransferRecord> records,
                           const MeasurementWindow& window) {
  const std::uint64_t warmup = window.warmup_transfers;
  const std::uint64_t measured = window.measured_transfers;
  if (records.size() < warmup + measured || measured == 0) {
    throw MetricsError("measurement window lies outside the run (" +
                       std::to_string(records.size()) + " transfers, window needs " +
                       std::to_string(warmup + measured) + ")");
  }

  std::uint64_t beats = 0;
  SimTime window_end = kNoCycle;
  for (std::uint64_t i = warmup; i < warmup + measured; ++i) {
    beats += records[i].payload_read_beats;
    if (records[i].last_payload_read_beat != kNoCycle) {
      window_end = records[i].last_payload_read_beat;
    }
  }
  if (beats == 0) return 0.0;  // nothing but zero-length transfers

  // Window start: the last payload beat before the measured range; for a
  // run measured from the first transfer, the cycle before its first beat.
  SimTime window_start = kNoCycle;
  for (std::uint64_t i = warmup; i-- > 0;) {
    if (records[i].last_payload_read_beat != kNoCycle) {
      window_start = records[i].last_payload_read_beat;
      break;
    }
  }
  if (window_start == kNoCycle) {
    for (std::uint64_t i = warmup; i < warmup + measured; ++i) {
      if (records[i].first_payload_read_beat != kNoCycle) {
        window_start = records[i].first_payload_read_beat - 1;
        break;
      }
    }
  }
  if (window_end == kNoCycle || window_start == kNoCycle || window_end <= window_start) {
    throw MetricsError("degenerate measurement window");
  }
  return static_cast<double>(beats) / static_cast<double>(window_end - window_start);
}

LatencyProbes latency_probes(SimTime csr_accept_cycle, std::span<const TransferRecord> records,
                             const BusTrace& trace) {
  if (records.empty() || csr_accept_cycle == kNoCycle) {
    throw MetricsError("latency probes need at least one launched transfer");
  }
  const TransferRecord& first = records[0];
  if (first.fetch_issue_cycle == kNoCycle || first.dispatch_cycle == kNoCycle) {
    throw MetricsError("first transfer never reached the engine; probes undefined");
  }
  LatencyProbes probes;
  probes.i_rf = first.fetch_issue_cycle - csr_accept_cycle;
  probes.rf_rb = first.dispatch_cycle - first.fetch_issue_cycle;

  SimTime first_read = kNoCycle;
  for (const BeatRecord& b : trace.beats) {
    if (b.cls != PayloadClass::Payload) continue;
    if (b.dir == Direction::Read && first_read == kNoCycle) {
      first_read = b.cycle;
    } else if (b.dir == Direction::Write && first_read != kNoCycle) {
      probes.r_w = b.cycle - first_read;
      break;
    }
  }
  return probes;
}

BeatTotals count_beats(const BusTrace& trace) {
  BeatTotals totals;
  for (const BeatRecord& b : trace.beats) {
    switch (b.cls) {
      case PayloadClass::Payload: totals.payload++; break;
      case PayloadClass::Descriptor: totals.descriptor++; break;
      case PayloadClass::Wasted: totals.wasted++; break;
      case PayloadClass::Writeback: totals.writeback++; break;
    }
  }
  return totals;
}

std::string RunReport::csv_header() {
  return "config,latency,size,hit_rate,utilization,i_rf,rf_rb,r_w,"
         "payload_beats,descriptor_beats,wasted_beats,writeback_beats,"
         "miss_count,hit_count,total_cycles,transfers";
}

std::string RunReport::csv_row() const {
  std::ostringstream out;
  out << config_name << ',' << memory_latency << ',' << transfer_size << ','
      << fmt_double(hit_rate, 4) << ',' << fmt_double(steady_state_utilization) << ','
      << fmt_cycle(probes.i_rf) << ',' << fmt_cycle(probes.rf_rb) << ',' << fmt_cycle(probes.r_w)
      << ',' << beats.payload << ',' << beats.descriptor << ',' << beats.wasted << ','
      << beats.writeback << ',' << miss_count << ',' << hit_count << ',' << total_cycles << ','
      << transfers;
  return out.str();
}

std::string RunReport::to_kv() const {
  std::ostringstream out;
  out << "config " << config_name << '\n'
      << "latency " << memory_latency << '\n'
      << "size " << transfer_size << '\n'
      << "hit_rate " << fmt_double(hit_rate, 4) << '\n'
      << "utilization " << fmt_double(steady_state_utilization) << '\n'
      << "i_rf " << fmt_cycle(probes.i_rf) << '\n'
      << "rf_rb " << fmt_cycle(probes.rf_rb) << '\n'
      << "r_w " << fmt_cycle(probes.r_w) << '\n'
      << "payload_beats " << beats.payload << '\n'
      << "descriptor_beats " << beats.descriptor << '\n'
      << "wasted_beats " << beats.wasted << '\n'
      << "writeback_beats " << beats.writeback << '\n'
      << "miss_count " << miss_count << '\n'
      << "hit_count " << hit_count << '\n'
      << "total_cycles " << total_cycles << '\n'
      << "transfers " << transfers << '\n';
  return out.str();
}

}  // namespace dmasim
