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

#include "dmasim/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "dmasim/dmac.hpp"
#include "dmasim/interconnect.hpp"

namespace dmasim {

ScenarioConfig preset_scenario(const std::string& config_name, std::uint32_t memory_latency,
                               std::uint64_t transfer_size) {
  ScenarioConfig cfg;
  cfg.name = config_name;
  cfg.memory.one_way_latency = memory_latency;
  cfg.workload.sizes = {static_cast<std::uint32_t>(transfer_size)};
  // Tail margin past the measured window: near the end of a chain the fetch
  // stream has already gone quiet and the last payloads bunch up, which would
  // bias a window that touches them.
  cfg.workload.transfer_count =
      cfg.window.warmup_transfers + cfg.window.measured_transfers + 32;
  if (config_name == "base") {
    cfg.frontend.descriptors_in_flight = 4;
    cfg.frontend.prefetch_slots = 0;
  } else if (config_name == "speculation") {
    cfg.frontend.descriptors_in_flight = 4;
    cfg.frontend.prefetch_slots = 4;
  } else if (config_name == "scaled") {
    cfg.frontend.descriptors_in_flight = 24;
    cfg.frontend.prefetch_slots = 24;
    cfg.backend.max_outstanding_bursts = 24;
  } else if (config_name == "baseline") {
    cfg.kind = DmacKind::Baseline;
  } else {
    throw std::invalid_argument("unknown configuration preset: " + config_name);
  }
  return cfg;
}

MeasurementWindow clamp_window(const MeasurementWindow& window, std::uint64_t transfers) {
  MeasurementWindow w = window;
  if (transfers == 0) return MeasurementWindow{0, 0};
  if (std::uint64_t{w.warmup_transfers} + w.measured_transfers > transfers) {
    if (transfers > w.warmup_transfers) {
      w.measured_transfers = static_cast<std::uint32_t>(transfers - w.warmup_transfers);
    } else {
      w.warmup_transfers = static_cast<std::uint32_t>(transfers > 1 ? 1 : 0);
      w.measured_transfers = static_cast<std::uint32_t>(transfers - w.warmup_transfers);
    }
  }
  return w;
}

namespace {

std::uint64_t cycle_budget(const ScenarioConfig& cfg, const BuiltWorkload& built) {
  if (cfg.max_cycles != 0) return cfg.max_cycles;
  const std::uint64_t latency = cfg.memory.one_way_latency;
  // Worst case is the fully serialized baseline: per transfer one descriptor
  // round trip, the payload stream and the writeback, plus fixed overheads.
  std::uint64_t per_transfer = 8 * latency + 128;
  std::uint64_t payload_cycles = 4 * built.payload_bytes / (cfg.memory.bytes_per_beat()) + 1024;
  return 100000 + per_transfer * (built.transfers.size() + 4) + payload_cycles;
}

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  BuiltWorkload built = build_workload(config.workload);

  MemoryConfig mem_cfg = config.memory;
  mem_cfg.capacity = std::max(mem_cfg.capacity, built.required_capacity);

  Simulator sim;
  BusTrace trace;
  MemorySystem memory(sim, mem_cfg, &trace);
  Arbiter bus(sim, memory, &trace);

  preload_workload(memory, built, config.workload.seed);

  std::optional<Dmac> main_dmac;
  std::optional<BaselineDmac> baseline_dmac;
  BackendConfig be = config.backend;
  be.data_width_bits = mem_cfg.data_width_bits;
  if (config.kind == DmacKind::Main) {
    main_dmac.emplace(sim, bus, config.frontend, be);
  } else {
    baseline_dmac.emplace(sim, bus, config.baseline, be);
  }

  const std::uint64_t expected = built.transfers.size();
  if (expected > 0) {
    const std::uint64_t head = built.chain.head_address;
    sim.schedule(0, "harness.launch", [&, head]() {
      const CsrResult r = config.kind == DmacKind::Main ? main_dmac->csr_write(head)
                                                        : baseline_dmac->csr_write(head);
      if (r != CsrResult::Accepted) {
        throw SimContractError("launch rejected: CSR queue full at cycle 0");
      }
    });
  }

  const auto& records_ref = config.kind == DmacKind::Main ? main_dmac->frontend().records()
                                                          : baseline_dmac->records();
  auto finished = [&]() {
    const bool engine_idle =
        config.kind == DmacKind::Main ? main_dmac->idle() : baseline_dmac->idle();
    if (!engine_idle) return false;
    std::uint64_t done = 0;
    for (const auto& rec : records_ref) {
      if (rec->state == TransferState::Done) done++;
    }
    return done >= expected;
  };

  RunOutcome outcome;
  outcome.total_cycles = sim.run_until(finished, cycle_budget(config, built));

  // Snapshot bookkeeping before the components go away.
  outcome.records.reserve(records_ref.size());
  for (const auto& rec : records_ref) outcome.records.push_back(*rec);
  if (config.kind == DmacKind::Main) {
    const DmaFrontend& fe = main_dmac->frontend();
    outcome.fetch_log = fe.fetch_log();
    outcome.max_desc_reads_in_flight = fe.max_desc_reads_in_flight();
    outcome.max_speculative_outstanding = fe.max_speculative_outstanding();
  } else {
    outcome.fetch_log = baseline_dmac->fetch_log();
    outcome.max_desc_reads_in_flight = baseline_dmac->max_desc_reads_in_flight();
  }
  for (const TransferRecord& rec : outcome.records) {
    if (rec.state == TransferState::Done) outcome.transfers_completed++;
  }

  if (options.verify_integrity && expected > 0) {
    outcome.integrity_ok =
        verify_payload(memory, built, config.workload.seed, &outcome.integrity_error);
    // Completion markers: first 8 bytes of every completed descriptor hold
    // all ones; the remaining fields stay untouched.
    if (outcome.integrity_ok) {
      for (const TransferRecord& rec : outcome.records) {
        if (rec.state != TransferState::Done || rec.failed) continue;
        const auto bytes = memory.backdoor_read(rec.descriptor_address, kDescriptorBytes);
        for (int i = 0; i < 8; ++i) {
          if (bytes[static_cast<std::size_t>(i)] != 0xFF) {
            outcome.integrity_ok = false;
            outcome.integrity_error =
                "missing completion marker at 0x" + std::to_string(rec.descriptor_address);
            break;
          }
        }
        const Descriptor after = decode(bytes);
        if (outcome.integrity_ok &&
            (after.next != rec.descriptor.next || after.source != rec.descriptor.source ||
             after.destination != rec.descriptor.destination)) {
          outcome.integrity_ok = false;
          outcome.integrity_error = "completion marker clobbered descriptor fields";
        }
        if (!outcome.integrity_ok) break;
      }
    }
  }

  // Report assembly.
  RunReport& rep = outcome.report;
  rep.config_name = config.name;
  rep.memory_latency = config.memory.one_way_latency;
  rep.transfer_size = config.workload.fixed_size();
  rep.hit_rate = config.workload.placement == Placement::RandomizedNext
                     ? config.workload.hit_rate
                     : 1.0;
  rep.beats = count_beats(trace);
  rep.total_cycles = outcome.total_cycles;
  rep.transfers = outcome.transfers_completed;
  if (config.kind == DmacKind::Main) {
    rep.hit_count = main_dmac->frontend().hit_count();
    rep.miss_count = main_dmac->frontend().miss_count();
  }
  if (expected > 0) {
    const SimTime accept = config.kind == DmacKind::Main
                               ? main_dmac->frontend().first_csr_accept_cycle()
                               : baseline_dmac->first_csr_accept_cycle();
    rep.probes = latency_probes(accept, outcome.records, trace);
    const MeasurementWindow window = clamp_window(config.window, expected);
    if (window.measured_transfers > 0) {
      rep.steady_state_utilization = measure_utilization(outcome.records, window);
    }
  }

  if (options.keep_trace) outcome.trace = std::move(trace);
  return outcome;
}

void export_workload(const ScenarioConfig& config, const std::string& chain_path,
                     const std::string& image_path) {
  const BuiltWorkload built = build_workload(config.workload);
  MemoryConfig mem_cfg = config.memory;
  mem_cfg.capacity = std::max(mem_cfg.capacity, built.required_capacity);
  Simulator sim;
  MemorySystem memory(sim, mem_cfg);
  preload_workload(memory, built, config.workload.seed);
  memory.dump_image(image_path, 0, built.required_capacity);
  const std::vector<std::uint8_t> blob = serialize_chain(built.chain);
  std::ofstream out(chain_path, std::ios::binary);
  if (!out) throw MemoryError("cannot write chain file: " + chain_path);
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size()));
}

RunOutcome run_replay(const std::string& chain_path, const std::string& image_path,
                      const ScenarioConfig& rig, const RunOptions& options) {
  std::ifstream in(chain_path, std::ios::binary);
  if (!in) throw MemoryError("cannot open chain file: " + chain_path);
  std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  const DescriptorChain chain = deserialize_chain(blob);

  Simulator sim;
  BusTrace trace;
  MemoryConfig mem_cfg = rig.memory;
  // Size the memory from the image header, then load it for real.
  {
    std::ifstream img(image_path, std::ios::binary);
    if (!img) throw MemoryError("cannot open image file: " + image_path);
    char magic[8];
    std::uint8_t hdr[16];
    img.read(magic, 8);
    img.read(reinterpret_cast<char*>(hdr), 16);
    if (!img) throw MemoryError("not a memory image file: " + image_path);
    std::uint64_t base = 0, len = 0;
    for (int i = 7; i >= 0; --i) base = (base << 8) | hdr[i];
    for (int i = 7; i >= 0; --i) len = (len << 8) | hdr[8 + i];
    mem_cfg.capacity = std::max<std::uint64_t>(mem_cfg.capacity, base + len + 64 * 32);
  }
  MemorySystem memory(sim, mem_cfg, &trace);
  memory.load_image(image_path);

  // Walk the chain out of the loaded memory; a corrupt file fails here.
  const DescriptorChain walked = validate_chain(
      [&](std::uint64_t addr, std::span<std::uint8_t> out_bytes) {
        if (!memory.in_range(addr, out_bytes.size())) return false;
        const auto bytes = memory.backdoor_read(addr, out_bytes.size());
        std::copy(bytes.begin(), bytes.end(), out_bytes.begin());
        return true;
      },
      chain.head_address, chain.size() + 1);
  if (!(walked.entries == chain.entries)) {
    throw ChainError(ChainFaultKind::Unreadable, chain.head_address,
                     "chain file does not match the memory image");
  }

  Arbiter bus(sim, memory, &trace);
  BackendConfig be = rig.backend;
  be.data_width_bits = mem_cfg.data_width_bits;
  std::optional<Dmac> main_dmac;
  std::optional<BaselineDmac> baseline_dmac;
  if (rig.kind == DmacKind::Main) {
    main_dmac.emplace(sim, bus, rig.frontend, be);
  } else {
    baseline_dmac.emplace(sim, bus, rig.baseline, be);
  }
  const std::uint64_t expected = chain.size();
  if (expected > 0) {
    const std::uint64_t head = chain.head_address;
    sim.schedule(0, "harness.launch", [&, head]() {
      const CsrResult r = rig.kind == DmacKind::Main ? main_dmac->csr_write(head)
                                                     : baseline_dmac->csr_write(head);
      if (r != CsrResult::Accepted) throw SimContractError("replay launch rejected");
    });
  }
  const auto& records_ref = rig.kind == DmacKind::Main ? main_dmac->frontend().records()
                                                       : baseline_dmac->records();
  auto finished = [&]() {
    const bool idle = rig.kind == DmacKind::Main ? main_dmac->idle() : baseline_dmac->idle();
    if (!idle) return false;
    std::uint64_t done = 0;
    for (const auto& rec : records_ref) {
      if (rec->state == TransferState::Done) done++;
    }
    return done >= expected;
  };

  RunOutcome outcome;
  std::uint64_t payload_bytes = 0;
  for (const ChainEntry& e : chain.entries) payload_bytes += e.descriptor.length;
  std::uint64_t budget = rig.max_cycles;
  if (budget == 0) {
    budget = 100000 + (8ull * mem_cfg.one_way_latency + 128) * (expected + 4) +
             4 * payload_bytes / mem_cfg.bytes_per_beat() + 1024;
  }
  outcome.total_cycles = sim.run_until(finished, budget);
  for (const auto& rec : records_ref) outcome.records.push_back(*rec);
  for (const TransferRecord& rec : outcome.records) {
    if (rec.state == TransferState::Done) outcome.transfers_completed++;
  }
  if (options.verify_integrity) {
    for (const TransferRecord& rec : outcome.records) {
      if (rec.state != TransferState::Done || rec.failed) continue;
      const auto bytes = memory.backdoor_read(rec.descriptor_address, 8);
      if (!std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0xFF; })) {
        outcome.integrity_ok = false;
        outcome.integrity_error = "missing completion marker in replay";
        break;
      }
    }
  }
  RunReport& rep = outcome.report;
  rep.config_name = rig.name;
  rep.memory_latency = mem_cfg.one_way_latency;
  rep.beats = count_beats(trace);
  rep.total_cycles = outcome.total_cycles;
  rep.transfers = outcome.transfers_completed;
  if (expected > 0) {
    const SimTime accept = rig.kind == DmacKind::Main
                               ? main_dmac->frontend().first_csr_accept_cycle()
                               : baseline_dmac->first_csr_accept_cycle();
    rep.probes = latency_probes(accept, outcome.records, trace);
    const MeasurementWindow window = clamp_window(rig.window, expected);
    if (window.measured_transfers > 0) {
      rep.steady_state_utilization = measure_utilization(outcome.records, window);
    }
  }
  if (options.keep_trace) outcome.trace = std::move(trace);
  return outcome;
}

}  // namespace dmasim
