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

/// @file frontend.hpp
/// Descriptor-handling logic: CSR launch queue, descriptor fetch through its
/// own manager port, speculative sequential prefetching with bounded
/// speculation slots, hand-off to the transfer engine, completion-marker
/// writeback and IRQ signalling.
///
/// Mispredictions are free in latency terms: the corrective fetch is put on
/// the port in the same cycle the next field arrives, exactly as it would be
/// with prefetching disabled. Queued speculative requests that never reached
/// the bus are withdrawn; in-flight ones drain as wasted traffic.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmasim/backend.hpp"
#include "dmasim/bus.hpp"
#include "dmasim/dmac_types.hpp"
#include "dmasim/interconnect.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

struct FrontendConfig {
  std::uint32_t descriptors_in_flight = 4;  ///< d: bound on live descriptor reads
  std::uint32_t prefetch_slots = 0;         ///< s: speculation slots, 0 disables
  std::uint32_t csr_queue_depth = 4;
  std::uint32_t csr_to_request = 3;         ///< CSR acceptance to first read request
  std::uint32_t decode_to_backend = 1;      ///< decoded descriptor to engine hand-off

  void validate() const;
};

/// CSR register map (byte offsets).
inline constexpr std::uint64_t kCsrLaunch = 0x00;  ///< write chain head to launch
inline constexpr std::uint64_t kCsrStatus = 0x08;  ///< bit 0 busy, bits 15:8 queue occupancy

class DmaFrontend : public BusPortHandler {
public:
  DmaFrontend(Simulator& sim, Arbiter& bus, DmaBackend& backend, FrontendConfig config,
              const std::string& port_name);

  /// Launch register: accepts a chain head address, or reports Busy when the
  /// CSR queue is full (the caller retries).
  CsrResult csr_write(std::uint64_t head_address);
  CsrResult csr_write_reg(std::uint64_t offset, std::uint64_t value);
  std::uint64_t csr_read_reg(std::uint64_t offset) const;

  void set_irq_callback(std::function<void(const TransferRecord&)> cb) {
    irq_cb_ = std::move(cb);
  }

  /// Engine-side completion hook; wired up by the Dmac assembly.
  void on_backend_done(TransferRecord* rec);
  /// Engine freed a dispatch slot; retry stalled hand-offs.
  void on_backend_slot_freed();

  bool idle() const;
  PortId port() const { return port_; }
  const FrontendConfig& config() const { return config_; }

  const std::vector<std::unique_ptr<TransferRecord>>& records() const { return records_; }
  const std::vector<FetchLogEntry>& fetch_log() const { return fetch_log_; }

  SimTime first_csr_accept_cycle() const { return first_csr_accept_; }
  std::uint64_t hit_count() const { return hits_; }
  std::uint64_t miss_count() const { return misses_; }
  std::uint64_t unpredicted_count() const { return unpredicted_; }
  std::uint64_t end_of_chain_discards() const { return eoc_discards_; }
  std::uint64_t fault_count() const { return faults_; }
  std::uint64_t irq_count() const { return irqs_; }
  std::uint32_t max_desc_reads_in_flight() const { return max_in_flight_; }
  std::uint32_t max_speculative_outstanding() const { return max_spec_; }

  // BusPortHandler
  void on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                    std::uint64_t beat_address, std::span<const std::uint8_t> data) override;
  void on_write_complete(const BusTransaction& txn) override;
  void on_bus_fault(const BusTransaction& txn) override;

private:
  /// Speculation slot / fetch tracking. Entries live in issue order; data
  /// returns in the same order (the port FIFO never reorders), so a
  /// speculative entry is always resolved before its first beat arrives.
  enum class FetchKind : std::uint8_t { Architectural, Speculative, Committed, Discarded };
  struct FetchEntry {
    std::uint64_t address = 0;
    TxnId txn = 0;
    FetchKind kind = FetchKind::Architectural;
    std::array<std::uint8_t, kDescriptorBytes> bytes{};
    std::uint32_t received = 0;
    bool next_processed = false;
    SimTime issue_cycle = 0;
  };
  struct PendingLaunch {
    std::uint64_t address = 0;
    FetchTrigger trigger = FetchTrigger::Head;
    SimTime trigger_cycle = 0;
  };

  void launch_next_head(SimTime trigger_cycle, FetchTrigger trigger);
  void issue_architectural(std::uint64_t address, FetchTrigger trigger, SimTime trigger_cycle);
  void do_issue(std::uint64_t address, FetchKind kind, FetchTrigger trigger,
                SimTime trigger_cycle);
  void schedule_prefetch();
  void prefetch_tick();
  bool can_prefetch() const;
  void process_next_field(FetchEntry& entry);
  std::uint32_t discard_outstanding_speculation();
  void complete_entry(std::list<FetchEntry>::iterator it);
  void end_of_chain_seen();
  void pump_dispatch();
  void check_credit_bounds() const;

  Simulator& sim_;
  Arbiter& bus_;
  DmaBackend& backend_;
  FrontendConfig config_;
  PortId port_;

  std::deque<std::uint64_t> csr_queue_;
  bool fetch_engine_busy_ = false;  ///< a chain is being (or waiting to be) fetched
  std::list<FetchEntry> window_;
  std::optional<PendingLaunch> pending_arch_;  ///< waiting for an in-flight credit
  std::uint64_t last_requested_ = 0;
  SimTime last_issue_cycle_ = kNoCycle;
  bool stream_active_ = false;  ///< sequential prediction base is valid
  bool prefetch_tick_scheduled_ = false;

  std::uint32_t in_flight_ = 0;   ///< live (non-discarded) descriptor reads
  std::uint32_t spec_outstanding_ = 0;
  std::uint32_t max_in_flight_ = 0;
  std::uint32_t max_spec_ = 0;

  std::deque<TransferRecord*> undispatched_;  ///< decoded, engine queue was full
  bool pumping_ = false;
  std::uint32_t dispatch_events_pending_ = 0;
  std::map<TxnId, TransferRecord*> writebacks_;

  std::vector<std::unique_ptr<TransferRecord>> records_;
  std::vector<FetchLogEntry> fetch_log_;
  std::function<void(const TransferRecord&)> irq_cb_;

  SimTime first_csr_accept_ = kNoCycle;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t unpredicted_ = 0;
  std::uint64_t eoc_discards_ = 0;
  std::uint64_t faults_ = 0;
  std::uint64_t irqs_ = 0;
};

}  // namespace dmasim
