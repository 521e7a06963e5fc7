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

/// @file baseline.hpp
/// Serialized-fetch reference controller modeling the comparison target: a
/// 416-bit descriptor format of which 256 bits are read through a 32-bit
/// descriptor port (8 bus slots per fetch through the width adapter, no
/// packing), strictly sequential descriptor processing, no speculation. The
/// payload engine is the same transfer engine as the main controller.
///
/// Calibration: first request 10 cycles after launch; a fetched descriptor
/// dispatches 12 cycles after its last beat (request to dispatch = 2L + 20,
/// matching the measured 22 at L=1); the next descriptor read re-arms through
/// the 10-cycle launch path after the dispatch.

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dmasim/backend.hpp"
#include "dmasim/bus.hpp"
#include "dmasim/dmac_types.hpp"
#include "dmasim/interconnect.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

struct BaselineConfig {
  std::uint32_t descriptor_bits = 416;
  std::uint32_t descriptor_read_bits = 256;   ///< portion actually fetched
  std::uint32_t descriptor_port_bits = 32;
  std::uint32_t in_flight = 4;                ///< engine dispatch slots
  std::uint32_t csr_to_request = 10;          ///< launch to first read request
  std::uint32_t dispatch_overhead = 12;       ///< last descriptor beat to dispatch
  std::uint32_t refetch_overhead = 10;        ///< dispatch to next descriptor request
  std::uint32_t csr_queue_depth = 4;

  std::uint32_t descriptor_fetch_beats() const {
    return descriptor_read_bits / descriptor_port_bits;
  }
  void validate() const;
};

class BaselineDmac : public BusPortHandler {
public:
  BaselineDmac(Simulator& sim, Arbiter& bus, BaselineConfig config, BackendConfig engine_config);

  CsrResult csr_write(std::uint64_t head_address);
  bool idle() const;

  const std::vector<std::unique_ptr<TransferRecord>>& records() const { return records_; }
  SimTime first_csr_accept_cycle() const { return first_csr_accept_; }
  const std::vector<FetchLogEntry>& fetch_log() const { return fetch_log_; }
  std::uint64_t fault_count() const { return faults_; }
  std::uint32_t max_desc_reads_in_flight() const { return max_desc_reads_; }
  DmaBackend& engine() { return engine_; }

  // BusPortHandler (descriptor port)
  void on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                    std::uint64_t beat_address, std::span<const std::uint8_t> data) override;
  void on_write_complete(const BusTransaction& txn) override;
  void on_bus_fault(const BusTransaction& txn) override;

private:
  void launch_next_head(SimTime trigger_cycle, FetchTrigger trigger);
  void issue_fetch(std::uint64_t address, FetchTrigger trigger, SimTime trigger_cycle);
  void dispatch_current();
  void after_dispatch(std::uint64_t next, std::uint64_t current_address);
  void end_of_chain_seen();
  void pump_dispatch();
  void on_engine_done(TransferRecord* rec);

  Simulator& sim_;
  Arbiter& bus_;
  BaselineConfig config_;
  BackendConfig engine_config_;
  DmaBackend engine_;
  PortId desc_port_;

  std::deque<std::uint64_t> csr_queue_;
  bool fetch_engine_busy_ = false;
  bool fetch_outstanding_ = false;  ///< strictly one descriptor read at a time
  TxnId fetch_txn_ = 0;
  std::uint64_t fetch_address_ = 0;
  SimTime fetch_issue_cycle_ = 0;
  std::array<std::uint8_t, kDescriptorBytes> fetch_bytes_{};
  std::uint32_t fetch_received_ = 0;
  std::uint32_t max_desc_reads_ = 0;

  std::deque<TransferRecord*> undispatched_;
  bool pumping_ = false;
  std::uint32_t dispatch_events_pending_ = 0;
  std::map<TxnId, TransferRecord*> writebacks_;
  std::vector<std::unique_ptr<TransferRecord>> records_;
  std::vector<FetchLogEntry> fetch_log_;
  SimTime first_csr_accept_ = kNoCycle;
  std::uint64_t faults_ = 0;
};

}  // namespace dmasim
