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

/// @file backend.hpp
/// The transfer engine: consumes dispatched linear transfers and streams
/// payload read bursts into mirrored write bursts through its own manager
/// port. Each read beat re-emerges as a write beat read_to_write_latency
/// cycles later; data ordering is preserved end to end.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dmasim/bus.hpp"
#include "dmasim/dmac_types.hpp"
#include "dmasim/interconnect.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

struct BackendConfig {
  std::uint32_t data_width_bits = 64;
  std::uint32_t max_burst_beats = 256;         ///< reads split into bursts of at most this
  std::uint32_t read_to_write_latency = 1;     ///< r-w forwarding delay, >= 1
  std::uint32_t max_outstanding_bursts = 16;   ///< per direction; deep memories need ~2L/period
  std::uint32_t queue_depth = 4;               ///< dispatch slots, wired to descriptors in flight

  void validate() const;
};

class DmaBackend : public BusPortHandler {
public:
  DmaBackend(Simulator& sim, Arbiter& bus, BackendConfig config, const std::string& port_name);

  PortId port() const { return port_; }
  const BackendConfig& config() const { return config_; }

  /// Accept a dispatched transfer; false when all queue slots are busy
  /// (backpressure, the dispatcher retries once a slot frees).
  bool try_dispatch(TransferRecord* rec);

  /// Completion reports, strictly in dispatch order.
  void set_done_callback(std::function<void(TransferRecord*)> cb) { done_cb_ = std::move(cb); }
  /// A queue slot freed (the transfer's read stream fully arrived).
  void set_slot_freed_callback(std::function<void()> cb) { slot_freed_cb_ = std::move(cb); }

  bool idle() const { return active_.empty(); }
  std::size_t queue_occupancy() const { return occupied_slots_; }

  // BusPortHandler
  void on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                    std::uint64_t beat_address, std::span<const std::uint8_t> data) override;
  void on_read_complete(const BusTransaction& txn) override;
  void on_write_complete(const BusTransaction& txn) override;
  void on_bus_fault(const BusTransaction& txn) override;

private:
  struct Chunk {
    std::vector<std::uint8_t> bytes;
    SimTime available_at;
  };
  struct Burst {
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    std::uint64_t len = 0;
    TxnId read_txn = 0;
    TxnId write_txn = 0;
    bool write_acked = false;
    std::vector<Chunk> staged;  ///< read data waiting for the write request
  };
  struct Active {
    TransferRecord* rec = nullptr;
    std::vector<Burst> bursts;
    std::uint64_t total_read_beats = 0;
    std::size_t reads_issued = 0;
    std::size_t writes_requested = 0;
    std::size_t writes_acked = 0;
    bool slot_released = false;
  };

  void plan_bursts(Active& t);
  void issue_reads();
  void pump_writes();
  void release_slot(Active& t);
  void drain_done();
  Active* find_by_read_txn(TxnId id, std::size_t* burst_idx);
  Active* find_by_write_txn(TxnId id, std::size_t* burst_idx);

  Simulator& sim_;
  Arbiter& bus_;
  BackendConfig config_;
  PortId port_;
  std::deque<std::unique_ptr<Active>> active_;   ///< dispatch order, popped once done
  std::size_t occupied_slots_ = 0;
  std::uint32_t reads_outstanding_ = 0;
  std::uint32_t writes_outstanding_ = 0;
  // (transfer, burst) pairs whose write request is waiting for data or credit.
  std::deque<std::pair<Active*, std::size_t>> write_ready_;
  std::function<void(TransferRecord*)> done_cb_;
  std::function<void()> slot_freed_cb_;
};

}  // namespace dmasim
