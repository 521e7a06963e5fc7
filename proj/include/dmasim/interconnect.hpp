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

/// @file interconnect.hpp
/// Fair round-robin arbiter multiplexing manager ports onto the single
/// memory. Read and write grants are independent (split channels); at most
/// one new transaction per direction is granted per cycle; bursts are atomic
/// per direction, so back-to-back reads stream with no idle data cycles.
///
/// A request enqueued in cycle c is eligible for a grant from cycle c+1 on:
/// arbitration costs exactly one cycle when there is no contention.

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmasim/bus.hpp"
#include "dmasim/mem_model.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

class Arbiter {
public:
  Arbiter(Simulator& sim, MemorySystem& memory, BusTrace* trace = nullptr);

  PortId register_port(std::string name, BusPortHandler* handler);
  const std::string& port_name(PortId port) const;

  /// Enqueue a read burst on `port`. Out-of-range bursts never reach the
  /// memory: the issuer gets a bus fault event on the next cycle.
  TxnId request_read(PortId port, std::uint64_t address, std::uint64_t length, PayloadClass cls,
                     std::uint32_t bytes_per_beat = 0);

  /// Enqueue a write burst. The writer streams payload bytes afterwards via
  /// push_write_data(); a burst whose data lags simply stalls the write
  /// channel until the next beat is available.
  TxnId request_write(PortId port, std::uint64_t address, std::uint64_t length, PayloadClass cls,
                      std::uint32_t bytes_per_beat = 0);

  void push_write_data(TxnId id, std::span<const std::uint8_t> bytes, SimTime available_at);

  /// Withdraw a request that has not been granted yet (a discarded
  /// speculative fetch that never reached the bus). Returns false if the
  /// transaction was already granted and is streaming or done.
  bool cancel(TxnId id);

  /// Reclassify the remaining beats of an in-flight transaction as wasted
  /// traffic (discarded speculative fetch whose data still occupies the bus).
  void mark_wasted(TxnId id);

  std::uint64_t grant_count(PortId port, Direction dir) const;
  std::size_t pending(PortId port, Direction dir) const;
  std::uint64_t capacity() const;
  bool in_range(std::uint64_t address, std::uint64_t len) const;

private:
  struct Pending {
    BusTransaction txn;
    std::unique_ptr<WriteStream> stream;  // writes only
  };
  struct PortState {
    std::string name;
    BusPortHandler* handler = nullptr;
    std::deque<Pending> queue[2];  // indexed by Direction
    std::uint64_t grants[2] = {0, 0};
  };

  PortState& port_state(PortId port);
  void ensure_tick(SimTime at);
  void tick();
  bool try_grant(Direction dir);
  void grant(PortState& ps, Pending&& pending);

  Simulator& sim_;
  MemorySystem& memory_;
  BusTrace* trace_;
  std::vector<std::unique_ptr<PortState>> ports_;
  std::size_t rr_next_[2] = {0, 0};  ///< next port to consider, per direction
  SimTime read_next_free_ = 0;       ///< first cycle a new read grant keeps data contiguous
  bool write_busy_ = false;          ///< a write burst owns the write channel
  SimTime last_tick_ = kNoCycle;
  SimTime next_tick_ = kNoCycle;
  // Wasted-transaction ids live until their data drains; kept sorted & small.
  std::vector<TxnId> wasted_ids_;
  TxnId next_txn_ = 1;
};

}  // namespace dmasim
