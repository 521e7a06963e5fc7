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

/// @file mem_model.hpp
/// Byte-addressable simulated memory with a configurable one-way latency.
/// The latency L is charged on both traversals of the memory path: a read
/// burst granted at cycle g returns its first beat at g + 2L and one beat per
/// cycle after that; a write is acknowledged 2L after its last absorbed beat.
/// Requests pipeline freely; serialization happens at the arbiter.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dmasim/bus.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

struct MemoryConfig {
  std::uint32_t one_way_latency = 1;            ///< cycles, >= 1
  std::uint32_t data_width_bits = 64;           ///< one of 16/32/64/128/256/512
  std::uint64_t capacity = 16ull * 1024 * 1024; ///< bytes

  std::uint32_t bytes_per_beat() const { return data_width_bits / 8; }
  void validate() const;
};

class MemoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Data a writer streams into an in-flight write transaction. Bytes arrive in
/// order as (chunk, available_at) pairs; the memory absorbs one beat per cycle
/// and never before the beat's last byte is available.
class WriteStream {
public:
  void push(std::span<const std::uint8_t> bytes, SimTime available_at);

  std::uint64_t bytes_pushed() const { return data_.size(); }
  /// Cycle at which byte index `upto - 1` became available; 0 if upto == 0.
  SimTime available_at(std::uint64_t upto) const;
  std::span<const std::uint8_t> bytes() const { return data_; }

private:
  std::vector<std::uint8_t> data_;
  std::vector<std::pair<std::uint64_t, SimTime>> marks_;  ///< (cumulative end, cycle)
};

class MemorySystem {
public:
  MemorySystem(Simulator& sim, MemoryConfig config, BusTrace* trace = nullptr);

  const MemoryConfig& config() const { return config_; }

  /// Instantaneous access, zero simulated cycles. Out of range throws.
  void backdoor_write(std::uint64_t address, std::span<const std::uint8_t> bytes);
  std::vector<std::uint8_t> backdoor_read(std::uint64_t address, std::uint64_t len) const;

  bool in_range(std::uint64_t address, std::uint64_t len) const {
    return len <= config_.capacity && address <= config_.capacity - len;
  }

  /// Service a granted read burst: snapshot the bytes now, deliver beats at
  /// grant + 2L, +1 per beat, to the owning handler.
  void service_read(const BusTransaction& txn, SimTime grant_cycle, BusPortHandler* handler);

  /// Service a granted write burst. Beats are absorbed one per cycle as their
  /// data becomes available in `stream`; `on_last_beat(cycle)` fires when the
  /// write channel frees; the handler is acknowledged 2L later.
  void service_write(const BusTransaction& txn, SimTime grant_cycle,
                     std::unique_ptr<WriteStream> stream, BusPortHandler* handler,
                     std::function<void(SimTime)> on_last_beat);

  /// Append data to an in-flight write and advance its beat schedule.
  void push_write_data(TxnId id, std::span<const std::uint8_t> bytes, SimTime available_at);

  /// Remaining beats of this transaction trace as Wasted (discarded
  /// speculative fetch whose data is already committed to the bus).
  void mark_wasted(TxnId id);

  /// Memory image file: "DMASIMG1" magic + base address + length + raw bytes.
  void dump_image(const std::string& path, std::uint64_t base, std::uint64_t len) const;
  /// Returns (base, length) of the loaded image.
  std::pair<std::uint64_t, std::uint64_t> load_image(const std::string& path);

private:
  struct WriteState {
    BusTransaction txn;
    std::unique_ptr<WriteStream> stream;
    BusPortHandler* handler = nullptr;
    std::function<void(SimTime)> on_last_beat;
    SimTime grant_cycle = 0;
    std::uint32_t next_beat = 0;
    SimTime prev_beat_cycle = 0;
    bool beat_scheduled = false;
  };

  void advance_write(TxnId id);
  void absorb_beat(TxnId id);
  bool is_wasted(TxnId id) const;
  /// Bytes of the request covered once beat `index` has transferred.
  static std::uint64_t covered_through_beat(const BusTransaction& txn, std::uint32_t index);

  Simulator& sim_;
  MemoryConfig config_;
  std::vector<std::uint8_t> store_;  ///< zero-initialized: uninitialized reads are 0
  BusTrace* trace_;
  std::map<TxnId, WriteState> writes_;
  std::vector<TxnId> wasted_;  ///< in-flight discarded fetches, removed when drained
};

}  // namespace dmasim
