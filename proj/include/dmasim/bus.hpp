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

/// @file bus.hpp
/// Transaction-level bus vocabulary shared by the interconnect, the memory
/// model and the DMAC managers. A transaction is one read or write burst;
/// data moves in beats of the bus data width, one beat per cycle per
/// direction.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dmasim/sim_core.hpp"

namespace dmasim {

using PortId = std::uint32_t;
using TxnId = std::uint64_t;

enum class Direction : std::uint8_t { Read, Write };

/// What a burst carries, fixed when the transaction is issued. Wasted never
/// appears here: it is the trace-level classification of beats belonging to
/// a speculative descriptor fetch that was discarded before its data arrived.
enum class PayloadClass : std::uint8_t { Descriptor, Payload, Writeback, Wasted };

const char* to_string(Direction dir);
const char* to_string(PayloadClass cls);

/// Number of data-bus slots a byte range occupies. Beats are aligned windows
/// of `bytes_per_beat`; unaligned first/last bytes still cost a full slot.
std::uint32_t beats_for(std::uint64_t address, std::uint64_t length,
                        std::uint32_t bytes_per_beat);

struct BusTransaction {
  TxnId id = 0;
  PortId port = 0;
  Direction dir = Direction::Read;
  PayloadClass cls = PayloadClass::Payload;
  std::uint64_t address = 0;
  std::uint64_t length = 0;  ///< bytes, >= 1
  std::uint32_t bytes_per_beat = 8;
  std::uint32_t beats = 0;
  SimTime issue_cycle = 0;   ///< when the manager put the request on its port
  bool wasted = false;       ///< discarded speculative fetch; beats trace as Wasted

  PayloadClass effective_class() const { return wasted ? PayloadClass::Wasted : cls; }
};

/// Sink for bus responses, implemented by each manager.
class BusPortHandler {
public:
  virtual ~BusPortHandler() = default;

  /// One read data beat, delivered at its bus cycle. `data` views only the
  /// bytes of this beat that fall inside the requested range.
  virtual void on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                            std::uint64_t beat_address, std::span<const std::uint8_t> data) = 0;

  /// Called at the cycle of the last read beat, after its on_read_beat.
  virtual void on_read_complete(const BusTransaction& /*txn*/) {}

  /// Write completion acknowledgment (last beat + 2 * one-way latency).
  virtual void on_write_complete(const BusTransaction& txn) = 0;

  /// Transaction touched memory outside the configured capacity.
  virtual void on_bus_fault(const BusTransaction& txn) = 0;
};

struct GrantRecord {
  SimTime cycle = 0;
  TxnId txn = 0;
  PortId port = 0;
  Direction dir = Direction::Read;
  PayloadClass cls = PayloadClass::Payload;
  std::uint64_t address = 0;
  std::uint32_t beats = 0;
};

struct BeatRecord {
  SimTime cycle = 0;
  TxnId txn = 0;
  PortId port = 0;
  Direction dir = Direction::Read;
  PayloadClass cls = PayloadClass::Payload;  ///< effective class at delivery
  std::uint64_t address = 0;
  std::uint32_t beat_index = 0;
};

/// Flat recording of everything that happened on the bus. Two runs of the
/// same scenario must produce identical recordings.
struct BusTrace {
  std::vector<GrantRecord> grants;
  std::vector<BeatRecord> beats;

  void clear() {
    grants.clear();
    beats.clear();
  }

  /// Grant trace as CSV ("cycle,port,kind,address,beats,payload_class").
  std::string grants_csv() const;
  /// Beat trace as CSV ("cycle,port,direction,address,beat,payload_class").
  std::string beats_csv() const;
};

bool operator==(const GrantRecord& a, const GrantRecord& b);
bool operator==(const BeatRecord& a, const BeatRecord& b);
bool operator==(const BusTrace& a, const BusTrace& b);

}  // namespace dmasim
