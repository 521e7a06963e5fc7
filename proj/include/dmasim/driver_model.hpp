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

/// @file driver_model.hpp
/// In-process model of the kernel driver's memcpy flow: prepare (allocate and
/// populate descriptors in a simulated-memory arena), commit (splice into a
/// FIFO chain), issue (launch through the CSR, throttled by a chain budget),
/// and an IRQ handler that completes handles by scanning completion markers,
/// retires chains and launches anything deferred.
///
/// Within a multi-descriptor handle only the last descriptor may signal an
/// interrupt; the driver additionally enables the interrupt on every issued
/// chain's tail so it always learns about chain retirement.

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "dmasim/dmac.hpp"
#include "dmasim/mem_model.hpp"

namespace dmasim {

using HandleId = std::uint64_t;

enum class HandleState : std::uint8_t { Prepared, Committed, Submitted, Completed };

struct DriverConfig {
  std::uint64_t arena_base = 0x1000;
  std::uint64_t arena_slots = 4096;  ///< 32-byte descriptor slots
  std::uint32_t max_chains = 4;      ///< concurrently launched chains
};

class DriverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DmaDriver {
public:
  DmaDriver(Simulator& sim, MemorySystem& memory, Dmac& dmac, DriverConfig config);

  /// Allocate and populate one or more chained descriptors for a linear copy
  /// (lengths beyond the 32-bit descriptor field split at a bus-aligned
  /// boundary). Not yet visible to the hardware.
  HandleId prepare_memcpy(std::uint64_t source, std::uint64_t destination, std::uint64_t length,
                          bool want_irq);

  void set_callback(HandleId handle, std::function<void()> callback);

  /// Splice the handles, in order, into one new pending chain.
  void commit(std::span<const HandleId> handles);

  /// Launch pending chains while fewer than max_chains are active; the rest
  /// are stored and launched from the interrupt handler as chains retire.
  void issue();

  bool all_complete() const;
  HandleState state(HandleId handle) const;
  std::uint32_t active_chains() const { return active_chains_; }
  std::uint32_t peak_active_chains() const { return peak_active_chains_; }
  std::size_t deferred_chains() const { return deferred_.size(); }
  std::uint64_t irq_events() const { return irq_events_; }
  std::uint64_t spurious_irqs() const { return spurious_irqs_; }
  std::uint64_t callbacks_run(HandleId handle) const;
  std::uint64_t chains_submitted() const { return chains_submitted_; }
  std::uint64_t chains_retired() const { return chains_retired_; }
  /// Chain tail descriptor addresses with the interrupt bit set at submit.
  std::uint64_t submitted_tails_with_irq() const { return submitted_tails_with_irq_; }

private:
  struct Handle {
    HandleId id = 0;
    HandleState state = HandleState::Prepared;
    std::vector<std::uint64_t> slots;        ///< descriptor addresses, chain order
    std::vector<Descriptor> descriptors;     ///< shadow copies of what memory holds
    std::function<void()> callback;
    std::uint64_t callbacks_run = 0;
  };
  struct Chain {
    std::vector<HandleId> handles;
    std::uint64_t head = kEndOfChain;
    std::uint64_t tail = kEndOfChain;  ///< tail descriptor address
    bool retired = false;
  };

  std::uint64_t allocate_slot();
  void write_descriptor(Handle& h, std::size_t idx);
  void submit_chain(std::size_t chain_idx);
  void irq_handler();
  Handle& handle_ref(HandleId id);
  const Handle& handle_ref(HandleId id) const;

  Simulator& sim_;
  MemorySystem& memory_;
  Dmac& dmac_;
  DriverConfig config_;

  std::map<HandleId, Handle> handles_;
  std::vector<Chain> chains_;
  std::deque<std::size_t> committed_;  ///< chain indices awaiting launch
  std::deque<std::size_t> deferred_;   ///< launch-throttled chain indices
  std::vector<std::uint64_t> free_slots_;
  HandleId next_handle_ = 1;

  std::uint32_t active_chains_ = 0;
  std::uint32_t peak_active_chains_ = 0;
  std::uint64_t irq_events_ = 0;
  std::uint64_t spurious_irqs_ = 0;
  std::uint64_t chains_submitted_ = 0;
  std::uint64_t chains_retired_ = 0;
  std::uint64_t submitted_tails_with_irq_ = 0;
};

}  // namespace dmasim
