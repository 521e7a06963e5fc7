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

/// @file dmac_types.hpp
/// Transfer bookkeeping shared between the descriptor-handling logic, the
/// transfer engine and the metrics pipeline.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dmasim/descriptor.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

/// Lifecycle of one linear transfer. Advances strictly forward.
enum class TransferState : std::uint8_t { Fetched, Dispatched, Done };

/// Outcome of a launch-register write.
enum class CsrResult : std::uint8_t { Accepted, Busy };

struct TransferRecord {
  std::uint64_t index = 0;               ///< position in global dispatch order
  std::uint64_t descriptor_address = 0;
  Descriptor descriptor;
  TransferState state = TransferState::Fetched;
  bool failed = false;                   ///< bus fault; marker and IRQ suppressed
  bool irq_raised = false;

  SimTime fetch_issue_cycle = kNoCycle;  ///< descriptor read request on the bus
  SimTime fetched_cycle = kNoCycle;      ///< descriptor fully received
  SimTime dispatch_cycle = kNoCycle;     ///< transfer engine accepted it
  SimTime done_cycle = kNoCycle;         ///< engine reported completion
  SimTime writeback_ack_cycle = kNoCycle;

  SimTime first_payload_read_beat = kNoCycle;
  SimTime last_payload_read_beat = kNoCycle;
  std::uint64_t payload_read_beats = 0;
};

/// Why an architectural descriptor fetch was issued.
enum class FetchTrigger : std::uint8_t {
  Head,         ///< chain head, straight off the launch register
  QueuedHead,   ///< next queued chain, launched when the previous chain ended
  Miss,         ///< misprediction recovery fetch
  Unpredicted,  ///< next field arrived with no speculative fetch to match
};

/// One entry per descriptor read request put on the bus, in issue order.
struct FetchLogEntry {
  std::uint64_t address = 0;
  SimTime issue_cycle = 0;
  SimTime trigger_cycle = 0;  ///< when the launching information became known
  FetchTrigger trigger = FetchTrigger::Head;
  bool speculative = false;
};

}  // namespace dmasim
