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

/// @file sim_core.hpp
/// Cycle-indexed discrete-event simulation kernel. Components schedule
/// closures at absolute cycles; events with equal fire cycles are delivered
/// in insertion order, which makes every run bit-reproducible.

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmasim {

/// Simulation time in clock cycles. Starts at 0, never decreases.
using SimTime = std::uint64_t;

/// Sentinel for "this probe never fired".
inline constexpr SimTime kNoCycle = ~std::uint64_t{0};

/// Fatal misuse of a simulation contract (e.g. scheduling in the past).
class SimContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// run_until() exhausted its cycle budget without the condition holding.
/// Carries a short diagnostic describing the last activity seen, which is
/// usually enough to tell a deadlock from a too-small budget.
class SimTimeout : public std::runtime_error {
public:
  SimTimeout(SimTime at, std::string diagnostics)
      : std::runtime_error("simulation exhausted at cycle " + std::to_string(at) +
                           ": " + diagnostics),
        cycle_(at),
        diagnostics_(std::move(diagnostics)) {}

  SimTime cycle() const { return cycle_; }
  const std::string& diagnostics() const { return diagnostics_; }

private:
  SimTime cycle_;
  std::string diagnostics_;
};

class Simulator {
public:
  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  /// Schedule `action` to run at absolute cycle `fire_at`. `target` names the
  /// receiving component for diagnostics only. Scheduling in the past is a
  /// contract violation.
  void schedule(SimTime fire_at, std::string target, std::function<void()> action);

  /// Schedule `delta` cycles from now.
  void schedule_in(SimTime delta, std::string target, std::function<void()> action) {
    schedule(now_ + delta, std::move(target), std::move(action));
  }

  /// Advance the simulation until `condition` holds at a cycle boundary
  /// (checked before any event runs, then after each fully processed cycle).
  /// Returns the cycle at which it first held. Throws SimTimeout if the
  /// condition is still false after `max_cycles` cycles have elapsed or no
  /// events remain that could change state.
  SimTime run_until(const std::function<bool()>& condition, std::uint64_t max_cycles);

  std::uint64_t events_processed() const { return events_processed_; }

private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    std::string target;
    std::function<void()> action;
  };
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t events_processed_ = 0;
  std::string last_target_ = "(none)";
  SimTime last_event_cycle_ = 0;
};

}  // namespace dmasim
