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

#include "dmasim/sim_core.hpp"

#include <utility>

namespace dmasim {

void Simulator::schedule(SimTime fire_at, std::string target, std::function<void()> action) {
  if (fire_at < now_) {
    throw SimContractError("schedule into the past: fire_at=" + std::to_string(fire_at) +
                           " now=" + std::to_string(now_) + " target=" + target);
  }
  queue_.push(Event{fire_at, next_seq_++, std::move(target), std::move(action)});
}

SimTime Simulator::run_until(const std::function<bool()>& condition, std::uint64_t max_cycles) {
  if (max_cycles == 0) {
    throw SimContractError("run_until requires max_cycles > 0");
  }
  const SimTime deadline = now_ + max_cycles;
  for (;;) {
    if (condition()) return now_;
    if (queue_.empty()) {
      // Nothing left that could make the condition true; report exhaustion at
      // the budget boundary so callers see a stable cycle number.
      now_ = deadline;
      throw SimTimeout(deadline, "event queue empty, last event was '" + last_target_ +
                                     "' at cycle " + std::to_string(last_event_cycle_));
    }
    const SimTime cycle = queue_.top().fire_at;
    if (cycle > deadline) {
      throw SimTimeout(deadline, "next pending event '" + queue_.top().target + "' at cycle " +
                                     std::to_string(cycle) + " lies past the budget");
    }
    now_ = cycle;
    // Drain every event of this cycle, including ones scheduled for the same
    // cycle by handlers running now (they sort after by insertion sequence).
    while (!queue_.empty() && queue_.top().fire_at == cycle) {
      Event ev = std::move(const_cast<Event&>(queue_.top()));
      queue_.pop();
      last_target_ = ev.target;
      last_event_cycle_ = cycle;
      ++events_processed_;
      ev.action();
    }
  }
}

}  // namespace dmasim
