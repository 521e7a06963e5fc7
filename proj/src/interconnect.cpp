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

#include "dmasim/interconnect.hpp"

#include <algorithm>

namespace dmasim {

namespace {
std::size_t dir_index(Direction dir) { return dir == Direction::Read ? 0 : 1; }
}  // namespace

Arbiter::Arbiter(Simulator& sim, MemorySystem& memory, BusTrace* trace)
    : sim_(sim), memory_(memory), trace_(trace) {}

PortId Arbiter::register_port(std::string name, BusPortHandler* handler) {
  ports_.push_back(std::make_unique<PortState>());
  ports_.back()->name = std::move(name);
  ports_.back()->handler = handler;
  return static_cast<PortId>(ports_.size() - 1);
}

const std::string& Arbiter::port_name(PortId port) const {
  if (port >= ports_.size()) throw SimContractError("unknown port id");
  return ports_[port]->name;
}

Arbiter::PortState& Arbiter::port_state(PortId port) {
  if (port >= ports_.size()) {
    throw SimContractError("request on unregistered port " + std::to_string(port));
  }
  return *ports_[port];
}

TxnId Arbiter::request_read(PortId port, std::uint64_t address, std::uint64_t length,
                            PayloadClass cls, std::uint32_t bytes_per_beat) {
  PortState& ps = port_state(port);
  if (bytes_per_beat == 0) bytes_per_beat = memory_.config().bytes_per_beat();
  if (length == 0) throw SimContractError("zero-length bus transaction");
  BusTransaction txn;
  txn.id = next_txn_++;
  txn.port = port;
  txn.dir = Direction::Read;
  txn.cls = cls;
  txn.address = address;
  txn.length = length;
  txn.bytes_per_beat = bytes_per_beat;
  txn.beats = beats_for(address, length, bytes_per_beat);
  txn.issue_cycle = sim_.now();
  if (!memory_.in_range(address, length)) {
    BusPortHandler* handler = ps.handler;
    sim_.schedule_in(1, "bus.fault", [handler, txn]() { handler->on_bus_fault(txn); });
    return txn.id;
  }
  ps.queue[0].push_back(Pending{txn, nullptr});
  ensure_tick(sim_.now() + 1);
  return txn.id;
}

TxnId Arbiter::request_write(PortId port, std::uint64_t address, std::uint64_t length,
                             PayloadClass cls, std::uint32_t bytes_per_beat) {
  PortState& ps = port_state(port);
  if (bytes_per_beat == 0) bytes_per_beat = memory_.config().bytes_per_beat();
  if (length == 0) throw SimContractError("zero-length bus transaction");
  BusTransaction txn;
  txn.id = next_txn_++;
  txn.port = port;
  txn.dir = Direction::Write;
  txn.cls = cls;
  txn.address = address;
  txn.length = length;
  txn.bytes_per_beat = bytes_per_beat;
  txn.beats = beats_for(address, length, bytes_per_beat);
  txn.issue_cycle = sim_.now();
  if (!memory_.in_range(address, length)) {
    BusPortHandler* handler = ps.handler;
    sim_.schedule_in(1, "bus.fault", [handler, txn]() { handler->on_bus_fault(txn); });
    return txn.id;
  }
  ps.queue[1].push_back(Pending{txn, std::make_unique<WriteStream>()});
  ensure_tick(sim_.now() + 1);
  return txn.id;
}

void Arbiter::push_write_data(TxnId id, std::span<const std::uint8_t> bytes,
                              SimTime available_at) {
  // Pending writes still sit in a port queue; granted ones live in the memory.
  for (auto& psp : ports_) {
    for (Pending& p : psp->queue[1]) {
      if (p.txn.id == id) {
        p.stream->push(bytes, available_at);
        return;
      }
    }
  }
  memory_.push_write_data(id, bytes, available_at);
}

bool Arbiter::cancel(TxnId id) {
  for (auto& psp : ports_) {
    for (std::size_t d = 0; d < 2; ++d) {
      auto& q = psp->queue[d];
      for (auto it = q.begin(); it != q.end(); ++it) {
        if (it->txn.id == id) {
          q.erase(it);
          return true;
        }
      }
    }
  }
  return false;
}

void Arbiter::mark_wasted(TxnId id) {
  for (auto& psp : ports_) {
    for (std::size_t d = 0; d < 2; ++d) {
      for (Pending& p : psp->queue[d]) {
        if (p.txn.id == id) {
          p.txn.wasted = true;
          return;
        }
      }
    }
  }
  memory_.mark_wasted(id);
}

std::uint64_t Arbiter::grant_count(PortId port, Direction dir) const {
  if (port >= ports_.size()) throw SimContractError("unknown port id");
  return ports_[port]->grants[dir_index(dir)];
}

std::size_t Arbiter::pending(PortId port, Direction dir) const {
  if (port >= ports_.size()) throw SimContractError("unknown port id");
  return ports_[port]->queue[dir_index(dir)].size();
}

std::uint64_t Arbiter::capacity() const { return memory_.config().capacity; }

bool Arbiter::in_range(std::uint64_t address, std::uint64_t len) const {
  return memory_.in_range(address, len);
}

void Arbiter::ensure_tick(SimTime at) {
  // Ticks are pure grant opportunities; extra ones are harmless, missed ones
  // are not. Suppress only wakeups provably covered by an earlier pending one.
  if (at <= sim_.now()) at = sim_.now() + 1;
  const bool pending = next_tick_ != kNoCycle && next_tick_ > sim_.now();
  if (pending && next_tick_ <= at) return;
  next_tick_ = at;
  sim_.schedule(at, "arbiter.tick", [this]() { tick(); });
}

void Arbiter::tick() {
  if (last_tick_ == sim_.now()) return;  // duplicate wakeup this cycle
  last_tick_ = sim_.now();
  if (next_tick_ <= sim_.now()) next_tick_ = kNoCycle;
  try_grant(Direction::Read);
  try_grant(Direction::Write);

  // Work out the next cycle anything could change. Write wakeups on channel
  // release are handled by the release callback.
  SimTime wake = kNoCycle;
  const SimTime now = sim_.now();
  for (const auto& psp : ports_) {
    if (!psp->queue[0].empty()) {
      wake = std::min(wake, std::max({now + 1, read_next_free_,
                                      psp->queue[0].front().txn.issue_cycle + 1}));
    }
    if (!psp->queue[1].empty() && !write_busy_) {
      wake = std::min(wake, std::max(now + 1, psp->queue[1].front().txn.issue_cycle + 1));
    }
  }
  if (wake != kNoCycle) ensure_tick(wake);
}

bool Arbiter::try_grant(Direction dir) {
  const std::size_t d = dir_index(dir);
  const SimTime now = sim_.now();
  if (dir == Direction::Read) {
    if (read_next_free_ > now) return false;
  } else {
    if (write_busy_) return false;
  }
  if (ports_.empty()) return false;
  // Fair round robin: scan from the port after the previous winner.
  for (std::size_t i = 0; i < ports_.size(); ++i) {
    const std::size_t idx = (rr_next_[d] + i) % ports_.size();
    PortState& ps = *ports_[idx];
    if (ps.queue[d].empty()) continue;
    if (ps.queue[d].front().txn.issue_cycle >= now) continue;  // requested this cycle
    Pending pending = std::move(ps.queue[d].front());
    ps.queue[d].pop_front();
    rr_next_[d] = (idx + 1) % ports_.size();
    grant(ps, std::move(pending));
    return true;
  }
  return false;
}

void Arbiter::grant(PortState& ps, Pending&& pending) {
  const BusTransaction& txn = pending.txn;
  const SimTime now = sim_.now();
  ps.grants[dir_index(txn.dir)]++;
  if (trace_) {
    trace_->grants.push_back(
        GrantRecord{now, txn.id, txn.port, txn.dir, txn.effective_class(), txn.address, txn.beats});
  }
  if (txn.dir == Direction::Read) {
    read_next_free_ = now + txn.beats;
    if (txn.wasted) memory_.mark_wasted(txn.id);
    memory_.service_read(txn, now, ps.handler);
  } else {
    write_busy_ = true;
    memory_.service_write(txn, now, std::move(pending.stream), ps.handler,
                          [this](SimTime last_beat) {
                            write_busy_ = false;
                            ensure_tick(last_beat + 1);
                          });
  }
}

}  // namespace dmasim
