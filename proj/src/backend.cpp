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

#include "dmasim/backend.hpp"

#include <algorithm>

namespace dmasim {

void BackendConfig::validate() const {
  if (read_to_write_latency < 1) throw SimContractError("read_to_write_latency must be >= 1");
  if (max_burst_beats < 1) throw SimContractError("max_burst_beats must be >= 1");
  if (max_outstanding_bursts < 1) throw SimContractError("max_outstanding_bursts must be >= 1");
  if (queue_depth < 1) throw SimContractError("queue_depth must be >= 1");
}

DmaBackend::DmaBackend(Simulator& sim, Arbiter& bus, BackendConfig config,
                       const std::string& port_name)
    : sim_(sim), bus_(bus), config_(config) {
  config_.validate();
  port_ = bus_.register_port(port_name, this);
}

bool DmaBackend::try_dispatch(TransferRecord* rec) {
  if (occupied_slots_ >= config_.queue_depth) return false;
  auto t = std::make_unique<Active>();
  t->rec = rec;
  rec->state = TransferState::Dispatched;
  rec->dispatch_cycle = sim_.now();
  plan_bursts(*t);
  occupied_slots_++;
  active_.push_back(std::move(t));
  Active& accepted = *active_.back();
  if (accepted.bursts.empty()) {
    // Zero payload or rejected range: completes through the normal path
    // without touching the bus.
    release_slot(accepted);
    drain_done();
  } else {
    issue_reads();
  }
  return true;
}

void DmaBackend::plan_bursts(Active& t) {
  const Descriptor& d = t.rec->descriptor;
  if (d.length == 0) return;
  const std::uint32_t bpb = config_.data_width_bits / 8;
  // Range checks happen here so a bad descriptor fails the transfer instead
  // of the simulation; the chain keeps running.
  const std::uint64_t cap = bus_.capacity();
  if (d.length > cap || d.source > cap - d.length || d.destination > cap - d.length) {
    t.rec->failed = true;
    return;
  }
  std::uint64_t src = d.source;
  std::uint64_t dst = d.destination;
  std::uint64_t remaining = d.length;
  while (remaining > 0) {
    const std::uint64_t slot_off = src % bpb;
    const std::uint64_t max_bytes = std::uint64_t{config_.max_burst_beats} * bpb - slot_off;
    const std::uint64_t take = std::min<std::uint64_t>(remaining, max_bytes);
    Burst b;
    b.src = src;
    b.dst = dst;
    b.len = take;
    t.bursts.push_back(std::move(b));
    t.total_read_beats += beats_for(src, take, bpb);
    src += take;
    dst += take;
    remaining -= take;
  }
}

void DmaBackend::issue_reads() {
  // Issue read bursts in global dispatch order while credit lasts. Requests
  // just queue at the arbiter; pacing happens there.
  while (reads_outstanding_ < config_.max_outstanding_bursts) {
    Active* next = nullptr;
    for (auto& t : active_) {
      if (t->reads_issued < t->bursts.size()) {
        next = t.get();
        break;
      }
    }
    if (!next) return;
    Burst& b = next->bursts[next->reads_issued++];
    b.read_txn = bus_.request_read(port_, b.src, b.len, PayloadClass::Payload,
                                   config_.data_width_bits / 8);
    reads_outstanding_++;
  }
}

DmaBackend::Active* DmaBackend::find_by_read_txn(TxnId id, std::size_t* burst_idx) {
  for (auto& t : active_) {
    for (std::size_t i = 0; i < t->bursts.size(); ++i) {
      if (t->bursts[i].read_txn == id) {
        *burst_idx = i;
        return t.get();
      }
    }
  }
  return nullptr;
}

DmaBackend::Active* DmaBackend::find_by_write_txn(TxnId id, std::size_t* burst_idx) {
  for (auto& t : active_) {
    for (std::size_t i = 0; i < t->bursts.size(); ++i) {
      if (t->bursts[i].write_txn == id) {
        *burst_idx = i;
        return t.get();
      }
    }
  }
  return nullptr;
}

void DmaBackend::on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                              std::uint64_t beat_address, std::span<const std::uint8_t> data) {
  (void)beat_index;
  (void)beat_address;
  std::size_t bi = 0;
  Active* t = find_by_read_txn(txn.id, &bi);
  if (!t) return;  // transfer failed and was torn down
  Burst& b = t->bursts[bi];
  TransferRecord* rec = t->rec;
  const SimTime now = sim_.now();
  if (rec->first_payload_read_beat == kNoCycle) rec->first_payload_read_beat = now;
  rec->last_payload_read_beat = now;
  rec->payload_read_beats++;

  const SimTime available = now + config_.read_to_write_latency;
  if (b.write_txn != 0) {
    bus_.push_write_data(b.write_txn, data, available);
  } else {
    // Stage until this burst's write request can go out.
    if (b.staged.empty()) write_ready_.emplace_back(t, bi);
    b.staged.push_back(Chunk{std::vector<std::uint8_t>(data.begin(), data.end()), available});
    pump_writes();
  }

  // The dispatch slot frees once the transfer's whole read stream has come
  // in; completion tracking continues on the write side.
  if (!t->slot_released && rec->payload_read_beats == t->total_read_beats) {
    release_slot(*t);
  }
}

void DmaBackend::on_read_complete(const BusTransaction& txn) {
  (void)txn;
  if (reads_outstanding_ > 0) reads_outstanding_--;
  issue_reads();
}

void DmaBackend::pump_writes() {
  // Write requests go out in data-arrival order once credit is available;
  // the per-port FIFO at the arbiter keeps the beat streams ordered.
  while (!write_ready_.empty() && writes_outstanding_ < config_.max_outstanding_bursts) {
    auto [t, bi] = write_ready_.front();
    Burst& b = t->bursts[bi];
    write_ready_.pop_front();
    b.write_txn = bus_.request_write(port_, b.dst, b.len, PayloadClass::Payload,
                                     config_.data_width_bits / 8);
    writes_outstanding_++;
    t->writes_requested++;
    for (Chunk& c : b.staged) {
      bus_.push_write_data(b.write_txn, c.bytes, c.available_at);
    }
    b.staged.clear();
  }
}

void DmaBackend::on_write_complete(const BusTransaction& txn) {
  std::size_t bi = 0;
  Active* t = find_by_write_txn(txn.id, &bi);
  if (writes_outstanding_ > 0) writes_outstanding_--;
  if (t) {
    t->bursts[bi].write_acked = true;
    t->writes_acked++;
  }
  pump_writes();
  drain_done();
}

void DmaBackend::on_bus_fault(const BusTransaction& txn) {
  // A burst escaped the plan-time range check; fail the transfer and let the
  // chain continue.
  std::size_t bi = 0;
  Active* t = find_by_read_txn(txn.id, &bi);
  if (!t) t = find_by_write_txn(txn.id, &bi);
  if (!t) return;
  t->rec->failed = true;
  t->bursts.clear();
  t->reads_issued = t->writes_requested = t->writes_acked = 0;
  if (!t->slot_released) release_slot(*t);
  drain_done();
}

void DmaBackend::release_slot(Active& t) {
  t.slot_released = true;
  if (occupied_slots_ > 0) occupied_slots_--;
  if (slot_freed_cb_) slot_freed_cb_();
}

void DmaBackend::drain_done() {
  // Done reports stay in dispatch order even when a later (e.g. zero-length)
  // transfer finished first.
  while (!active_.empty()) {
    Active& front = *active_.front();
    const bool complete = front.writes_acked == front.bursts.size() &&
                          front.reads_issued == front.bursts.size();
    if (!complete) break;
    TransferRecord* rec = front.rec;
    rec->state = TransferState::Done;
    rec->done_cycle = sim_.now();
    active_.pop_front();
    if (done_cb_) done_cb_(rec);
  }
}

}  // namespace dmasim
