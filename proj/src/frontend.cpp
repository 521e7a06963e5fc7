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

#include "dmasim/frontend.hpp"

#include <algorithm>
#include <cstring>

namespace dmasim {

namespace {
std::uint64_t read_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
}  // namespace

void FrontendConfig::validate() const {
  if (descriptors_in_flight < 1) throw SimContractError("descriptors_in_flight must be >= 1");
  if (csr_queue_depth < 1) throw SimContractError("csr_queue_depth must be >= 1");
}

DmaFrontend::DmaFrontend(Simulator& sim, Arbiter& bus, DmaBackend& backend, FrontendConfig config,
                         const std::string& port_name)
    : sim_(sim), bus_(bus), backend_(backend), config_(config) {
  config_.validate();
  port_ = bus_.register_port(port_name, this);
}

CsrResult DmaFrontend::csr_write(std::uint64_t head_address) {
  if (csr_queue_.size() >= config_.csr_queue_depth) return CsrResult::Busy;
  const SimTime accepted = sim_.now();
  if (first_csr_accept_ == kNoCycle) first_csr_accept_ = accepted;
  csr_queue_.push_back(head_address);
  if (!fetch_engine_busy_) {
    fetch_engine_busy_ = true;
    sim_.schedule_in(config_.csr_to_request, "frontend.launch", [this, accepted]() {
      launch_next_head(accepted, FetchTrigger::Head);
    });
  }
  return CsrResult::Accepted;
}

CsrResult DmaFrontend::csr_write_reg(std::uint64_t offset, std::uint64_t value) {
  if (offset != kCsrLaunch) {
    throw SimContractError("write to read-only or unmapped CSR offset " + std::to_string(offset));
  }
  return csr_write(value);
}

std::uint64_t DmaFrontend::csr_read_reg(std::uint64_t offset) const {
  if (offset != kCsrStatus) {
    throw SimContractError("read of unmapped CSR offset " + std::to_string(offset));
  }
  const std::uint64_t busy = (fetch_engine_busy_ || !csr_queue_.empty()) ? 1 : 0;
  return busy | (static_cast<std::uint64_t>(csr_queue_.size()) << 8);
}

void DmaFrontend::launch_next_head(SimTime trigger_cycle, FetchTrigger trigger) {
  if (csr_queue_.empty()) {
    fetch_engine_busy_ = false;
    return;
  }
  const std::uint64_t head = csr_queue_.front();
  csr_queue_.pop_front();
  if (head == kEndOfChain) {
    // Degenerate launch: an empty chain retires immediately.
    end_of_chain_seen();
    return;
  }
  if (head % kDescriptorBytes != 0) {
    faults_++;
    end_of_chain_seen();
    return;
  }
  issue_architectural(head, trigger, trigger_cycle);
}

void DmaFrontend::issue_architectural(std::uint64_t address, FetchTrigger trigger,
                                      SimTime trigger_cycle) {
  if (in_flight_ >= config_.descriptors_in_flight) {
    // No in-flight credit; issues the moment one frees. With prefetching
    // disabled the identical stall occurs, so mispredictions stay penalty
    // free in the paired sense. Serial next-field processing guarantees at
    // most one fetch can ever be waiting here.
    if (pending_arch_) {
      throw SimContractError("second architectural fetch stalled on credits");
    }
    pending_arch_ = PendingLaunch{address, trigger, trigger_cycle};
    return;
  }
  do_issue(address, FetchKind::Architectural, trigger, trigger_cycle);
}

void DmaFrontend::do_issue(std::uint64_t address, FetchKind kind, FetchTrigger trigger,
                           SimTime trigger_cycle) {
  FetchEntry entry;
  entry.address = address;
  entry.kind = kind;
  entry.issue_cycle = sim_.now();
  entry.txn = bus_.request_read(port_, address, kDescriptorBytes, PayloadClass::Descriptor);
  window_.push_back(entry);
  in_flight_++;
  max_in_flight_ = std::max(max_in_flight_, in_flight_);
  if (kind == FetchKind::Speculative) {
    spec_outstanding_++;
    max_spec_ = std::max(max_spec_, spec_outstanding_);
  }
  check_credit_bounds();
  fetch_log_.push_back(FetchLogEntry{address, sim_.now(), trigger_cycle, trigger,
                                     kind == FetchKind::Speculative});
  last_issue_cycle_ = sim_.now();
  last_requested_ = address;
  stream_active_ = true;
  schedule_prefetch();
}

bool DmaFrontend::can_prefetch() const {
  return config_.prefetch_slots > 0 && stream_active_ && !pending_arch_ &&
         spec_outstanding_ < config_.prefetch_slots &&
         in_flight_ < config_.descriptors_in_flight;
}

void DmaFrontend::schedule_prefetch() {
  if (config_.prefetch_slots == 0 || prefetch_tick_scheduled_) return;
  prefetch_tick_scheduled_ = true;
  sim_.schedule_in(1, "frontend.prefetch", [this]() { prefetch_tick(); });
}

void DmaFrontend::prefetch_tick() {
  prefetch_tick_scheduled_ = false;
  if (!can_prefetch()) return;  // re-armed by whichever credit frees
  if (last_issue_cycle_ == sim_.now()) {
    // One descriptor request per cycle: a recovery fetch already went out.
    schedule_prefetch();
    return;
  }
  const std::uint64_t predicted = last_requested_ + kDescriptorBytes;
  if (predicted == kEndOfChain || !bus_.in_range(predicted, kDescriptorBytes)) {
    // Prediction ran off the end of memory; stop extending the stream.
    return;
  }
  do_issue(predicted, FetchKind::Speculative, FetchTrigger::Head, sim_.now());
}

void DmaFrontend::on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                               std::uint64_t beat_address, std::span<const std::uint8_t> data) {
  (void)beat_index;
  auto it = std::find_if(window_.begin(), window_.end(),
                         [&](const FetchEntry& e) { return e.txn == txn.id; });
  if (it == window_.end()) {
    throw SimContractError("descriptor beat for unknown fetch entry");
  }
  FetchEntry& entry = *it;
  const std::uint64_t offset = beat_address - entry.address;
  if (offset != entry.received) {
    throw SimContractError("descriptor beats arrived out of order");
  }
  std::memcpy(entry.bytes.data() + offset, data.data(), data.size());
  entry.received += static_cast<std::uint32_t>(data.size());

  if (!entry.next_processed && entry.received >= 16) {
    if (entry.kind == FetchKind::Speculative) {
      throw SimContractError("speculative fetch data arrived before resolution");
    }
    if (entry.kind != FetchKind::Discarded) {
      entry.next_processed = true;
      process_next_field(entry);
    }
  }
  if (entry.received == kDescriptorBytes) {
    complete_entry(it);
  }
}

void DmaFrontend::process_next_field(FetchEntry& entry) {
  const std::uint64_t next = read_le64(entry.bytes.data() + 8);
  const SimTime now = sim_.now();

  if (next == kEndOfChain) {
    eoc_discards_ += discard_outstanding_speculation();
    end_of_chain_seen();
    return;
  }
  // Unaligned next pointers and self references have no sane meaning; the
  // runtime flags a fault and retires the chain instead of chasing them.
  if (next % kDescriptorBytes != 0 || next == entry.address) {
    faults_++;
    eoc_discards_ += discard_outstanding_speculation();
    end_of_chain_seen();
    return;
  }

  if (spec_outstanding_ > 0) {
    auto oldest = std::find_if(window_.begin(), window_.end(), [](const FetchEntry& e) {
      return e.kind == FetchKind::Speculative;
    });
    if (oldest != window_.end() && oldest->address == next) {
      // Committed: the in-flight speculative read becomes the architectural
      // fetch of this next pointer and its slot frees up.
      oldest->kind = FetchKind::Committed;
      spec_outstanding_--;
      hits_++;
      schedule_prefetch();
      return;
    }
    misses_++;
    discard_outstanding_speculation();
    issue_architectural(next, FetchTrigger::Miss, now);  // same cycle as the beat
    return;
  }
  unpredicted_++;
  issue_architectural(next, FetchTrigger::Unpredicted, now);
}

std::uint32_t DmaFrontend::discard_outstanding_speculation() {
  std::uint32_t discarded = 0;
  for (auto it = window_.begin(); it != window_.end();) {
    if (it->kind != FetchKind::Speculative) {
      ++it;
      continue;
    }
    spec_outstanding_--;
    in_flight_--;
    discarded++;
    if (bus_.cancel(it->txn)) {
      // Never reached the bus; vanishes without a trace.
      it = window_.erase(it);
    } else {
      // Already granted: the returning data drains as wasted bandwidth.
      it->kind = FetchKind::Discarded;
      bus_.mark_wasted(it->txn);
      ++it;
    }
  }
  return discarded;
}

void DmaFrontend::complete_entry(std::list<FetchEntry>::iterator it) {
  if (it->kind == FetchKind::Discarded) {
    window_.erase(it);
    return;
  }
  in_flight_--;
  auto rec = std::make_unique<TransferRecord>();
  rec->index = records_.size();
  rec->descriptor_address = it->address;
  rec->descriptor = decode(it->bytes);
  rec->state = TransferState::Fetched;
  rec->fetch_issue_cycle = it->issue_cycle;
  rec->fetched_cycle = sim_.now();
  TransferRecord* raw = rec.get();
  records_.push_back(std::move(rec));
  window_.erase(it);

  // One cycle of decode after the last beat, then the hand-off stage.
  dispatch_events_pending_++;
  sim_.schedule_in(1 + config_.decode_to_backend, "frontend.dispatch", [this, raw]() {
    dispatch_events_pending_--;
    undispatched_.push_back(raw);
    pump_dispatch();
  });

  if (pending_arch_) {
    const PendingLaunch p = *pending_arch_;
    pending_arch_.reset();
    issue_architectural(p.address, p.trigger, p.trigger_cycle);
  } else {
    schedule_prefetch();
  }
}

void DmaFrontend::end_of_chain_seen() {
  stream_active_ = false;
  if (!csr_queue_.empty()) {
    const SimTime trigger_cycle = sim_.now();
    sim_.schedule_in(config_.csr_to_request, "frontend.launch", [this, trigger_cycle]() {
      launch_next_head(trigger_cycle, FetchTrigger::QueuedHead);
    });
  } else {
    fetch_engine_busy_ = false;
  }
}

void DmaFrontend::pump_dispatch() {
  // A dispatch can complete synchronously (zero-length transfers) and bounce
  // back through the slot-freed hook; the guard flattens that recursion.
  if (pumping_) return;
  pumping_ = true;
  while (!undispatched_.empty()) {
    TransferRecord* rec = undispatched_.front();
    undispatched_.pop_front();
    if (!backend_.try_dispatch(rec)) {
      undispatched_.push_front(rec);
      break;
    }
  }
  pumping_ = false;
}

void DmaFrontend::on_backend_slot_freed() { pump_dispatch(); }

void DmaFrontend::on_backend_done(TransferRecord* rec) {
  if (rec->failed) return;  // no completion marker, no interrupt
  const TxnId txn = bus_.request_write(port_, rec->descriptor_address, 8, PayloadClass::Writeback);
  static constexpr std::uint8_t kMarker[8] = {0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF};
  bus_.push_write_data(txn, kMarker, 0);
  writebacks_.emplace(txn, rec);
}

void DmaFrontend::on_write_complete(const BusTransaction& txn) {
  auto it = writebacks_.find(txn.id);
  if (it == writebacks_.end()) {
    throw SimContractError("write completion for unknown writeback");
  }
  TransferRecord* rec = it->second;
  writebacks_.erase(it);
  rec->writeback_ack_cycle = sim_.now();
  if (rec->descriptor.irq_on_completion()) {
    rec->irq_raised = true;
    irqs_++;
    if (irq_cb_) irq_cb_(*rec);
  }
}

void DmaFrontend::on_bus_fault(const BusTransaction& txn) {
  auto it = std::find_if(window_.begin(), window_.end(),
                         [&](const FetchEntry& e) { return e.txn == txn.id; });
  if (it == window_.end()) return;
  faults_++;
  const bool was_architectural = it->kind != FetchKind::Speculative;
  if (it->kind == FetchKind::Speculative) spec_outstanding_--;
  if (it->kind != FetchKind::Discarded) in_flight_--;
  window_.erase(it);
  if (was_architectural) {
    // The chain itself is unreachable; retire it.
    discard_outstanding_speculation();
    end_of_chain_seen();
  }
}

bool DmaFrontend::idle() const {
  return !fetch_engine_busy_ && csr_queue_.empty() && window_.empty() && !pending_arch_ &&
         undispatched_.empty() && dispatch_events_pending_ == 0 && writebacks_.empty();
}

void DmaFrontend::check_credit_bounds() const {
  if (in_flight_ > config_.descriptors_in_flight) {
    throw SimContractError("descriptor reads in flight exceed d");
  }
  if (spec_outstanding_ > config_.prefetch_slots) {
    throw SimContractError("speculative reads outstanding exceed s");
  }
}

}  // namespace dmasim
