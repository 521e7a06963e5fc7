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

#include "dmasim/baseline.hpp"

#include <cstring>

namespace dmasim {

void BaselineConfig::validate() const {
  if (descriptor_port_bits != 32) {
    throw SimContractError("baseline descriptor port is fixed at 32 bits");
  }
  if (descriptor_read_bits % descriptor_port_bits != 0 || descriptor_read_bits < 256) {
    throw SimContractError("descriptor_read_bits must cover the 256-bit record");
  }
  if (in_flight < 1) throw SimContractError("in_flight must be >= 1");
}

BaselineDmac::BaselineDmac(Simulator& sim, Arbiter& bus, BaselineConfig config,
                           BackendConfig engine_config)
    : sim_(sim),
      bus_(bus),
      config_(config),
      engine_config_([&] {
        engine_config.queue_depth = config.in_flight;
        return engine_config;
      }()),
      engine_(sim, bus, engine_config_, "baseline.engine") {
  config_.validate();
  desc_port_ = bus_.register_port("baseline.fetch", this);
  engine_.set_done_callback([this](TransferRecord* rec) { on_engine_done(rec); });
  engine_.set_slot_freed_callback([this]() { pump_dispatch(); });
}

CsrResult BaselineDmac::csr_write(std::uint64_t head_address) {
  if (csr_queue_.size() >= config_.csr_queue_depth) return CsrResult::Busy;
  const SimTime accepted = sim_.now();
  if (first_csr_accept_ == kNoCycle) first_csr_accept_ = accepted;
  csr_queue_.push_back(head_address);
  if (!fetch_engine_busy_) {
    fetch_engine_busy_ = true;
    sim_.schedule_in(config_.csr_to_request, "baseline.launch", [this, accepted]() {
      launch_next_head(accepted, FetchTrigger::Head);
    });
  }
  return CsrResult::Accepted;
}

void BaselineDmac::launch_next_head(SimTime trigger_cycle, FetchTrigger trigger) {
  if (csr_queue_.empty()) {
    fetch_engine_busy_ = false;
    return;
  }
  const std::uint64_t head = csr_queue_.front();
  csr_queue_.pop_front();
  if (head == kEndOfChain || head % kDescriptorBytes != 0) {
    if (head != kEndOfChain) faults_++;
    end_of_chain_seen();
    return;
  }
  issue_fetch(head, trigger, trigger_cycle);
}

void BaselineDmac::issue_fetch(std::uint64_t address, FetchTrigger trigger,
                               SimTime trigger_cycle) {
  if (fetch_outstanding_) {
    throw SimContractError("baseline issued a second descriptor read");
  }
  fetch_outstanding_ = true;
  max_desc_reads_ = std::max<std::uint32_t>(max_desc_reads_, 1);
  fetch_address_ = address;
  fetch_issue_cycle_ = sim_.now();
  fetch_received_ = 0;
  // 32-byte record through the 32-bit port: 8 beats, one bus slot each.
  fetch_txn_ = bus_.request_read(desc_port_, address, kDescriptorBytes, PayloadClass::Descriptor,
                                 config_.descriptor_port_bits / 8);
  fetch_log_.push_back(FetchLogEntry{address, sim_.now(), trigger_cycle, trigger, false});
}

void BaselineDmac::on_read_beat(const BusTransaction& txn, std::uint32_t beat_index,
                                std::uint64_t beat_address, std::span<const std::uint8_t> data) {
  (void)beat_index;
  if (txn.id != fetch_txn_) throw SimContractError("baseline beat for unknown fetch");
  const std::uint64_t offset = beat_address - fetch_address_;
  std::memcpy(fetch_bytes_.data() + offset, data.data(), data.size());
  fetch_received_ += static_cast<std::uint32_t>(data.size());
  if (fetch_received_ == kDescriptorBytes) {
    fetch_outstanding_ = false;
    dispatch_events_pending_++;
    sim_.schedule_in(config_.dispatch_overhead, "baseline.dispatch",
                     [this]() { dispatch_current(); });
  }
}

void BaselineDmac::dispatch_current() {
  dispatch_events_pending_--;
  auto rec = std::make_unique<TransferRecord>();
  rec->index = records_.size();
  rec->descriptor_address = fetch_address_;
  rec->descriptor = decode(fetch_bytes_);
  rec->state = TransferState::Fetched;
  rec->fetch_issue_cycle = fetch_issue_cycle_;
  rec->fetched_cycle = sim_.now();
  TransferRecord* raw = rec.get();
  records_.push_back(std::move(rec));
  undispatched_.push_back(raw);
  pump_dispatch();
  after_dispatch(raw->descriptor.next, raw->descriptor_address);
}

void BaselineDmac::after_dispatch(std::uint64_t next, std::uint64_t current_address) {
  if (next == kEndOfChain) {
    end_of_chain_seen();
    return;
  }
  if (next % kDescriptorBytes != 0 || next == current_address) {
    faults_++;
    end_of_chain_seen();
    return;
  }
  // Strictly serialized: the next read re-arms through the same launch path
  // that services a CSR write.
  const SimTime trigger_cycle = sim_.now();
  sim_.schedule_in(config_.refetch_overhead, "baseline.refetch", [this, next, trigger_cycle]() {
    issue_fetch(next, FetchTrigger::Unpredicted, trigger_cycle);
  });
}

void BaselineDmac::end_of_chain_seen() {
  if (!csr_queue_.empty()) {
    const SimTime trigger_cycle = sim_.now();
    sim_.schedule_in(config_.refetch_overhead, "baseline.launch", [this, trigger_cycle]() {
      launch_next_head(trigger_cycle, FetchTrigger::QueuedHead);
    });
  } else {
    fetch_engine_busy_ = false;
  }
}

void BaselineDmac::pump_dispatch() {
  if (pumping_) return;
  pumping_ = true;
  while (!undispatched_.empty()) {
    TransferRecord* rec = undispatched_.front();
    undispatched_.pop_front();
    if (!engine_.try_dispatch(rec)) {
      undispatched_.push_front(rec);
      break;
    }
  }
  pumping_ = false;
}

void BaselineDmac::on_engine_done(TransferRecord* rec) {
  if (rec->failed) return;
  // Completion marker through the 32-bit descriptor port: two bus slots.
  const TxnId txn = bus_.request_write(desc_port_, rec->descriptor_address, 8,
                                       PayloadClass::Writeback, config_.descriptor_port_bits / 8);
  static constexpr std::uint8_t kMarker[8] = {0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF};
  bus_.push_write_data(txn, kMarker, 0);
  writebacks_.emplace(txn, rec);
}

void BaselineDmac::on_write_complete(const BusTransaction& txn) {
  auto it = writebacks_.find(txn.id);
  if (it == writebacks_.end()) throw SimContractError("baseline unknown writeback completion");
  it->second->writeback_ack_cycle = sim_.now();
  writebacks_.erase(it);
}

void BaselineDmac::on_bus_fault(const BusTransaction& txn) {
  (void)txn;
  faults_++;
  fetch_outstanding_ = false;
  end_of_chain_seen();
}

bool BaselineDmac::idle() const {
  return !fetch_engine_busy_ && csr_queue_.empty() && !fetch_outstanding_ &&
         undispatched_.empty() && writebacks_.empty() && engine_.idle() &&
         dispatch_events_pending_ == 0;
}

}  // namespace dmasim
