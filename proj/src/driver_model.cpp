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

#include "dmasim/driver_model.hpp"

#include <algorithm>

namespace dmasim {

namespace {
// Largest per-descriptor length that keeps split boundaries bus aligned.
constexpr std::uint64_t kMaxPieceBytes = 0xFFFFFFF8ull;
}  // namespace

DmaDriver::DmaDriver(Simulator& sim, MemorySystem& memory, Dmac& dmac, DriverConfig config)
    : sim_(sim), memory_(memory), dmac_(dmac), config_(config) {
  if (config_.max_chains < 1) throw DriverError("max_chains must be >= 1");
  free_slots_.reserve(config_.arena_slots);
  // LIFO free list, lowest address on top.
  for (std::uint64_t i = config_.arena_slots; i-- > 0;) {
    free_slots_.push_back(config_.arena_base + i * kDescriptorBytes);
  }
  dmac_.frontend().set_irq_callback([this](const TransferRecord&) { irq_handler(); });
}

std::uint64_t DmaDriver::allocate_slot() {
  if (free_slots_.empty()) throw DriverError("descriptor arena exhausted");
  const std::uint64_t slot = free_slots_.back();
  free_slots_.pop_back();
  return slot;
}

HandleId DmaDriver::prepare_memcpy(std::uint64_t source, std::uint64_t destination,
                                   std::uint64_t length, bool want_irq) {
  Handle h;
  h.id = next_handle_++;

  std::vector<std::uint64_t> pieces;
  std::uint64_t remaining = length;
  do {
    // Anything that fits the 32-bit length field stays one descriptor; only
    // longer copies split, at a bus-aligned boundary.
    pieces.push_back(remaining <= 0xFFFFFFFFull ? remaining : kMaxPieceBytes);
    remaining -= pieces.back();
  } while (remaining > 0);

  std::uint64_t src = source;
  std::uint64_t dst = destination;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Descriptor d;
    d.length = static_cast<std::uint32_t>(pieces[i]);
    d.source = src;
    d.destination = dst;
    d.config = (want_irq && i + 1 == pieces.size()) ? kConfigIrqOnCompletion : 0;
    d.next = kEndOfChain;
    const std::uint64_t slot = allocate_slot();
    if (i > 0) h.descriptors[i - 1].next = slot;
    h.slots.push_back(slot);
    h.descriptors.push_back(d);
    src += pieces[i];
    dst += pieces[i];
  }
  for (std::size_t i = 0; i < h.slots.size(); ++i) write_descriptor(h, i);

  const HandleId id = h.id;
  handles_.emplace(id, std::move(h));
  return id;
}

void DmaDriver::write_descriptor(Handle& h, std::size_t idx) {
  const DescriptorRecord rec = encode(h.descriptors[idx]);
  memory_.backdoor_write(h.slots[idx], rec);
}

void DmaDriver::set_callback(HandleId handle, std::function<void()> callback) {
  handle_ref(handle).callback = std::move(callback);
}

void DmaDriver::commit(std::span<const HandleId> handles) {
  if (handles.empty()) return;
  Chain chain;
  Handle* prev = nullptr;
  for (HandleId id : handles) {
    Handle& h = handle_ref(id);
    if (h.state != HandleState::Prepared) {
      throw DriverError("commit of handle " + std::to_string(id) + " in wrong state");
    }
    h.state = HandleState::Committed;
    if (prev) {
      prev->descriptors.back().next = h.slots.front();
      write_descriptor(*prev, prev->slots.size() - 1);
    } else {
      chain.head = h.slots.front();
    }
    chain.handles.push_back(id);
    prev = &h;
  }
  chain.tail = prev->slots.back();
  chains_.push_back(std::move(chain));
  committed_.push_back(chains_.size() - 1);
}

void DmaDriver::submit_chain(std::size_t chain_idx) {
  Chain& chain = chains_[chain_idx];
  // The driver relies on the completion interrupt of the chain tail to learn
  // about retirement, independent of what the client asked for.
  Handle& tail_handle = handle_ref(chain.handles.back());
  Descriptor& tail = tail_handle.descriptors.back();
  if (!(tail.config & kConfigIrqOnCompletion)) {
    tail.config |= kConfigIrqOnCompletion;
    write_descriptor(tail_handle, tail_handle.slots.size() - 1);
  }

  if (dmac_.csr_write(chain.head) != CsrResult::Accepted) {
    // Launch register full; retry next cycle (cannot happen while max_chains
    // is within the CSR queue depth, but stay robust).
    sim_.schedule_in(1, "driver.retry", [this, chain_idx]() { submit_chain(chain_idx); });
    return;
  }
  submitted_tails_with_irq_++;
  for (HandleId id : chain.handles) handle_ref(id).state = HandleState::Submitted;
  active_chains_++;
  chains_submitted_++;
  peak_active_chains_ = std::max(peak_active_chains_, active_chains_);
}

void DmaDriver::issue() {
  while (!committed_.empty()) {
    const std::size_t chain_idx = committed_.front();
    committed_.pop_front();
    if (active_chains_ < config_.max_chains) {
      submit_chain(chain_idx);
    } else {
      deferred_.push_back(chain_idx);
    }
  }
}

void DmaDriver::irq_handler() {
  irq_events_++;
  bool progressed = false;

  // Completion detection by marker scan: a handle is complete exactly when
  // its final descriptor's first 8 bytes read all ones. Callbacks may
  // prepare/commit/issue new transfers, so never hold references across them.
  for (std::size_t ci = 0; ci < chains_.size(); ++ci) {
    if (chains_[ci].retired) continue;
    const std::vector<HandleId> chain_handles = chains_[ci].handles;
    for (HandleId id : chain_handles) {
      Handle& h = handles_.at(id);
      if (h.state != HandleState::Submitted) continue;
      const auto marker = memory_.backdoor_read(h.slots.back(), 8);
      const bool done = std::all_of(marker.begin(), marker.end(),
                                    [](std::uint8_t b) { return b == 0xFF; });
      if (!done) break;  // later handles in the chain cannot be done either
      h.state = HandleState::Completed;
      h.callbacks_run++;
      progressed = true;
      if (h.callback) h.callback();
    }
    if (!chain_handles.empty() &&
        handles_.at(chain_handles.back()).state == HandleState::Completed) {
      chains_[ci].retired = true;
      chains_retired_++;
      if (active_chains_ > 0) active_chains_--;
      for (HandleId id : chain_handles) {
        for (std::uint64_t slot : handles_.at(id).slots) free_slots_.push_back(slot);
      }
      progressed = true;
    }
  }
  if (!progressed) spurious_irqs_++;

  // Launch stored chains now that budget freed up.
  while (!deferred_.empty() && active_chains_ < config_.max_chains) {
    const std::size_t chain_idx = deferred_.front();
    deferred_.pop_front();
    submit_chain(chain_idx);
  }
}

bool DmaDriver::all_complete() const {
  return std::all_of(handles_.begin(), handles_.end(), [](const auto& kv) {
    return kv.second.state == HandleState::Completed;
  });
}

HandleState DmaDriver::state(HandleId handle) const { return handle_ref(handle).state; }

std::uint64_t DmaDriver::callbacks_run(HandleId handle) const {
  return handle_ref(handle).callbacks_run;
}

DmaDriver::Handle& DmaDriver::handle_ref(HandleId id) {
  auto it = handles_.find(id);
  if (it == handles_.end()) throw DriverError("unknown handle " + std::to_string(id));
  return it->second;
}

const DmaDriver::Handle& DmaDriver::handle_ref(HandleId id) const {
  auto it = handles_.find(id);
  if (it == handles_.end()) throw DriverError("unknown handle " + std::to_string(id));
  return it->second;
}

}  // namespace dmasim
