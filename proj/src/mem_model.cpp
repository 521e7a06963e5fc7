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

#include "dmasim/mem_model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace dmasim {

namespace {
constexpr char kImageMagic[8] = {'D', 'M', 'A', 'S', 'I', 'M', 'G', '1'};
}

void MemoryConfig::validate() const {
  switch (data_width_bits) {
    case 16: case 32: case 64: case 128: case 256: case 512:
      break;
    default:
      throw MemoryError("data width must be one of 16/32/64/128/256/512 bits");
  }
  if (one_way_latency < 1) throw MemoryError("one-way latency must be >= 1 cycle");
  if (capacity == 0) throw MemoryError("capacity must be nonzero");
}

void WriteStream::push(std::span<const std::uint8_t> bytes, SimTime available_at) {
  if (bytes.empty()) return;
  data_.insert(data_.end(), bytes.begin(), bytes.end());
  if (!marks_.empty() && marks_.back().second > available_at) {
    // Availability never runs backwards; clamp to keep the marks monotone.
    available_at = marks_.back().second;
  }
  marks_.emplace_back(data_.size(), available_at);
}

SimTime WriteStream::available_at(std::uint64_t upto) const {
  if (upto == 0) return 0;
  for (const auto& [end, cycle] : marks_) {
    if (end >= upto) return cycle;
  }
  return kNoCycle;  // not pushed yet
}

MemorySystem::MemorySystem(Simulator& sim, MemoryConfig config, BusTrace* trace)
    : sim_(sim), config_(config), trace_(trace) {
  config_.validate();
  store_.assign(config_.capacity, 0);
}

void MemorySystem::backdoor_write(std::uint64_t address, std::span<const std::uint8_t> bytes) {
  if (!in_range(address, bytes.size())) {
    throw MemoryError("backdoor write out of bounds at 0x" + std::to_string(address));
  }
  std::memcpy(store_.data() + address, bytes.data(), bytes.size());
}

std::vector<std::uint8_t> MemorySystem::backdoor_read(std::uint64_t address,
                                                      std::uint64_t len) const {
  if (!in_range(address, len)) {
    throw MemoryError("backdoor read out of bounds at 0x" + std::to_string(address));
  }
  return std::vector<std::uint8_t>(store_.begin() + static_cast<std::ptrdiff_t>(address),
                                   store_.begin() + static_cast<std::ptrdiff_t>(address + len));
}

std::uint64_t MemorySystem::covered_through_beat(const BusTransaction& txn, std::uint32_t index) {
  const std::uint64_t first_slot = txn.address - txn.address % txn.bytes_per_beat;
  const std::uint64_t window_end = first_slot + std::uint64_t{txn.bytes_per_beat} * (index + 1);
  return std::min(txn.address + txn.length, window_end) - txn.address;
}

void MemorySystem::service_read(const BusTransaction& txn, SimTime grant_cycle,
                                BusPortHandler* handler) {
  // Snapshot at grant: a read granted after a write's acknowledgment always
  // observes the written bytes (the ack trails the last absorbed beat by 2L).
  auto snapshot = std::make_shared<std::vector<std::uint8_t>>(
      store_.begin() + static_cast<std::ptrdiff_t>(txn.address),
      store_.begin() + static_cast<std::ptrdiff_t>(txn.address + txn.length));
  const SimTime first = grant_cycle + 2ull * config_.one_way_latency;
  const std::uint64_t first_slot = txn.address - txn.address % txn.bytes_per_beat;
  for (std::uint32_t beat = 0; beat < txn.beats; ++beat) {
    const std::uint64_t lo =
        std::max<std::uint64_t>(txn.address, first_slot + std::uint64_t{txn.bytes_per_beat} * beat);
    const std::uint64_t hi = std::min<std::uint64_t>(
        txn.address + txn.length, first_slot + std::uint64_t{txn.bytes_per_beat} * (beat + 1));
    const bool last = beat + 1 == txn.beats;
    sim_.schedule(first + beat, "mem.read_beat", [this, txn, handler, snapshot, beat, lo, hi,
                                                  last]() {
      const bool wasted = txn.wasted || is_wasted(txn.id);
      if (trace_) {
        trace_->beats.push_back(BeatRecord{sim_.now(), txn.id, txn.port, Direction::Read,
                                           wasted ? PayloadClass::Wasted : txn.cls, lo, beat});
      }
      handler->on_read_beat(txn, beat,
                            lo, std::span<const std::uint8_t>(
                                    snapshot->data() + (lo - txn.address), hi - lo));
      if (last) {
        handler->on_read_complete(txn);
        if (wasted) std::erase(wasted_, txn.id);
      }
    });
  }
}

void MemorySystem::service_write(const BusTransaction& txn, SimTime grant_cycle,
                                 std::unique_ptr<WriteStream> stream, BusPortHandler* handler,
                                 std::function<void(SimTime)> on_last_beat) {
  WriteState st;
  st.txn = txn;
  st.stream = std::move(stream);
  st.handler = handler;
  st.on_last_beat = std::move(on_last_beat);
  st.grant_cycle = grant_cycle;
  st.prev_beat_cycle = grant_cycle == 0 ? 0 : grant_cycle - 1;
  writes_.emplace(txn.id, std::move(st));
  advance_write(txn.id);
}

void MemorySystem::push_write_data(TxnId id, std::span<const std::uint8_t> bytes,
                                   SimTime available_at) {
  auto it = writes_.find(id);
  if (it == writes_.end()) {
    throw SimContractError("write data for unknown transaction " + std::to_string(id));
  }
  it->second.stream->push(bytes, available_at);
  advance_write(id);
}

void MemorySystem::mark_wasted(TxnId id) {
  if (!is_wasted(id)) wasted_.push_back(id);
}

bool MemorySystem::is_wasted(TxnId id) const {
  return std::find(wasted_.begin(), wasted_.end(), id) != wasted_.end();
}

void MemorySystem::advance_write(TxnId id) {
  WriteState& st = writes_.at(id);
  if (st.beat_scheduled || st.next_beat >= st.txn.beats) return;
  const std::uint64_t need = covered_through_beat(st.txn, st.next_beat);
  if (st.stream->bytes_pushed() < need) return;  // data not produced yet
  const SimTime avail = st.stream->available_at(need);
  SimTime at = std::max({st.grant_cycle, st.prev_beat_cycle + 1, avail, sim_.now()});
  st.beat_scheduled = true;
  sim_.schedule(at, "mem.write_beat", [this, id]() { absorb_beat(id); });
}

void MemorySystem::absorb_beat(TxnId id) {
  WriteState& st = writes_.at(id);
  const BusTransaction& txn = st.txn;
  const std::uint32_t beat = st.next_beat;
  const std::uint64_t first_slot = txn.address - txn.address % txn.bytes_per_beat;
  const std::uint64_t lo =
      std::max<std::uint64_t>(txn.address, first_slot + std::uint64_t{txn.bytes_per_beat} * beat);
  const std::uint64_t hi = std::min<std::uint64_t>(
      txn.address + txn.length, first_slot + std::uint64_t{txn.bytes_per_beat} * (beat + 1));
  std::memcpy(store_.data() + lo, st.stream->bytes().data() + (lo - txn.address), hi - lo);
  if (trace_) {
    trace_->beats.push_back(
        BeatRecord{sim_.now(), txn.id, txn.port, Direction::Write, txn.effective_class(), lo, beat});
  }
  st.prev_beat_cycle = sim_.now();
  st.next_beat = beat + 1;
  st.beat_scheduled = false;
  if (st.next_beat == txn.beats) {
    auto release = std::move(st.on_last_beat);
    BusPortHandler* handler = st.handler;
    const BusTransaction done = txn;
    writes_.erase(id);
    if (release) release(sim_.now());
    sim_.schedule_in(2ull * config_.one_way_latency, "mem.write_ack",
                     [handler, done]() { handler->on_write_complete(done); });
  } else {
    advance_write(id);
  }
}

void MemorySystem::dump_image(const std::string& path, std::uint64_t base,
                              std::uint64_t len) const {
  if (!in_range(base, len)) throw MemoryError("image dump range out of bounds");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MemoryError("cannot open image file for writing: " + path);
  out.write(kImageMagic, 8);
  std::uint8_t hdr[16];
  for (int i = 0; i < 8; ++i) hdr[i] = static_cast<std::uint8_t>(base >> (8 * i));
  for (int i = 0; i < 8; ++i) hdr[8 + i] = static_cast<std::uint8_t>(len >> (8 * i));
  out.write(reinterpret_cast<const char*>(hdr), 16);
  out.write(reinterpret_cast<const char*>(store_.data() + base),
            static_cast<std::streamsize>(len));
}

std::pair<std::uint64_t, std::uint64_t> MemorySystem::load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MemoryError("cannot open image file: " + path);
  char magic[8];
  std::uint8_t hdr[16];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(hdr), 16);
  if (!in || std::memcmp(magic, kImageMagic, 8) != 0) {
    throw MemoryError("not a memory image file: " + path);
  }
  std::uint64_t base = 0, len = 0;
  for (int i = 7; i >= 0; --i) base = (base << 8) | hdr[i];
  for (int i = 7; i >= 0; --i) len = (len << 8) | hdr[8 + i];
  if (!in_range(base, len)) throw MemoryError("image does not fit configured capacity");
  std::vector<char> buf(len);
  in.read(buf.data(), static_cast<std::streamsize>(len));
  if (!in) throw MemoryError("image file truncated: " + path);
  std::memcpy(store_.data() + base, buf.data(), len);
  return {base, len};
}

}  // namespace dmasim
