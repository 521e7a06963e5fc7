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

#include "dmasim/bus.hpp"

#include <sstream>

namespace dmasim {

const char* to_string(Direction dir) {
  return dir == Direction::Read ? "read" : "write";
}

const char* to_string(PayloadClass cls) {
  switch (cls) {
    case PayloadClass::Descriptor: return "descriptor";
    case PayloadClass::Payload: return "payload";
    case PayloadClass::Writeback: return "writeback";
    case PayloadClass::Wasted: return "wasted";
  }
  return "?";
}

std::uint32_t beats_for(std::uint64_t address, std::uint64_t length,
                        std::uint32_t bytes_per_beat) {
  if (length == 0) return 0;
  const std::uint64_t first_slot = address / bytes_per_beat;
  const std::uint64_t last_slot = (address + length - 1) / bytes_per_beat;
  return static_cast<std::uint32_t>(last_slot - first_slot + 1);
}

std::string BusTrace::grants_csv() const {
  std::ostringstream out;
  out << "cycle,port,kind,address,beats,payload_class\n";
  for (const GrantRecord& g : grants) {
    out << g.cycle << ',' << g.port << ',' << to_string(g.dir) << ",0x" << std::hex << g.address
        << std::dec << ',' << g.beats << ',' << to_string(g.cls) << '\n';
  }
  return out.str();
}

std::string BusTrace::beats_csv() const {
  std::ostringstream out;
  out << "cycle,port,direction,address,beat,payload_class\n";
  for (const BeatRecord& b : beats) {
    out << b.cycle << ',' << b.port << ',' << to_string(b.dir) << ",0x" << std::hex << b.address
        << std::dec << ',' << b.beat_index << ',' << to_string(b.cls) << '\n';
  }
  return out.str();
}

bool operator==(const GrantRecord& a, const GrantRecord& b) {
  return a.cycle == b.cycle && a.txn == b.txn && a.port == b.port && a.dir == b.dir &&
         a.cls == b.cls && a.address == b.address && a.beats == b.beats;
}

bool operator==(const BeatRecord& a, const BeatRecord& b) {
  return a.cycle == b.cycle && a.txn == b.txn && a.port == b.port && a.dir == b.dir &&
         a.cls == b.cls && a.address == b.address && a.beat_index == b.beat_index;
}

bool operator==(const BusTrace& a, const BusTrace& b) {
  return a.grants == b.grants && a.beats == b.beats;
}

}  // namespace dmasim
