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

/// @file dmac.hpp
/// Assembles the descriptor frontend and the transfer engine into the full
/// controller with its two manager ports on the shared interconnect.

#pragma once

#include <memory>
#include <string>

#include "dmasim/backend.hpp"
#include "dmasim/frontend.hpp"
#include "dmasim/interconnect.hpp"
#include "dmasim/sim_core.hpp"

namespace dmasim {

class Dmac {
public:
  Dmac(Simulator& sim, Arbiter& bus, FrontendConfig fe_config, BackendConfig be_config)
      : backend_(sim, bus, wire_queue_depth(be_config, fe_config), "dmac.backend"),
        frontend_(sim, bus, backend_, fe_config, "dmac.frontend") {
    backend_.set_done_callback([this](TransferRecord* rec) { frontend_.on_backend_done(rec); });
    backend_.set_slot_freed_callback([this]() { frontend_.on_backend_slot_freed(); });
  }

  DmaFrontend& frontend() { return frontend_; }
  const DmaFrontend& frontend() const { return frontend_; }
  DmaBackend& backend() { return backend_; }
  const DmaBackend& backend() const { return backend_; }

  CsrResult csr_write(std::uint64_t head_address) { return frontend_.csr_write(head_address); }

  bool idle() const { return frontend_.idle() && backend_.idle(); }
  std::size_t completed_transfers() const {
    std::size_t n = 0;
    for (const auto& rec : frontend_.records()) {
      if (rec->state == TransferState::Done) n++;
    }
    return n;
  }

private:
  // The engine's dispatch queue shares its depth with the frontend's
  // descriptors-in-flight budget.
  static BackendConfig wire_queue_depth(BackendConfig be, const FrontendConfig& fe) {
    be.queue_depth = fe.descriptors_in_flight;
    return be;
  }

  DmaBackend backend_;
  DmaFrontend frontend_;
};

}  // namespace dmasim
