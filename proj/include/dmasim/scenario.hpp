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

/// @file scenario.hpp
/// One self-contained experiment: a controller configuration, a memory
/// configuration, a workload and a measurement window. Running a scenario
/// preloads memory through the backdoor, launches the chain through the CSR,
/// runs to completion, verifies integrity and produces a RunReport.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmasim/backend.hpp"
#include "dmasim/baseline.hpp"
#include "dmasim/frontend.hpp"
#include "dmasim/mem_model.hpp"
#include "dmasim/metrics.hpp"
#include "dmasim/workload.hpp"

namespace dmasim {

enum class DmacKind : std::uint8_t { Main, Baseline };

struct ScenarioConfig {
  std::string name = "base";
  DmacKind kind = DmacKind::Main;
  FrontendConfig frontend;
  BackendConfig backend;
  BaselineConfig baseline;
  MemoryConfig memory;
  WorkloadSpec workload;
  MeasurementWindow window;
  std::uint64_t max_cycles = 0;  ///< 0: derive a generous budget from the workload
};

/// The Table I parameter points plus the comparison target, with this
/// project's defaults everywhere else.
ScenarioConfig preset_scenario(const std::string& config_name, std::uint32_t memory_latency,
                               std::uint64_t transfer_size);

struct RunOptions {
  bool keep_trace = false;
  bool verify_integrity = true;
};

struct RunOutcome {
  RunReport report;
  bool integrity_ok = true;
  std::string integrity_error;
  std::uint64_t total_cycles = 0;
  std::uint64_t transfers_completed = 0;
  std::uint32_t max_desc_reads_in_flight = 0;
  std::uint32_t max_speculative_outstanding = 0;
  std::vector<FetchLogEntry> fetch_log;
  std::vector<TransferRecord> records;  ///< value snapshots, dispatch order
  BusTrace trace;                       ///< populated when RunOptions::keep_trace
};

RunOutcome run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Derived measurement window that fits inside a `transfers`-long run.
MeasurementWindow clamp_window(const MeasurementWindow& window, std::uint64_t transfers);

/// Export a scenario's preloaded initial state for replay: the descriptor
/// chain file and the flat memory image.
void export_workload(const ScenarioConfig& config, const std::string& chain_path,
                     const std::string& image_path);

/// Re-run a previously exported workload: load the image, walk and validate
/// the chain from memory, launch it and report. Integrity here means every
/// completed descriptor carries its completion marker (the original payload
/// expectation lives with the exporting scenario, not the files).
RunOutcome run_replay(const std::string& chain_path, const std::string& image_path,
                      const ScenarioConfig& rig, const RunOptions& options = {});

}  // namespace dmasim
