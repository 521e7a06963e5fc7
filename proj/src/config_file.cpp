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

#include "dmasim/config_file.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace dmasim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct IniData {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string& sec, const std::string& key) const {
    return sections.at(sec).at(key);
  }
  std::uint64_t get_u64(const std::string& sec, const std::string& key,
                        std::uint64_t fallback) const {
    if (!has(sec, key)) return fallback;
    return std::stoull(get(sec, key), nullptr, 0);
  }
  double get_double(const std::string& sec, const std::string& key, double fallback) const {
    if (!has(sec, key)) return fallback;
    return std::stod(get(sec, key));
  }
  std::string get_str(const std::string& sec, const std::string& key,
                      const std::string& fallback) const {
    return has(sec, key) ? get(sec, key) : fallback;
  }
};

IniData parse_ini(const std::string& text) {
  IniData ini;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    ini.sections[section][key] = value;
  }
  return ini;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& value) {
  std::vector<std::uint32_t> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item, nullptr, 0)));
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  const IniData ini = parse_ini(text);
  ScenarioConfig cfg;

  cfg.name = ini.get_str("scenario", "name", cfg.name);
  const std::string kind = ini.get_str("scenario", "dmac", "main");
  if (kind == "main") {
    cfg.kind = DmacKind::Main;
  } else if (kind == "baseline") {
    cfg.kind = DmacKind::Baseline;
  } else {
    throw ConfigError("scenario.dmac must be 'main' or 'baseline', got '" + kind + "'");
  }
  cfg.max_cycles = ini.get_u64("scenario", "max_cycles", cfg.max_cycles);

  FrontendConfig& fe = cfg.frontend;
  fe.descriptors_in_flight = static_cast<std::uint32_t>(
      ini.get_u64("frontend", "descriptors_in_flight", fe.descriptors_in_flight));
  fe.prefetch_slots =
      static_cast<std::uint32_t>(ini.get_u64("frontend", "prefetch_slots", fe.prefetch_slots));
  fe.csr_queue_depth =
      static_cast<std::uint32_t>(ini.get_u64("frontend", "csr_queue_depth", fe.csr_queue_depth));
  fe.csr_to_request =
      static_cast<std::uint32_t>(ini.get_u64("frontend", "csr_to_request", fe.csr_to_request));
  fe.decode_to_backend = static_cast<std::uint32_t>(
      ini.get_u64("frontend", "decode_to_backend", fe.decode_to_backend));

  BackendConfig& be = cfg.backend;
  be.max_burst_beats =
      static_cast<std::uint32_t>(ini.get_u64("backend", "max_burst_beats", be.max_burst_beats));
  be.read_to_write_latency = static_cast<std::uint32_t>(
      ini.get_u64("backend", "read_to_write_latency", be.read_to_write_latency));
  be.max_outstanding_bursts = static_cast<std::uint32_t>(
      ini.get_u64("backend", "max_outstanding_bursts", be.max_outstanding_bursts));

  BaselineConfig& bl = cfg.baseline;
  bl.in_flight = static_cast<std::uint32_t>(ini.get_u64("baseline", "in_flight", bl.in_flight));
  bl.csr_to_request =
      static_cast<std::uint32_t>(ini.get_u64("baseline", "csr_to_request", bl.csr_to_request));
  bl.dispatch_overhead = static_cast<std::uint32_t>(
      ini.get_u64("baseline", "dispatch_overhead", bl.dispatch_overhead));
  bl.refetch_overhead = static_cast<std::uint32_t>(
      ini.get_u64("baseline", "refetch_overhead", bl.refetch_overhead));

  MemoryConfig& mem = cfg.memory;
  mem.one_way_latency =
      static_cast<std::uint32_t>(ini.get_u64("memory", "latency", mem.one_way_latency));
  mem.data_width_bits =
      static_cast<std::uint32_t>(ini.get_u64("memory", "data_width_bits", mem.data_width_bits));
  mem.capacity = ini.get_u64("memory", "capacity", mem.capacity);

  WorkloadSpec& wl = cfg.workload;
  wl.transfer_count = ini.get_u64("workload", "transfers", wl.transfer_count);
  if (ini.has("workload", "sizes")) {
    wl.sizes = parse_u32_list(ini.get("workload", "sizes"));
    if (wl.sizes.empty()) throw ConfigError("workload.sizes must not be empty");
  }
  const std::string placement = ini.get_str("workload", "placement", "sequential");
  if (placement == "sequential") {
    wl.placement = Placement::Sequential;
  } else if (placement == "randomized") {
    wl.placement = Placement::RandomizedNext;
  } else {
    throw ConfigError("workload.placement must be 'sequential' or 'randomized'");
  }
  wl.hit_rate = ini.get_double("workload", "hit_rate", wl.hit_rate);
  wl.seed = ini.get_u64("workload", "seed", wl.seed);
  wl.irq_on_last = ini.get_u64("workload", "irq_on_last", wl.irq_on_last ? 1 : 0) != 0;

  cfg.window.warmup_transfers = static_cast<std::uint32_t>(
      ini.get_u64("window", "warmup", cfg.window.warmup_transfers));
  cfg.window.measured_transfers = static_cast<std::uint32_t>(
      ini.get_u64("window", "measured", cfg.window.measured_transfers));
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str());
}

std::string emit_scenario_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  char hit[32];
  std::snprintf(hit, sizeof hit, "%.6f", cfg.workload.hit_rate);
  out << "[scenario]\n"
      << "name = " << cfg.name << "\n"
      << "dmac = " << (cfg.kind == DmacKind::Main ? "main" : "baseline") << "\n"
      << "max_cycles = " << cfg.max_cycles << "\n\n"
      << "[frontend]\n"
      << "descriptors_in_flight = " << cfg.frontend.descriptors_in_flight << "\n"
      << "prefetch_slots = " << cfg.frontend.prefetch_slots << "\n"
      << "csr_queue_depth = " << cfg.frontend.csr_queue_depth << "\n"
      << "csr_to_request = " << cfg.frontend.csr_to_request << "\n"
      << "decode_to_backend = " << cfg.frontend.decode_to_backend << "\n\n"
      << "[backend]\n"
      << "max_burst_beats = " << cfg.backend.max_burst_beats << "\n"
      << "read_to_write_latency = " << cfg.backend.read_to_write_latency << "\n"
      << "max_outstanding_bursts = " << cfg.backend.max_outstanding_bursts << "\n\n"
      << "[baseline]\n"
      << "in_flight = " << cfg.baseline.in_flight << "\n"
      << "csr_to_request = " << cfg.baseline.csr_to_request << "\n"
      << "dispatch_overhead = " << cfg.baseline.dispatch_overhead << "\n"
      << "refetch_overhead = " << cfg.baseline.refetch_overhead << "\n\n"
      << "[memory]\n"
      << "latency = " << cfg.memory.one_way_latency << "\n"
      << "data_width_bits = " << cfg.memory.data_width_bits << "\n"
      << "capacity = " << cfg.memory.capacity << "\n\n"
      << "[workload]\n"
      << "transfers = " << cfg.workload.transfer_count << "\n"
      << "sizes = ";
  for (std::size_t i = 0; i < cfg.workload.sizes.size(); ++i) {
    if (i) out << ",";
    out << cfg.workload.sizes[i];
  }
  out << "\n"
      << "placement = "
      << (cfg.workload.placement == Placement::Sequential ? "sequential" : "randomized") << "\n"
      << "hit_rate = " << hit << "\n"
      << "seed = " << cfg.workload.seed << "\n"
      << "irq_on_last = " << (cfg.workload.irq_on_last ? 1 : 0) << "\n\n"
      << "[window]\n"
      << "warmup = " << cfg.window.warmup_transfers << "\n"
      << "measured = " << cfg.window.measured_transfers << "\n";
  return out.str();
}

void save_scenario_file(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << emit_scenario_text(config);
}

}  // namespace dmasim
