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

// Experiment runner: single runs, size sweeps across the three memory
// regimes, prediction-hit-rate sweeps, launch/fetch/forward latency tables,
// the gate-count model, and a quick self test. Runs write CSV rows in a
// fixed column order and optional SVG charts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dmasim/config_file.hpp"
#include "dmasim/metrics.hpp"
#include "dmasim/plot.hpp"
#include "dmasim/scenario.hpp"

namespace {

using namespace dmasim;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;  // 0: keep the config's seed
  unsigned jobs = 1;
  bool write_csv = false;
  bool write_plots = false;
};

std::vector<std::uint32_t> parse_u32_csv(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  return out;
}

std::vector<double> parse_double_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string out_path(const CommonOpts& opts, const std::string& file) {
  if (opts.out_dir.empty()) return file;
  return (std::filesystem::path(opts.out_dir) / file).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Runs one scenario and dies loudly on integrity failure.
RunOutcome run_checked(const ScenarioConfig& cfg) {
  const RunOutcome out = run_scenario(cfg);
  if (!out.integrity_ok) {
    throw std::runtime_error("integrity check failed for config=" + cfg.name + " L=" +
                             std::to_string(cfg.memory.one_way_latency) + " n=" +
                             std::to_string(cfg.workload.fixed_size()) + ": " +
                             out.integrity_error);
  }
  return out;
}

int cmd_run(const CommonOpts& opts, const std::string& preset, std::uint32_t latency,
            std::uint32_t size, const std::string& save_workload,
            const std::string& grant_trace, const std::string& beat_trace) {
  ScenarioConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_scenario_file(opts.config_path);
  } else {
    cfg = preset_scenario(preset, latency, size);
  }
  if (opts.seed != 0) cfg.workload.seed = opts.seed;

  if (!save_workload.empty()) {
    std::filesystem::create_directories(save_workload);
    const auto dir = std::filesystem::path(save_workload);
    export_workload(cfg, (dir / "chain.bin").string(), (dir / "memory.bin").string());
    std::cout << "workload " << (dir / "chain.bin").string() << " "
              << (dir / "memory.bin").string() << "\n";
  }

  RunOptions ropts;
  ropts.keep_trace = !grant_trace.empty() || !beat_trace.empty();
  const RunOutcome out = [&] {
    const RunOutcome o = run_scenario(cfg, ropts);
    if (!o.integrity_ok) {
      throw std::runtime_error("integrity check failed for config=" + cfg.name + ": " +
                               o.integrity_error);
    }
    return o;
  }();
  std::cout << out.report.to_kv();

  if (!grant_trace.empty()) {
    write_text(grant_trace, out.trace.grants_csv());
    std::cout << "grant_trace " << grant_trace << "\n";
  }
  if (!beat_trace.empty()) {
    write_text(beat_trace, out.trace.beats_csv());
    std::cout << "beat_trace " << beat_trace << "\n";
  }
  if (opts.write_csv) {
    ensure_dir(opts.out_dir);
    const std::string path = out_path(opts, "run.csv");
    write_text(path, RunReport::csv_header() + "\n" + out.report.csv_row() + "\n");
    std::cout << "csv " << path << "\n";
  }
  return 0;
}

int cmd_replay(const CommonOpts& opts, const std::string& preset, std::uint32_t latency,
               const std::string& chain_path, const std::string& image_path) {
  ScenarioConfig rig;
  if (!opts.config_path.empty()) {
    rig = load_scenario_file(opts.config_path);
  } else {
    rig = preset_scenario(preset, latency, 64);
  }
  const RunOutcome out = run_replay(chain_path, image_path, rig);
  if (!out.integrity_ok) {
    std::cerr << "replay integrity failed: " << out.integrity_error << "\n";
    return 1;
  }
  std::cout << out.report.to_kv();
  return 0;
}

struct SweepCell {
  std::string config;
  std::uint32_t latency = 0;
  std::uint32_t size = 0;
};

int cmd_sweep(const CommonOpts& opts, const std::vector<std::string>& configs,
              const std::vector<std::uint32_t>& sizes, const std::vector<std::uint32_t>& latencies,
              std::uint64_t transfers) {
  ensure_dir(opts.out_dir);
  std::vector<SweepCell> cells;
  for (std::uint32_t lat : latencies) {
    for (const std::string& name : configs) {
      for (std::uint32_t size : sizes) {
        cells.push_back(SweepCell{name, lat, size});
      }
    }
  }

  // Cells are independent; results land in their slot, so the output order
  // does not depend on scheduling.
  std::vector<RunReport> reports(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex fail_mutex;
  std::string failure;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const SweepCell& cell = cells[i];
      try {
        ScenarioConfig cfg = preset_scenario(cell.config, cell.latency, cell.size);
        if (transfers != 0) cfg.workload.transfer_count = transfers;
        if (opts.seed != 0) cfg.workload.seed = opts.seed;
        reports[i] = run_checked(cfg).report;
      } catch (const std::exception& e) {
        std::scoped_lock lock(fail_mutex);
        if (failure.empty()) failure = e.what();
        return;
      }
    }
  };
  const unsigned jobs = std::max(1u, opts.jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!failure.empty()) {
    std::cerr << "sweep aborted: " << failure << "\n";
    return 1;
  }

  std::ostringstream csv;
  csv << RunReport::csv_header() << "\n";
  for (const RunReport& r : reports) csv << r.csv_row() << "\n";
  const std::string csv_path = out_path(opts, "sweep.csv");
  write_text(csv_path, csv.str());
  std::cout << "wrote " << csv_path << " (" << reports.size() << " cells)\n";

  if (opts.write_plots) {
    for (std::uint32_t lat : latencies) {
      std::vector<PlotSeries> series;
      PlotSeries ideal{"ideal n/(n+32)", {}, true};
      for (std::uint32_t n : sizes) ideal.points.emplace_back(n, ideal_utilization(n));
      series.push_back(std::move(ideal));
      for (const std::string& name : configs) {
        PlotSeries s{name, {}, false};
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].latency == lat && cells[i].config == name) {
            s.points.emplace_back(cells[i].size, reports[i].steady_state_utilization);
          }
        }
        std::sort(s.points.begin(), s.points.end());
        series.push_back(std::move(s));
      }
      PlotSpec spec;
      spec.title = "steady-state bus utilization, memory latency " + std::to_string(lat);
      spec.x_label = "transfer size [B]";
      spec.y_label = "bus utilization";
      spec.x_log2 = true;
      const std::string path = out_path(opts, "util_L" + std::to_string(lat) + ".svg");
      write_line_chart_svg(path, spec, series);
      std::cout << "wrote " << path << "\n";
    }
  }
  return 0;
}

int cmd_miss_sweep(const CommonOpts& opts, const std::vector<double>& hit_rates,
                   std::uint32_t latency, const std::vector<std::uint32_t>& sizes) {
  ensure_dir(opts.out_dir);
  std::ostringstream csv;
  csv << RunReport::csv_header() << "\n";
  std::vector<PlotSeries> series;
  for (std::uint32_t size : sizes) {
    PlotSeries s{"n=" + std::to_string(size) + " B", {}, false};
    for (double hit : hit_rates) {
      ScenarioConfig cfg = preset_scenario("speculation", latency, size);
      cfg.workload.placement = Placement::RandomizedNext;
      cfg.workload.hit_rate = hit;
      if (opts.seed != 0) cfg.workload.seed = opts.seed;
      const RunOutcome out = run_checked(cfg);
      csv << out.report.csv_row() << "\n";
      s.points.emplace_back(hit, out.report.steady_state_utilization);
    }
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));
  }
  const std::string csv_path = out_path(opts, "miss_sweep.csv");
  write_text(csv_path, csv.str());
  std::cout << "wrote " << csv_path << "\n";
  if (opts.write_plots) {
    PlotSpec spec;
    spec.title = "utilization under speculation misses, latency " + std::to_string(latency);
    spec.x_label = "prediction hit rate";
    spec.y_label = "bus utilization";
    const std::string path = out_path(opts, "miss_sweep.svg");
    write_line_chart_svg(path, spec, series);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

int cmd_latency() {
  const std::uint32_t latencies[3] = {1, 13, 100};
  std::printf("%-10s %6s %9s %9s %10s %6s\n", "config", "i-rf", "rf-rb@1", "rf-rb@13", "rf-rb@100",
              "r-w");
  for (const std::string name : {std::string("scaled"), std::string("baseline")}) {
    LatencyProbes probes[3];
    for (int i = 0; i < 3; ++i) {
      ScenarioConfig cfg = preset_scenario(name, latencies[i], 64);
      cfg.workload.transfer_count = 4;
      probes[i] = run_checked(cfg).report.probes;
    }
    std::printf("%-10s %6llu %9llu %9llu %10llu %6llu\n", name.c_str(),
                static_cast<unsigned long long>(probes[0].i_rf),
                static_cast<unsigned long long>(probes[0].rf_rb),
                static_cast<unsigned long long>(probes[1].rf_rb),
                static_cast<unsigned long long>(probes[2].rf_rb),
                static_cast<unsigned long long>(probes[0].r_w));
  }
  return 0;
}

int cmd_area(const std::vector<std::uint32_t>& d_values,
             const std::vector<std::uint32_t>& s_values) {
  std::printf("%6s %6s %10s %s\n", "d", "s", "kGE", "note");
  for (std::uint32_t d : d_values) {
    for (std::uint32_t s : s_values) {
      const char* note = "";
      if (d == 4 && s == 0) note = "base";
      if (d == 4 && s == 4) note = "speculation";
      if (d == 24 && s == 24) note = "scaled";
      std::printf("%6u %6u %10.2f %s\n", d, s, estimate_area(d, s), note);
    }
  }
  return 0;
}

int cmd_selftest() {
  bool all_ok = true;
  std::string first_failure;
  auto check = [&](const std::string& name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    if (!ok) {
      all_ok = false;
      if (first_failure.empty()) first_failure = name;
    }
  };

  {
    Descriptor d;
    d.length = 64;
    d.next = kEndOfChain;
    check("descriptor round-trip", decode(encode(d)) == d);
  }
  {
    const RunOutcome out = run_checked(preset_scenario("base", 1, 64));
    check("ideal-memory utilization at 64 B",
          std::abs(out.report.steady_state_utilization - ideal_utilization(64)) <= 0.01);
  }
  {
    ScenarioConfig cfg = preset_scenario("scaled", 13, 64);
    cfg.workload.transfer_count = 1;
    const RunOutcome out = run_checked(cfg);
    check("latency probes (3, 32, 1)", out.report.probes.i_rf == 3 &&
                                           out.report.probes.rf_rb == 32 &&
                                           out.report.probes.r_w == 1);
  }
  check("area model points", std::abs(estimate_area(4, 0) - 41.42) < 1e-9 &&
                                 std::abs(estimate_area(4, 4) - 49.18) < 1e-9 &&
                                 std::abs(estimate_area(24, 24) - 193.58) < 1e-9);

  if (!all_ok) {
    std::cerr << "selftest failed: " << first_failure << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"descriptor-DMA controller simulator and experiment harness"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string preset = "base";
  std::uint32_t latency = 1;
  std::uint32_t size = 64;
  std::uint64_t transfers = 0;  // 0: keep the preset's default
  std::string sizes_csv = "8,16,32,64,128,256,512,1024,2048,4096";
  std::string miss_sizes_csv = "64,256,1024";
  std::string latencies_csv = "1,13,100";
  std::string configs_csv = "base,speculation,scaled,baseline";
  std::string hit_rates_csv = "1.0,0.75,0.5,0.25,0.0";
  std::string d_csv = "4,8,16,24";
  std::string s_csv = "0,4,8,16,24";

  auto add_common = [&](CLI::App* cmd, bool with_config = true) {
    if (with_config) cmd->add_option("--config", opts.config_path, "scenario config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "workload seed override (nonzero)");
    cmd->add_option("--jobs", opts.jobs, "parallel simulation jobs");
    cmd->add_flag("--csv", opts.write_csv, "write CSV output");
    cmd->add_flag("--plots", opts.write_plots, "write SVG charts");
  };

  std::string save_workload;
  std::string grant_trace;
  std::string beat_trace;
  std::string chain_path;
  std::string image_path;

  CLI::App* run = app.add_subcommand("run", "run one scenario and print its report");
  add_common(run);
  run->add_option("--preset", preset, "base|speculation|scaled|baseline");
  run->add_option("--latency", latency, "one-way memory latency [cycles]");
  run->add_option("--size", size, "transfer size [bytes]");
  run->add_option("--save-workload", save_workload,
                  "directory for chain.bin + memory.bin replay files");
  run->add_option("--grant-trace", grant_trace, "write the per-grant CSV trace to this file");
  run->add_option("--beat-trace", beat_trace, "write the per-beat CSV trace to this file");

  CLI::App* replay = app.add_subcommand("replay", "re-run an exported workload");
  add_common(replay);
  replay->add_option("--chain", chain_path, "descriptor chain file")->required();
  replay->add_option("--image", image_path, "memory image file")->required();
  replay->add_option("--preset", preset, "controller rig preset");
  replay->add_option("--latency", latency, "one-way memory latency [cycles]");

  CLI::App* sweep = app.add_subcommand("sweep", "utilization grid over sizes and latencies");
  add_common(sweep, false);
  sweep->add_option("--sizes", sizes_csv, "comma-separated transfer sizes");
  sweep->add_option("--latencies", latencies_csv, "comma-separated one-way latencies");
  sweep->add_option("--configs", configs_csv, "comma-separated configuration presets");
  sweep->add_option("--transfers", transfers, "transfers per cell (default: preset)");

  CLI::App* miss = app.add_subcommand("miss-sweep", "utilization versus prediction hit rate");
  add_common(miss, false);
  miss->add_option("--hit-rates", hit_rates_csv, "comma-separated hit rates in [0,1]");
  miss->add_option("--latency", latency, "one-way memory latency [cycles]");
  miss->add_option("--sizes", miss_sizes_csv, "comma-separated transfer sizes");

  CLI::App* lat = app.add_subcommand("latency", "launch/fetch/forward latency table");
  add_common(lat, false);

  CLI::App* area = app.add_subcommand("area", "gate-count model table");
  add_common(area, false);
  area->add_option("--d-values", d_csv, "descriptors-in-flight values");
  area->add_option("--s-values", s_csv, "speculation-slot values");

  app.add_subcommand("selftest", "quick built-in checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      return cmd_run(opts, preset, latency, size, save_workload, grant_trace, beat_trace);
    }
    if (app.got_subcommand("replay")) {
      return cmd_replay(opts, preset, latency, chain_path, image_path);
    }
    if (app.got_subcommand("sweep")) {
      std::vector<std::string> configs;
      std::stringstream ss(configs_csv);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) configs.push_back(item);
      }
      return cmd_sweep(opts, configs, parse_u32_csv(sizes_csv), parse_u32_csv(latencies_csv),
                       transfers);
    }
    if (app.got_subcommand("miss-sweep")) {
      return cmd_miss_sweep(opts, parse_double_csv(hit_rates_csv), latency,
                            parse_u32_csv(miss_sizes_csv));
    }
    if (app.got_subcommand("latency")) return cmd_latency();
    if (app.got_subcommand("area")) {
      return cmd_area(parse_u32_csv(d_csv), parse_u32_csv(s_csv));
    }
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
