// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "obsgprm/metrics.hpp"
#include "obsgprm/simulator.hpp"

namespace obsgprm {

// Everything one experiment sweep needs. Relative file paths resolve against
// the directory of the scenario file.
struct Scenario {
  std::filesystem::path topology;
  std::filesystem::path matrix;
  std::vector<Policy> policies{Policy::ShortestPath, Policy::Gprm};
  std::vector<double> loads;
  std::vector<std::uint64_t> seeds{1};
  double mean_burst_bits = kDefaultMeanBurstBits;
  int connections_per_pair = 1;
  std::size_t rolling_window = 10;  // buckets
  SimConfig sim;
};

// Flat `key = value` text, lists comma separated, '#' comments.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

// Applies one `key = value` assignment, as from the file or a CLI override.
void set_scenario_key(Scenario& s, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});

// Every violated invariant as "field: reason"; empty when valid.
std::vector<std::string> validate(const Scenario& s);

struct RunRow {
  Policy policy = Policy::Gprm;
  std::uint64_t seed = 0;
  double load = 0.0;
  std::optional<double> blr;
  std::optional<double> mean_delay_s;
  double utilization = 0.0;
  std::array<std::uint64_t, kDropCauses> drops{};
  std::uint64_t sent = 0;
  TimeSeries learning{0.01};
};

struct LoadGain {
  double load = 0.0;
  double blr_sp = 0.0;
  double blr_gprm = 0.0;
  double util_sp = 0.0;
  double util_gprm = 0.0;
  double delay_sp = 0.0;
  double delay_gprm = 0.0;
  double blr_gain = 0.0;  // per point
  double u_gain = 0.0;    // per point
};

struct ExperimentResult {
  std::vector<RunRow> rows;   // (policy, load, seed) order
  std::vector<LoadGain> gains;  // per load, seed-averaged; empty unless both policies ran
  GainReport blr_gain;
  GainReport u_gain;
};

struct ExperimentOptions {
  std::optional<std::filesystem::path> out_dir;  // no files written when empty
  bool trace = false;
  unsigned threads = 1;
};

// Single run of the sweep, for the given policy, load and seed.
RunRow run_single(const Scenario& s, const Topology& t, const TrafficMatrix& m, Policy policy,
                  double load, std::uint64_t seed, std::ostream* trace = nullptr);

// All (policy, load, seed) runs with identical traffic across policies.
ExperimentResult run_experiment(const Scenario& s, const ExperimentOptions& options = {});

void write_results_csv(std::ostream& out, const ExperimentResult& r);
void write_gains_csv(std::ostream& out, const ExperimentResult& r);
void write_learning_csv(std::ostream& out, const TimeSeries& ts, std::size_t rolling_window);

// OBS_SIM_THREADS if set and positive, else the hardware concurrency.
unsigned worker_threads_from_env();

}  // namespace obsgprm
