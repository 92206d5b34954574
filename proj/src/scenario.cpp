// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "obsgprm/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "obsgprm/error.hpp"

namespace obsgprm {

namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError(key + ": '" + v + "' is not a number");
  }
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError(key + ": '" + v + "' is not an integer");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(key + ": '" + v + "' is not a boolean");
}

Policy to_policy(const std::string& v) {
  if (v == "sp" || v == "shortest_path") return Policy::ShortestPath;
  if (v == "gprm") return Policy::Gprm;
  throw ParseError("policies: unknown policy '" + v + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  if (p.is_relative() && !base.empty()) return base / p;
  return p;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string("nan"); }

}  // namespace

void set_scenario_key(Scenario& s, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir) {
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"topology", [&](const std::string& v) { s.topology = resolve(base_dir, v); }},
      {"matrix", [&](const std::string& v) { s.matrix = resolve(base_dir, v); }},
      {"policies",
       [&](const std::string& v) {
         s.policies.clear();
         for (auto& p : split_list(v)) s.policies.push_back(to_policy(p));
       }},
      {"loads",
       [&](const std::string& v) {
         s.loads.clear();
         for (auto& x : split_list(v)) s.loads.push_back(to_double(key, x));
       }},
      {"seeds",
       [&](const std::string& v) {
         s.seeds.clear();
         for (auto& x : split_list(v)) {
           auto seed = to_int(key, x);
           if (seed < 0) throw ParseError("seeds: must be non-negative");
           s.seeds.push_back(static_cast<std::uint64_t>(seed));
         }
       }},
      {"duration_s", [&](const std::string& v) { s.sim.duration_s = to_double(key, v); }},
      {"warmup_s", [&](const std::string& v) { s.sim.warmup_s = to_double(key, v); }},
      {"alpha", [&](const std::string& v) { s.sim.update.alpha = to_double(key, v); }},
      {"initial_sp", [&](const std::string& v) { s.sim.update.initial_sp = to_double(key, v); }},
      {"naive_bayes_fallback",
       [&](const std::string& v) { s.sim.update.naive_bayes_fallback = to_bool(key, v); }},
      {"initial_mode",
       [&](const std::string& v) {
         if (v == "warm") s.sim.initial = InitialMode::Warm;
         else if (v == "cold") s.sim.initial = InitialMode::Cold;
         else throw ParseError("initial_mode: expected warm or cold");
       }},
      {"refresh_period_s",
       [&](const std::string& v) { s.sim.refresh_period_s = to_double(key, v); }},
      {"blr_low", [&](const std::string& v) { s.sim.blr.low_threshold = to_double(key, v); }},
      {"blr_high", [&](const std::string& v) { s.sim.blr.high_threshold = to_double(key, v); }},
      {"blr_window_s", [&](const std::string& v) { s.sim.blr.window_s = to_double(key, v); }},
      {"per_hop_processing_s",
       [&](const std::string& v) { s.sim.per_hop_processing_s = to_double(key, v); }},
      {"offset_guard_s", [&](const std::string& v) { s.sim.offset_guard_s = to_double(key, v); }},
      {"mean_burst_bytes",
       [&](const std::string& v) { s.mean_burst_bits = 8.0 * to_double(key, v); }},
      {"connections_per_pair",
       [&](const std::string& v) { s.connections_per_pair = static_cast<int>(to_int(key, v)); }},
      {"bucket_width_s", [&](const std::string& v) { s.sim.bucket_width_s = to_double(key, v); }},
      {"rolling_window",
       [&](const std::string& v) {
         auto w = to_int(key, v);
         if (w < 1) throw ParseError("rolling_window: must be >= 1");
         s.rolling_window = static_cast<std::size_t>(w);
       }},
      {"util_mode",
       [&](const std::string& v) {
         if (v == "delivered") s.sim.util_mode = UtilMode::Delivered;
         else if (v == "all") s.sim.util_mode = UtilMode::All;
         else throw ParseError("util_mode: expected delivered or all");
       }},
      {"release_on_nack",
       [&](const std::string& v) { s.sim.release_on_nack = to_bool(key, v); }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw ParseError("unknown scenario key '" + key + "'");
  it->second(trim(value));
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  Scenario s;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected `key = value`");
    }
    try {
      set_scenario_key(s, trim(line.substr(0, eq)), line.substr(eq + 1), base_dir);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  return parse_scenario(in, path.parent_path());
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  const SimConfig& c = s.sim;
  check(!s.topology.empty(), "topology: missing");
  if (!s.topology.empty()) {
    check(std::filesystem::exists(s.topology), "topology: file not found: " + s.topology.string());
  }
  check(!s.matrix.empty(), "matrix: missing");
  if (!s.matrix.empty()) {
    check(std::filesystem::exists(s.matrix), "matrix: file not found: " + s.matrix.string());
  }
  check(!s.policies.empty(), "policies: list is empty");
  check(!s.loads.empty(), "loads: list is empty");
  for (double l : s.loads) check(l > 0.0, "loads: every load must be > 0");
  check(!s.seeds.empty(), "seeds: list is empty");
  check(c.duration_s > 0.0, "duration_s: must be > 0");
  check(c.warmup_s >= 0.0 && c.warmup_s < c.duration_s, "warmup_s: warmup must be < duration");
  check(c.update.alpha >= 0.0 && c.update.alpha <= 1.0, "alpha: alpha out of [0,1]");
  check(c.update.initial_sp >= 0.0 && c.update.initial_sp <= 1.0,
        "initial_sp: initial_sp out of [0,1]");
  check(c.refresh_period_s > 0.0, "refresh_period_s: must be > 0");
  check(c.blr.low_threshold > 0.0 && c.blr.low_threshold < c.blr.high_threshold &&
            c.blr.high_threshold < 1.0,
        "blr_low/blr_high: thresholds must satisfy 0 < low < high < 1");
  check(c.blr.window_s > 0.0, "blr_window_s: must be > 0");
  check(c.per_hop_processing_s > 0.0, "per_hop_processing_s: must be > 0");
  check(c.offset_guard_s >= 0.0, "offset_guard_s: must be >= 0");
  check(s.mean_burst_bits > 0.0, "mean_burst_bytes: must be > 0");
  check(s.connections_per_pair >= 1, "connections_per_pair: must be >= 1");
  check(c.bucket_width_s > 0.0, "bucket_width_s: must be > 0");
  return errors;
}

RunRow run_single(const Scenario& s, const Topology& t, const TrafficMatrix& m, Policy policy,
                  double load, std::uint64_t seed, std::ostream* trace) {
  LoadSpec spec{load, node_capacities(t)};
  auto connections = scale_to_load(m, spec, s.mean_burst_bits, seed);
  SimConfig config = s.sim;
  config.policy = policy;
  Simulator sim(t, std::move(connections), config);
  sim.set_trace(trace);
  MetricsReport report = sim.run();

  RunRow row;
  row.policy = policy;
  row.seed = seed;
  row.load = load;
  row.blr = report.steady_blr();
  row.mean_delay_s = report.steady_delay();
  row.utilization = report.steady_utilization(t);
  row.drops = report.steady.dropped_by_cause;
  row.sent = report.steady.sent;
  row.learning = std::move(report.learning);
  return row;
}

ExperimentResult run_experiment(const Scenario& s, const ExperimentOptions& options) {
  if (auto errors = validate(s); !errors.empty()) {
    std::string msg = "invalid scenario:";
    for (auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  const Topology topology = load_topology(s.topology);
  TrafficMatrix matrix = load_matrix(s.matrix, topology.node_count());
  matrix.set_connections_per_pair(s.connections_per_pair);

  struct Job {
    Policy policy;
    double load;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Policy p : s.policies) {
    for (double load : s.loads) {
      for (std::uint64_t seed : s.seeds) jobs.push_back({p, load, seed});
    }
  }

  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);
  auto run_name = [](const Job& j) {
    std::ostringstream os;
    os << to_string(j.policy) << "_load" << fmt(j.load) << "_seed" << j.seed;
    return os.str();
  };

  ExperimentResult result;
  result.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& j = jobs[i];
        std::ofstream trace_file;
        if (options.trace && options.out_dir) {
          trace_file.open(*options.out_dir / ("trace_" + run_name(j) + ".txt"));
        }
        result.rows[i] = run_single(s, topology, matrix, j.policy, j.load, j.seed,
                                    trace_file.is_open() ? &trace_file : nullptr);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                     static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  const bool both = std::count(s.policies.begin(), s.policies.end(), Policy::ShortestPath) > 0 &&
                    std::count(s.policies.begin(), s.policies.end(), Policy::Gprm) > 0;
  if (both) {
    std::vector<double> sp_blr, gprm_blr, sp_u, gprm_u;
    for (double load : s.loads) {
      LoadGain g;
      g.load = load;
      double n_sp = 0, n_gprm = 0, d_sp = 0, d_gprm = 0;
      for (const RunRow& r : result.rows) {
        if (r.load != load) continue;
        bool sp = r.policy == Policy::ShortestPath;
        (sp ? g.blr_sp : g.blr_gprm) += r.blr.value_or(0.0);
        (sp ? g.util_sp : g.util_gprm) += r.utilization;
        if (r.mean_delay_s) {
          (sp ? g.delay_sp : g.delay_gprm) += *r.mean_delay_s;
          (sp ? d_sp : d_gprm) += 1;
        }
        (sp ? n_sp : n_gprm) += 1;
      }
      g.blr_sp /= n_sp;
      g.blr_gprm /= n_gprm;
      g.util_sp /= n_sp;
      g.util_gprm /= n_gprm;
      g.delay_sp = d_sp > 0 ? g.delay_sp / d_sp : 0.0;
      g.delay_gprm = d_gprm > 0 ? g.delay_gprm / d_gprm : 0.0;
      g.blr_gain = g.blr_sp > 0 ? (g.blr_sp - g.blr_gprm) / g.blr_sp : 0.0;
      g.u_gain = g.util_sp > 0 ? (g.util_gprm - g.util_sp) / g.util_sp : 0.0;
      result.gains.push_back(g);
      if (g.blr_sp > 0) {
        sp_blr.push_back(g.blr_sp);
        gprm_blr.push_back(g.blr_gprm);
      }
      if (g.util_sp > 0) {
        sp_u.push_back(g.util_sp);
        gprm_u.push_back(g.util_gprm);
      }
    }
    result.blr_gain = blr_gain(sp_blr, gprm_blr);
    result.u_gain = u_gain(sp_u, gprm_u);
  }

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    {
      std::ofstream out(dir / "results.csv");
      write_results_csv(out, result);
      if (!out) throw Error("failed writing " + (dir / "results.csv").string());
    }
    if (both) {
      std::ofstream out(dir / "gains.csv");
      write_gains_csv(out, result);
      if (!out) throw Error("failed writing " + (dir / "gains.csv").string());
    }
    std::filesystem::create_directories(dir / "learning");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      std::ofstream out(dir / "learning" / ("learning_" + run_name(jobs[i]) + ".csv"));
      write_learning_csv(out, result.rows[i].learning, s.rolling_window);
      if (!out) throw Error("failed writing learning CSV");
    }
  }
  return result;
}

void write_results_csv(std::ostream& out, const ExperimentResult& r) {
  out << "policy,seed,load,blr,mean_delay_s,utilization,drops_contention,drops_offset,"
         "drops_noroute,drops_ingress\n";
  for (const RunRow& row : r.rows) {
    out << to_string(row.policy) << "," << row.seed << "," << fmt(row.load) << ","
        << fmt(row.blr) << "," << fmt(row.mean_delay_s) << "," << fmt(row.utilization);
    for (auto d : row.drops) out << "," << d;
    out << "\n";
  }
}

void write_gains_csv(std::ostream& out, const ExperimentResult& r) {
  out << "load,blr_sp,blr_gprm,blr_gain,util_sp,util_gprm,u_gain,delay_sp_s,delay_gprm_s\n";
  for (const LoadGain& g : r.gains) {
    out << fmt(g.load) << "," << fmt(g.blr_sp) << "," << fmt(g.blr_gprm) << ","
        << fmt(g.blr_gain) << "," << fmt(g.util_sp) << "," << fmt(g.util_gprm) << ","
        << fmt(g.u_gain) << "," << fmt(g.delay_sp) << "," << fmt(g.delay_gprm) << "\n";
  }
  out << "# blr_gain sum=" << fmt(r.blr_gain.sum) << " mean=" << fmt(r.blr_gain.mean) << "\n";
  out << "# u_gain sum=" << fmt(r.u_gain.sum) << " mean=" << fmt(r.u_gain.mean) << "\n";
}

void write_learning_csv(std::ostream& out, const TimeSeries& ts, std::size_t rolling_window) {
  out << "t_bucket,sent,dropped,rolling_blr\n";
  for (std::size_t b = 0; b < ts.size(); ++b) {
    out << fmt(static_cast<double>(b) * ts.bucket_width()) << "," << ts.sent(b) << ","
        << ts.dropped(b) << "," << fmt(ts.rolling_blr(b, rolling_window)) << "\n";
  }
}

unsigned worker_threads_from_env() {
  if (const char* env = std::getenv("OBS_SIM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace obsgprm
