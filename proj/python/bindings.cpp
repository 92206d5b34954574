// Copyright 2026 The obs-gprm-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "obsgprm/error.hpp"
#include "obsgprm/routing.hpp"
#include "obsgprm/scenario.hpp"
#include "obsgprm/simulator.hpp"

namespace py = pybind11;
using namespace obsgprm;

namespace {

py::dict gain_dict(const GainReport& g) {
  py::dict d;
  d["per_point"] = g.per_point;
  d["sum"] = g.sum;
  d["mean"] = g.mean;
  return d;
}

py::dict counters_dict(const RunCounters& c) {
  py::dict d;
  d["sent"] = c.sent;
  d["delivered"] = c.delivered;
  d["dropped"] = c.dropped();
  py::dict causes;
  for (std::size_t i = 0; i < kDropCauses; ++i) {
    causes[py::str(std::string(to_string(static_cast<DropCause>(i))))] = c.dropped_by_cause[i];
  }
  d["dropped_by_cause"] = causes;
  return d;
}

py::dict report_dict(const MetricsReport& r, const Topology& t) {
  py::dict d;
  d["policy"] = std::string(to_string(r.policy));
  d["total"] = counters_dict(r.total);
  d["steady"] = counters_dict(r.steady);
  d["blr"] = r.steady_blr();
  d["mean_delay_s"] = r.steady_delay();
  d["utilization"] = r.steady_utilization(t);
  d["events_processed"] = r.events_processed;
  d["in_flight_after_drain"] = r.in_flight_after_drain;
  d["causality_violations"] = r.causality_violations;
  d["schedule_overlaps"] = r.schedule_overlaps;
  std::vector<double> rolling;
  for (std::size_t b = 0; b < r.learning.size(); ++b) rolling.push_back(r.learning.rolling_blr(b, 10));
  d["rolling_blr"] = rolling;
  return d;
}

}  // namespace

PYBIND11_MODULE(_obsgprm, m) {
  m.doc() = "Optical burst switching simulator with Bayesian learned routing";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<UnknownNeighborError>(m, "UnknownNeighborError", PyExc_KeyError);
  py::register_exception<NoObservationsError>(m, "NoObservationsError", PyExc_RuntimeError);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ArithmeticError);

  py::enum_<Policy>(m, "Policy")
      .value("SHORTEST_PATH", Policy::ShortestPath)
      .value("GPRM", Policy::Gprm);
  py::enum_<InitialMode>(m, "InitialMode")
      .value("WARM", InitialMode::Warm)
      .value("COLD", InitialMode::Cold);
  py::enum_<BlrClass>(m, "BlrClass")
      .value("LOW", BlrClass::Low)
      .value("MEDIUM", BlrClass::Medium)
      .value("HIGH", BlrClass::High);
  py::enum_<Outcome>(m, "Outcome")
      .value("SUCCESS", Outcome::Success)
      .value("FAILURE", Outcome::Failure);

  py::class_<Topology>(m, "Topology")
      .def_property_readonly("node_count", &Topology::node_count)
      .def_property_readonly("link_count", &Topology::link_count)
      .def("name", &Topology::name)
      .def("neighbors", [](const Topology& t, NodeId n) {
        auto s = t.neighbors(n);
        return std::vector<NodeId>(s.begin(), s.end());
      })
      .def("egress_capacity_bps", &Topology::egress_capacity_bps)
      .def("hop_counts", [](const Topology& t) {
        HopTable h(t);
        std::vector<std::vector<int>> out(t.node_count(), std::vector<int>(t.node_count()));
        for (std::size_t i = 0; i < t.node_count(); ++i)
          for (std::size_t j = 0; j < t.node_count(); ++j)
            out[i][j] = h(static_cast<NodeId>(i), static_cast<NodeId>(j));
        return out;
      })
      .def("shortest_path_next_hop", [](const Topology& t, NodeId from, NodeId dest) {
        return shortest_path_next_hop(t, from, dest);
      })
      .def("__str__", [](const Topology& t) {
        std::ostringstream out;
        write_topology(out, t);
        return out.str();
      });
  m.def("load_topology", &load_topology, py::arg("path"));
  m.def("parse_topology", [](const std::string& text) {
    std::istringstream in(text);
    return parse_topology(in);
  });

  py::class_<EvidenceVector>(m, "EvidenceVector")
      .def(py::init([](int offset, BlrClass blr, int hops, NodeId dest) {
             if (offset < 0 || offset >= kOffsetStates || hops < 0 || hops >= kHopStates) {
               throw ValidationError("offset and hops must be in 0..15");
             }
             return EvidenceVector{static_cast<std::uint8_t>(offset), blr,
                                   static_cast<std::uint8_t>(hops), dest};
           }),
           py::arg("offset"), py::arg("blr"), py::arg("hops"), py::arg("dest"))
      .def_property_readonly("offset", [](const EvidenceVector& e) { return int(e.offset); })
      .def_property_readonly("blr", [](const EvidenceVector& e) { return e.blr; })
      .def_property_readonly("hops", [](const EvidenceVector& e) { return int(e.hops); })
      .def_property_readonly("dest", [](const EvidenceVector& e) { return e.dest; })
      .def("__eq__", [](const EvidenceVector& a, const EvidenceVector& b) { return a == b; })
      .def("__repr__", [](const EvidenceVector& e) {
        std::ostringstream os;
        os << "EvidenceVector(o=" << int(e.offset) << ", b=" << to_string(e.blr)
           << ", nb=" << int(e.hops) << ", d=" << e.dest << ")";
        return os.str();
      });

  m.def("classify_blr",
        [](double blr, double low, double high) {
          BlrClassifier c{low, high, 0.1};
          c.validate();
          return classify_blr(c, blr);
        },
        py::arg("blr"), py::arg("low") = 0.01, py::arg("high") = 0.05);

  py::class_<SuccessTable>(m, "SuccessTable")
      .def(py::init([](NodeId owner, std::vector<NodeId> neighbors, std::size_t nodes,
                       double alpha, double initial_sp, bool naive_bayes_fallback) {
             return SuccessTable(owner, std::move(neighbors), nodes,
                                 UpdateParams{alpha, initial_sp, naive_bayes_fallback});
           }),
           py::arg("owner"), py::arg("neighbors"), py::arg("node_count"), py::arg("alpha") = 0.9,
           py::arg("initial_sp") = 0.5, py::arg("naive_bayes_fallback") = true)
      .def("warm_start", [](SuccessTable& t, const Topology& topo) { t.warm_start(HopTable(topo)); })
      .def("sp", &SuccessTable::sp)
      .def("stored", &SuccessTable::stored)
      .def("update", &SuccessTable::update)
      .def("set", &SuccessTable::set)
      .def("naive_bayes_map", &SuccessTable::naive_bayes_map)
      .def("naive_bayes_posterior", &SuccessTable::naive_bayes_posterior)
      .def("observations", &SuccessTable::observations)
      .def("dump", [](const SuccessTable& t) {
        std::ostringstream out;
        t.dump(out);
        return out.str();
      })
      .def("restore", [](SuccessTable& t, const std::string& text) {
        std::istringstream in(text);
        t.restore(in);
      });

  m.def("permutation_count",
        [](int offset, int blr, int hops, int dest) {
          return permutation_count({offset, blr, hops, dest});
        },
        py::arg("offset"), py::arg("blr"), py::arg("hops"), py::arg("dest"));

  py::class_<RoutingTable>(m, "RoutingTable")
      .def("row", [](const RoutingTable& rt, const EvidenceVector& e) {
        std::vector<std::pair<NodeId, double>> out;
        for (const auto& r : rt.row(e)) out.emplace_back(r.next_hop, r.cost);
        return out;
      })
      .def("lookup", [](const RoutingTable& rt, const EvidenceVector& e,
                        std::vector<NodeId> excluded) { return rt.lookup(e, excluded); },
           py::arg("e"), py::arg("excluded") = std::vector<NodeId>{})
      .def("materialize_all", &RoutingTable::materialize_all);
  m.def("build_table",
        [](const SuccessTable& st, std::vector<NodeId> neighbors, std::array<int, 4> states,
           double now) {
          return build_table(st, std::move(neighbors),
                             {states[0], states[1], states[2], states[3]}, now);
        },
        py::arg("table"), py::arg("neighbors"), py::arg("states"), py::arg("now") = 0.0);

  py::class_<ConnectionSpec>(m, "ConnectionSpec")
      .def(py::init([](NodeId src, NodeId dst, double lambda, double mean_burst_bits,
                       std::uint64_t seed) {
             return ConnectionSpec{src, dst, 0, lambda, mean_burst_bits, seed};
           }),
           py::arg("src"), py::arg("dst"), py::arg("rate"),
           py::arg("mean_burst_bits") = kDefaultMeanBurstBits, py::arg("seed") = 0)
      .def_readonly("src", &ConnectionSpec::src)
      .def_readonly("dst", &ConnectionSpec::dst)
      .def_readonly("rate", &ConnectionSpec::lambda)
      .def_readonly("mean_burst_bits", &ConnectionSpec::mean_burst_bits)
      .def_readonly("seed", &ConnectionSpec::seed);

  py::class_<TrafficMatrix>(m, "TrafficMatrix")
      .def(py::init<std::size_t>())
      .def_static("uniform", &TrafficMatrix::uniform)
      .def("weight", &TrafficMatrix::weight)
      .def("set_weight", &TrafficMatrix::set_weight)
      .def("set_connections_per_pair", &TrafficMatrix::set_connections_per_pair);
  m.def("load_matrix", &load_matrix, py::arg("path"), py::arg("nodes"));
  m.def("node_capacities", &node_capacities);
  m.def("offered_load",
        [](const std::vector<ConnectionSpec>& c, const std::vector<double>& mu) {
          return offered_load(c, mu);
        });
  m.def("scale_to_load",
        [](const TrafficMatrix& m, double load, std::vector<double> capacities,
           double mean_burst_bits, std::uint64_t seed) {
          return scale_to_load(m, {load, std::move(capacities)}, mean_burst_bits, seed);
        },
        py::arg("matrix"), py::arg("load"), py::arg("capacities"),
        py::arg("mean_burst_bits") = kDefaultMeanBurstBits, py::arg("seed") = 1);

  m.def("blr_gain", [](const std::vector<double>& sp, const std::vector<double>& gprm) {
    return gain_dict(blr_gain(sp, gprm));
  });
  m.def("u_gain", [](const std::vector<double>& sp, const std::vector<double>& gprm) {
    return gain_dict(u_gain(sp, gprm));
  });

  m.def("simulate",
        [](const Topology& t, const std::vector<ConnectionSpec>& connections, Policy policy,
           double duration_s, double warmup_s, double offset_guard_s, InitialMode initial) {
          SimConfig cfg;
          cfg.policy = policy;
          cfg.duration_s = duration_s;
          cfg.warmup_s = warmup_s;
          cfg.offset_guard_s = offset_guard_s;
          cfg.initial = initial;
          MetricsReport r;
          {
            py::gil_scoped_release release;
            Simulator sim(t, connections, cfg);
            r = sim.run();
          }
          return report_dict(r, t);
        },
        py::arg("topology"), py::arg("connections"), py::arg("policy") = Policy::Gprm,
        py::arg("duration_s") = 10.0, py::arg("warmup_s") = 1.0,
        py::arg("offset_guard_s") = 0.0, py::arg("initial") = InitialMode::Warm);

  py::class_<Scenario>(m, "Scenario")
      .def_property_readonly("loads", [](const Scenario& s) { return s.loads; })
      .def_property_readonly("seeds", [](const Scenario& s) { return s.seeds; })
      .def_property_readonly("topology", [](const Scenario& s) { return s.topology; })
      .def_property_readonly("matrix", [](const Scenario& s) { return s.matrix; })
      .def("set", [](Scenario& s, const std::string& key, const std::string& value) {
        set_scenario_key(s, key, value);
      })
      .def("validate", [](const Scenario& s) { return validate(s); });
  m.def("load_scenario", &load_scenario, py::arg("path"));

  m.def("run_experiment",
        [](const Scenario& s, std::optional<std::filesystem::path> out_dir, unsigned threads) {
          ExperimentOptions opts;
          opts.out_dir = std::move(out_dir);
          opts.threads = threads;
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(s, opts);
          }
          py::list rows;
          for (const auto& row : r.rows) {
            py::dict d;
            d["policy"] = std::string(to_string(row.policy));
            d["seed"] = row.seed;
            d["load"] = row.load;
            d["blr"] = row.blr;
            d["mean_delay_s"] = row.mean_delay_s;
            d["utilization"] = row.utilization;
            d["sent"] = row.sent;
            rows.append(d);
          }
          py::list gains;
          for (const auto& g : r.gains) {
            py::dict d;
            d["load"] = g.load;
            d["blr_sp"] = g.blr_sp;
            d["blr_gprm"] = g.blr_gprm;
            d["util_sp"] = g.util_sp;
            d["util_gprm"] = g.util_gprm;
            d["delay_sp"] = g.delay_sp;
            d["delay_gprm"] = g.delay_gprm;
            d["blr_gain"] = g.blr_gain;
            d["u_gain"] = g.u_gain;
            gains.append(d);
          }
          py::dict out;
          out["rows"] = rows;
          out["gains"] = gains;
          out["blr_gain"] = gain_dict(r.blr_gain);
          out["u_gain"] = gain_dict(r.u_gain);
          return out;
        },
        py::arg("scenario"), py::arg("out_dir") = std::nullopt, py::arg("threads") = 1);
}
