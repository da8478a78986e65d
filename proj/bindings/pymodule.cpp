#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "helio/cluster.hpp"
#include "helio/errors.hpp"
#include "helio/flow_graph.hpp"
#include "helio/heuristics.hpp"
#include "helio/placement.hpp"
#include "helio/sim.hpp"
#include "helio/workload.hpp"

namespace py = pybind11;
using namespace helio;

namespace {

Placement placement_from_dict(const py::dict& d) {
  Placement p;
  for (const auto& kv : d) {
    auto iv = kv.second.cast<std::pair<int, int>>();
    p[kv.first.cast<std::string>()] = {iv.first, iv.second};
  }
  return p;
}

py::dict placement_to_dict(const Placement& p) {
  py::dict d;
  for (const auto& [id, iv] : p)
    if (!iv.empty()) d[py::str(id)] = py::make_tuple(iv.start, iv.end);
  return d;
}

py::dict metrics_to_dict(const SimMetrics& m) {
  py::dict d;
  d["window_s"] = m.window_s;
  d["requests_arrived"] = m.requests_arrived;
  d["requests_completed"] = m.requests_completed;
  d["requests_completed_total"] = m.requests_completed_total;
  d["throughput_tps"] = m.throughput_tps;
  d["output_tps"] = m.output_tps;
  d["latency_mean_s"] = m.latency_mean_s;
  d["latency_p50_s"] = m.latency_p50_s;
  d["latency_p95_s"] = m.latency_p95_s;
  d["latency_max_s"] = m.latency_max_s;
  d["ttft_mean_s"] = m.ttft_mean_s;
  d["ttft_p95_s"] = m.ttft_p95_s;
  d["deferrals"] = m.deferrals;
  py::list nodes;
  for (const NodeStats& n : m.nodes) {
    py::dict nd;
    nd["id"] = n.id;
    nd["utilization"] = n.utilization;
    nd["batches"] = n.batches;
    nd["layer_tokens"] = n.layer_tokens;
    nd["kv_pages"] = n.kv_pages;
    nodes.append(nd);
  }
  d["nodes"] = nodes;
  py::list links;
  for (const LinkStats& l : m.links) {
    py::dict ld;
    ld["src"] = l.src;
    ld["dst"] = l.dst;
    ld["bytes"] = l.bytes;
    ld["transfers"] = l.transfers;
    ld["queue_delay_mean_s"] = l.queue_delay_mean_s;
    ld["queue_delay_max_s"] = l.queue_delay_max_s;
    links.append(ld);
  }
  d["links"] = links;
  d["warnings"] = m.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_helio, m) {
  m.doc() = "layer placement planning and cluster simulation for distributed LLM serving";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<ClusterSpec>(m, "Cluster")
      .def_static("from_json", [](const std::string& text) {
        return parse_cluster(text, "<string>");
      })
      .def_static("load", &load_cluster)
      .def("to_json", &serialize_cluster)
      .def("save", &save_cluster)
      .def("validate", [](const ClusterSpec& c) { validate_cluster(c); })
      .def_property_readonly("num_layers", [](const ClusterSpec& c) { return c.model.num_layers; })
      .def_property_readonly("coordinator",
                             [](const ClusterSpec& c) { return c.coordinator_id; })
      .def_property_readonly("node_ids", [](const ClusterSpec& c) {
        std::vector<std::string> ids;
        for (const NodeSpec& n : c.nodes) ids.push_back(n.id);
        return ids;
      })
      .def("__repr__", [](const ClusterSpec& c) {
        return "<Cluster '" + c.model.name + "': " + std::to_string(c.nodes.size()) + " nodes, " +
               std::to_string(c.model.num_layers) + " layers>";
      });

  py::class_<PlacementPlan>(m, "Plan")
      .def_static("from_json", [](const std::string& text) { return parse_plan(text, "<string>"); })
      .def_static("load", &load_plan)
      .def("to_json", &serialize_plan)
      .def("save", &save_plan)
      .def_property_readonly("method", [](const PlacementPlan& p) { return p.method; })
      .def_property_readonly("objective", [](const PlacementPlan& p) { return p.objective; })
      .def_property_readonly("best_bound", [](const PlacementPlan& p) { return p.best_bound; })
      .def_property_readonly("optimal",
                             [](const PlacementPlan& p) { return p.status == MilpStatus::kOptimal; })
      .def_property_readonly("placement",
                             [](const PlacementPlan& p) { return placement_to_dict(p.placement); })
      .def_property_readonly("edges",
                             [](const PlacementPlan& p) {
                               py::list out;
                               for (const PlanEdge& e : p.edges)
                                 out.append(py::make_tuple(e.src, e.dst, e.flow, e.exec_start,
                                                           e.exec_end));
                               return out;
                             })
      .def_property_readonly("warnings", [](const PlacementPlan& p) { return p.warnings; })
      .def("__repr__", [](const PlacementPlan& p) {
        return "<Plan " + p.method + ": " + std::to_string(p.objective) + " tokens/s>";
      });

  m.def(
      "plan",
      [](const ClusterSpec& c, const std::string& method, bool allow_partial, double prune_degree,
         double gap, double time_budget_s, long node_budget, bool warm_starts, bool lex_tiebreak) {
        if (method == "milp") {
          PlanOptions o;
          o.allow_partial = allow_partial;
          o.prune_degree = prune_degree;
          o.gap = gap;
          o.time_budget_s = time_budget_s;
          o.node_budget = node_budget;
          o.use_warm_starts = warm_starts;
          o.lex_tiebreak = lex_tiebreak;
          return plan_placement(c, o);
        }
        HeuristicResult h;
        if (method == "swarm") h = swarm_placement(c);
        else if (method == "petals") h = petals_placement(c);
        else if (method == "sp") h = separate_pipelines_placement(c);
        else throw ValidationError("unknown method '" + method + "'");
        PlacementPlan plan = plan_from_placement(c, h.placement, allow_partial, method);
        for (const std::string& w : h.warnings) plan.warnings.push_back(w);
        return plan;
      },
      py::arg("cluster"), py::arg("method") = "milp", py::arg("allow_partial") = true,
      py::arg("prune_degree") = 0.0, py::arg("gap") = 0.02, py::arg("time_budget_s") = 600.0,
      py::arg("node_budget") = -1, py::arg("warm_starts") = true, py::arg("lex_tiebreak") = true,
      "Compute a placement plan (method: milp, swarm, petals, or sp).");

  m.def(
      "plan_for_placement",
      [](const ClusterSpec& c, const py::dict& placement, bool allow_partial) {
        return plan_from_placement(c, placement_from_dict(placement), allow_partial, "custom");
      },
      py::arg("cluster"), py::arg("placement"), py::arg("allow_partial") = true,
      "Wrap an explicit {node: (start, end)} placement into a plan.");

  m.def(
      "max_flow_value",
      [](const ClusterSpec& c, const py::dict& placement, bool allow_partial) {
        FlowGraph g = build_flow_graph(c, placement_from_dict(placement), allow_partial);
        return max_flow(g);
      },
      py::arg("cluster"), py::arg("placement"), py::arg("allow_partial") = true,
      "Token throughput of a fixed placement.");

  m.def("throughput_upper_bound", &throughput_upper_bound, py::arg("cluster"),
        "Compute-only throughput ceiling for a cluster.");

  m.def(
      "generate_trace",
      [](int count, double rate, const std::string& mode, uint64_t seed, double mean_input,
         double mean_output) {
        LengthParams lp;
        lp.mean_input = mean_input;
        lp.mean_output = mean_output;
        std::vector<Request> reqs =
            generate_trace(count, rate, trace_mode_from_str(mode), lp, seed);
        py::list out;
        for (const Request& r : reqs)
          out.append(py::make_tuple(r.arrival_s, r.input_len, r.output_len));
        return out;
      },
      py::arg("count"), py::arg("rate") = 0.0, py::arg("mode") = "offline", py::arg("seed") = 1,
      py::arg("mean_input") = 763.0, py::arg("mean_output") = 232.0,
      "Sample (arrival_s, input_len, output_len) request tuples.");

  m.def(
      "simulate",
      [](const ClusterSpec& c, const PlacementPlan& plan, const py::list& trace,
         const std::string& mode, const std::string& scheduler, uint64_t seed, double horizon_s,
         double warmup_s) {
        std::vector<Request> reqs;
        for (const auto& row : trace) {
          auto t = row.cast<std::tuple<double, int, int>>();
          reqs.push_back({std::get<0>(t), std::get<1>(t), std::get<2>(t)});
        }
        SimConfig cfg;
        cfg.mode = trace_mode_from_str(mode);
        cfg.policy = sched_policy_from_str(scheduler);
        cfg.seed = seed;
        cfg.horizon_s = horizon_s;
        cfg.warmup_s = cfg.mode == TraceMode::kOnline ? warmup_s : 0;
        return metrics_to_dict(simulate(c, plan, reqs, cfg));
      },
      py::arg("cluster"), py::arg("plan"), py::arg("trace"), py::arg("mode") = "online",
      py::arg("scheduler") = "iwrr", py::arg("seed") = 1, py::arg("horizon_s") = 120.0,
      py::arg("warmup_s") = 20.0,
      "Run a trace through the discrete-event simulator; returns a metrics dict.");
}
