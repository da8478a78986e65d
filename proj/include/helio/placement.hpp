#pragma once

#include <string>
#include <vector>

#include "helio/bnb.hpp"
#include "helio/flow_graph.hpp"

namespace helio {

// Candidate-connection MILP over one cluster. Sentinel node indices for the
// coordinator acting as source / sink.
constexpr int kSourceIdx = -1;
constexpr int kSinkIdx = -2;

struct MilpBuild {
  LpProblem lp;
  std::vector<int> s_var;               // per node
  std::vector<std::vector<int>> b_var;  // per node, hold-count j = 0..k_i
  struct Edge {
    int tail, head;  // node index or kSourceIdx / kSinkIdx
    int link_index;  // into cluster.links
    double cap;      // token capacity of the physical link
    int f, d, c1, c2;  // variable indices (c1/c2 only in partial mode)
  };
  std::vector<Edge> edges;
  bool allow_partial = true;
};

MilpBuild build_milp(const ClusterSpec& c, bool allow_partial);

// (sum over nodes of the best layer-token rate) / L; no placement beats it.
double throughput_upper_bound(const ClusterSpec& c);

struct PruneReport {
  int links_removed = 0;
  double avg_degree_before = 0, avg_degree_after = 0;
  std::vector<std::string> warnings;
};

// Drops the slowest inter-node links (ties: higher latency, then id order)
// until the average node degree reaches the target, never disconnecting the
// cluster. Coordinator links are kept.
ClusterSpec prune_links(const ClusterSpec& c, double target_avg_degree,
                        PruneReport* report = nullptr);

struct PlanEdge {
  std::string src, dst;
  double flow = 0;
  int exec_start = 0, exec_end = 0;
};

struct PlacementPlan {
  std::string method;
  Placement placement;
  std::vector<PlanEdge> edges;  // positive-flow edges only
  double objective = 0;
  bool allow_partial = true;
  MilpStatus status = MilpStatus::kOptimal;
  double best_bound = 0;
  long nodes_explored = 0;
  long nodes_to_best = 0;
  std::vector<std::string> warnings;
};

struct PlanOptions {
  bool allow_partial = true;
  double prune_degree = 0;  // <= 0 disables pruning
  double gap = 0.02;
  double time_budget_s = 600;
  long node_budget = -1;
  bool use_warm_starts = true;
  bool lex_tiebreak = true;  // canonical (s,e) among equal-objective optima
  std::string export_lp_path;
};

// MILP placement: warm-started branch & bound with LP-rounding incumbents,
// verified against a rebuilt flow graph before returning.
PlacementPlan plan_placement(const ClusterSpec& c, const PlanOptions& opts = {});

// Wraps a fixed placement (e.g. heuristic output) into a plan via max-flow.
PlacementPlan plan_from_placement(const ClusterSpec& c, const Placement& p, bool allow_partial,
                                  const std::string& method);

std::string serialize_plan(const PlacementPlan& plan);
PlacementPlan parse_plan(const std::string& text, const std::string& origin);
void save_plan(const PlacementPlan& plan, const std::string& path);
PlacementPlan load_plan(const std::string& path);

}  // namespace helio
