#include "helio/placement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "helio/errors.hpp"
#include "helio/heuristics.hpp"
#include "helio/log.hpp"
#include "helio/lp_format.hpp"
#include "json.hpp"

namespace helio {

namespace {

using json = nlohmann::ordered_json;

std::string end_name(const ClusterSpec& c, int idx) {
  if (idx == kSourceIdx || idx == kSinkIdx) return "coord";
  return c.nodes[idx].id;
}

}  // namespace

double throughput_upper_bound(const ClusterSpec& c) {
  double total = 0;
  for (const NodeSpec& n : c.nodes) {
    int k = c.max_layers(n);
    double best = 0;
    for (int j = 1; j <= k; ++j) best = std::max(best, c.layer_token_rate(n, j));
    total += best;
  }
  return total / c.model.num_layers;
}

MilpBuild build_milp(const ClusterSpec& c, bool allow_partial) {
  validate_cluster(c);
  MilpBuild mb;
  mb.allow_partial = allow_partial;
  LpProblem& lp = mb.lp;
  const int L = c.model.num_layers;
  const int N = static_cast<int>(c.nodes.size());

  mb.s_var.resize(N);
  mb.b_var.resize(N);
  for (int i = 0; i < N; ++i) {
    const NodeSpec& n = c.nodes[i];
    mb.s_var[i] = lp.add_var("s_" + n.id, 0, L - 1, 0, true);
    int k = c.max_layers(n);
    for (int j = 0; j <= k; ++j)
      mb.b_var[i].push_back(lp.add_var("b_" + n.id + "_" + std::to_string(j), 0, 1, 0, true));
  }

  // e_i = s_i + sum_j j * b_i_j, appended to a row with the given sign.
  auto add_e = [&](LpRow& row, int i, double sign) {
    row.coef.push_back({mb.s_var[i], sign});
    for (size_t j = 1; j < mb.b_var[i].size(); ++j)
      row.coef.push_back({mb.b_var[i][j], sign * static_cast<double>(j)});
  };

  for (int i = 0; i < N; ++i) {
    LpRow pick;
    pick.name = "pick_" + c.nodes[i].id;
    pick.sense = RowSense::kEq;
    pick.rhs = 1;
    for (int v : mb.b_var[i]) pick.coef.push_back({v, 1.0});
    lp.rows.push_back(std::move(pick));

    LpRow span;  // e_i <= L
    span.name = "span_" + c.nodes[i].id;
    span.sense = RowSense::kLe;
    span.rhs = L;
    add_e(span, i, 1.0);
    lp.rows.push_back(std::move(span));
  }

  // Best compute rate per node. Every token crossing an edge must also pass
  // the compute stage of the adjacent node(s), so clamping edge capacities to
  // these rates is loss-free and keeps the flow gates free of huge
  // coefficients that would wreck the LP relaxation.
  std::vector<double> comp_max(N, 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 1; j <= c.max_layers(c.nodes[i]); ++j)
      comp_max[i] = std::max(comp_max[i], compute_edge_capacity(c, c.nodes[i], j));

  for (size_t li = 0; li < c.links.size(); ++li) {
    const LinkSpec& l = c.links[li];
    bool src_coord = (l.src == c.coordinator_id);
    bool dst_coord = (l.dst == c.coordinator_id);
    MilpBuild::Edge e;
    e.link_index = static_cast<int>(li);
    e.c1 = e.c2 = -1;
    if (src_coord) {
      e.tail = kSourceIdx;
      e.head = c.node_index(l.dst);
      e.cap = std::min(link_token_capacity(l, c.model.token_bytes), comp_max[e.head]);
    } else if (dst_coord) {
      e.tail = c.node_index(l.src);
      e.head = kSinkIdx;
      e.cap = std::min(link_token_capacity(l, c.model.token_bytes), comp_max[e.tail]);
    } else {
      e.tail = c.node_index(l.src);
      e.head = c.node_index(l.dst);
      e.cap = std::min(link_token_capacity(l, c.model.activation_bytes),
                       std::min(comp_max[e.tail], comp_max[e.head]));
    }
    std::string tn = end_name(c, e.tail), hn = end_name(c, e.head);
    bool from_source = e.tail == kSourceIdx;
    e.f = lp.add_var("f_" + tn + "_" + hn, 0, e.cap, from_source ? 1.0 : 0.0, false);
    e.d = lp.add_var("d_" + tn + "_" + hn, 0, 1, 0, true);
    if (!src_coord && !dst_coord && allow_partial) {
      // Continuous is enough: d = 1 forces both to 1 through the `both` row,
      // and their values are irrelevant whenever d = 0.
      e.c1 = lp.add_var("c1_" + tn + "_" + hn, 0, 1, 0, false);
      e.c2 = lp.add_var("c2_" + tn + "_" + hn, 0, 1, 0, false);
    }
    mb.edges.push_back(e);
  }

  for (const MilpBuild::Edge& e : mb.edges) {
    std::string tag = end_name(c, e.tail) + "_" + end_name(c, e.head);
    if (e.tail == kSourceIdx) {
      // Valid only when the head starts at layer 0: s_h + L*d <= L.
      LpRow r;
      r.name = "valid_" + tag;
      r.sense = RowSense::kLe;
      r.rhs = L;
      r.coef.push_back({mb.s_var[e.head], 1.0});
      r.coef.push_back({e.d, static_cast<double>(L)});
      lp.rows.push_back(std::move(r));
    } else if (e.head == kSinkIdx) {
      // Valid only when the tail ends at layer L: L*d - e_t <= 0.
      LpRow r;
      r.name = "valid_" + tag;
      r.sense = RowSense::kLe;
      r.rhs = 0;
      r.coef.push_back({e.d, static_cast<double>(L)});
      add_e(r, e.tail, -1.0);
      lp.rows.push_back(std::move(r));
    } else if (allow_partial) {
      // c1 = 1 only if s_h <= e_t ; c2 = 1 only if e_t < e_h ; d needs both.
      LpRow r1;
      r1.name = "cond1_" + tag;
      r1.sense = RowSense::kLe;
      r1.rhs = L + 1;
      r1.coef.push_back({mb.s_var[e.head], 1.0});
      add_e(r1, e.tail, -1.0);
      r1.coef.push_back({e.c1, static_cast<double>(L + 1)});
      lp.rows.push_back(std::move(r1));

      LpRow r2;
      r2.name = "cond2_" + tag;
      r2.sense = RowSense::kLe;
      r2.rhs = L;
      r2.coef.push_back({e.c2, static_cast<double>(L + 1)});
      add_e(r2, e.head, -1.0);
      add_e(r2, e.tail, 1.0);
      lp.rows.push_back(std::move(r2));

      LpRow rd;
      rd.name = "both_" + tag;
      rd.sense = RowSense::kLe;
      rd.rhs = 0;
      rd.coef.push_back({e.d, 1.0});
      rd.coef.push_back({e.c1, -0.5});
      rd.coef.push_back({e.c2, -0.5});
      lp.rows.push_back(std::move(rd));
    } else {
      // Exact chaining: d = 1 forces e_t == s_h.
      LpRow ra;
      ra.name = "chain_lo_" + tag;
      ra.sense = RowSense::kLe;
      ra.rhs = L;
      ra.coef.push_back({e.d, static_cast<double>(L)});
      ra.coef.push_back({mb.s_var[e.head], -1.0});
      add_e(ra, e.tail, 1.0);
      lp.rows.push_back(std::move(ra));

      LpRow rb;
      rb.name = "chain_hi_" + tag;
      rb.sense = RowSense::kLe;
      rb.rhs = L;
      rb.coef.push_back({e.d, static_cast<double>(L)});
      rb.coef.push_back({mb.s_var[e.head], 1.0});
      add_e(rb, e.tail, -1.0);
      lp.rows.push_back(std::move(rb));
    }

    // Flow only on valid connections: f <= cap * d.
    LpRow rf;
    rf.name = "gate_" + tag;
    rf.sense = RowSense::kLe;
    rf.rhs = 0;
    rf.coef.push_back({e.f, 1.0});
    rf.coef.push_back({e.d, -e.cap});
    lp.rows.push_back(std::move(rf));
  }

  for (int i = 0; i < N; ++i) {
    LpRow cons;  // flow conservation at node i
    cons.name = "cons_" + c.nodes[i].id;
    cons.sense = RowSense::kEq;
    cons.rhs = 0;
    LpRow comp;  // inflow bounded by the compute edge of the held count
    comp.name = "comp_" + c.nodes[i].id;
    comp.sense = RowSense::kLe;
    comp.rhs = 0;
    for (const MilpBuild::Edge& e : mb.edges) {
      if (e.head == i) {
        cons.coef.push_back({e.f, 1.0});
        comp.coef.push_back({e.f, 1.0});
      }
      if (e.tail == i) cons.coef.push_back({e.f, -1.0});
    }
    const NodeSpec& n = c.nodes[i];
    for (size_t j = 1; j < mb.b_var[i].size(); ++j)
      comp.coef.push_back(
          {mb.b_var[i][j], -compute_edge_capacity(c, n, static_cast<int>(j))});
    lp.rows.push_back(std::move(cons));
    lp.rows.push_back(std::move(comp));
  }
  return mb;
}

ClusterSpec prune_links(const ClusterSpec& c, double target_avg_degree, PruneReport* report) {
  PruneReport local;
  PruneReport& rep = report ? *report : local;
  const int N = static_cast<int>(c.nodes.size());

  // Undirected compute-compute pairs; both directions prune together.
  std::map<std::pair<int, int>, std::vector<int>> pairs;
  for (size_t li = 0; li < c.links.size(); ++li) {
    const LinkSpec& l = c.links[li];
    if (l.src == c.coordinator_id || l.dst == c.coordinator_id) continue;
    int a = c.node_index(l.src), b = c.node_index(l.dst);
    pairs[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(li));
  }

  auto avg_degree = [&](const std::set<std::pair<int, int>>& alive) {
    if (N == 0) return 0.0;
    return 2.0 * static_cast<double>(alive.size()) / N;
  };

  std::set<std::pair<int, int>> alive;
  for (const auto& [key, links] : pairs) alive.insert(key);
  rep.avg_degree_before = avg_degree(alive);

  struct Cand {
    double bw;       // min of the two directions
    double lat;      // max of the two directions
    std::pair<int, int> key;
  };
  std::vector<Cand> cands;
  for (const auto& [key, link_ids] : pairs) {
    double bw = kInf, lat = 0;
    for (int li : link_ids) {
      bw = std::min(bw, c.links[li].bandwidth_bps);
      lat = std::max(lat, c.links[li].latency_s);
    }
    cands.push_back({bw, lat, key});
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.bw != b.bw) return a.bw < b.bw;        // slowest first
    if (a.lat != b.lat) return a.lat > b.lat;    // then highest latency
    auto an = std::make_pair(c.nodes[a.key.first].id, c.nodes[a.key.second].id);
    auto bn = std::make_pair(c.nodes[b.key.first].id, c.nodes[b.key.second].id);
    return an < bn;
  });

  // Connected over compute pairs plus coordinator links (undirected view).
  auto connected_without = [&](const std::pair<int, int>& drop) {
    std::vector<std::vector<int>> adj(N + 1);  // N = coordinator vertex
    for (const auto& key : alive) {
      if (key == drop) continue;
      adj[key.first].push_back(key.second);
      adj[key.second].push_back(key.first);
    }
    for (const LinkSpec& l : c.links) {
      if (l.src != c.coordinator_id && l.dst != c.coordinator_id) continue;
      const std::string& other = l.src == c.coordinator_id ? l.dst : l.src;
      int i = c.node_index(other);
      adj[N].push_back(i);
      adj[i].push_back(N);
    }
    std::vector<char> seen(N + 1, 0);
    std::deque<int> q{N};
    seen[N] = 1;
    int count = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          q.push_back(v);
        }
    }
    return count == N + 1;
  };

  std::set<std::pair<int, int>> removed;
  for (const Cand& cand : cands) {
    if (avg_degree(alive) <= target_avg_degree) break;
    if (!connected_without(cand.key)) continue;
    alive.erase(cand.key);
    removed.insert(cand.key);
  }
  if (avg_degree(alive) > target_avg_degree)
    rep.warnings.push_back("prune: connectivity guard stopped above the target degree");

  ClusterSpec out = c;
  out.links.clear();
  for (size_t li = 0; li < c.links.size(); ++li) {
    const LinkSpec& l = c.links[li];
    if (l.src != c.coordinator_id && l.dst != c.coordinator_id) {
      int a = c.node_index(l.src), b = c.node_index(l.dst);
      if (removed.count({std::min(a, b), std::max(a, b)})) {
        ++rep.links_removed;
        continue;
      }
    }
    out.links.push_back(l);
  }
  rep.avg_degree_after = avg_degree(alive);
  return out;
}

namespace {

// Full MILP assignment for a fixed placement; flows come from a max-flow run
// so the point is feasible by construction. Returns the flow value.
double assignment_from_placement(const ClusterSpec& c, const MilpBuild& mb, const Placement& p,
                                 std::vector<double>* x_out) {
  const int L = c.model.num_layers;
  std::vector<double> x(mb.lp.num_vars(), 0.0);

  auto interval_of = [&](int i) {
    auto it = p.find(c.nodes[i].id);
    return it == p.end() ? Interval{0, 0} : it->second;
  };

  for (size_t i = 0; i < c.nodes.size(); ++i) {
    Interval iv = interval_of(static_cast<int>(i));
    int len = iv.empty() ? 0 : iv.len();
    int s = iv.empty() ? 0 : iv.start;
    if (len >= static_cast<int>(mb.b_var[i].size()))
      throw ValidationError("placement exceeds layer capacity of '" + c.nodes[i].id + "'");
    x[mb.s_var[i]] = s;
    x[mb.b_var[i][len]] = 1.0;
  }

  FlowGraph g = build_flow_graph(c, p, mb.allow_partial);
  double value = max_flow(g);

  std::map<std::pair<std::string, std::string>, double> edge_flow;
  for (const FlowEdge& fe : g.edges) {
    if (fe.kind == EdgeKind::kCompute) continue;
    edge_flow[{fe.src_id, fe.dst_id}] += fe.flow;
  }

  for (const MilpBuild::Edge& e : mb.edges) {
    const LinkSpec& l = c.links[e.link_index];
    auto it = edge_flow.find({l.src, l.dst});
    if (it != edge_flow.end()) x[e.f] = it->second;

    auto e_of = [&](int i) {
      Interval iv = interval_of(i);
      return iv.empty() ? x[mb.s_var[i]] : iv.end;
    };
    auto used = [&](int i) { return !interval_of(i).empty(); };

    bool valid = false;
    if (e.tail == kSourceIdx) {
      valid = used(e.head) && interval_of(e.head).start == 0;
    } else if (e.head == kSinkIdx) {
      valid = used(e.tail) && interval_of(e.tail).end == L;
    } else {
      double et = e_of(e.tail);
      double eh = e_of(e.head);
      double sh = interval_of(e.head).empty() ? x[mb.s_var[e.head]] : interval_of(e.head).start;
      if (mb.allow_partial) {
        bool c1 = sh <= et;
        bool c2 = et + 1 <= eh;
        if (e.c1 >= 0) x[e.c1] = c1 ? 1.0 : 0.0;
        if (e.c2 >= 0) x[e.c2] = c2 ? 1.0 : 0.0;
        valid = c1 && c2 && used(e.tail) && used(e.head);
      } else {
        valid = used(e.tail) && used(e.head) && et == sh;
      }
    }
    x[e.d] = valid ? 1.0 : 0.0;
  }
  if (x_out) *x_out = std::move(x);
  return value;
}

Placement placement_from_assignment(const ClusterSpec& c, const MilpBuild& mb,
                                    const std::vector<double>& x) {
  Placement p;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    int best_j = 0;
    double best_v = -1;
    for (size_t j = 0; j < mb.b_var[i].size(); ++j) {
      if (x[mb.b_var[i][j]] > best_v) {
        best_v = x[mb.b_var[i][j]];
        best_j = static_cast<int>(j);
      }
    }
    if (best_j == 0) continue;
    int s = static_cast<int>(std::llround(x[mb.s_var[i]]));
    p[c.nodes[i].id] = {s, s + best_j};
  }
  return p;
}

std::string status_str(MilpStatus s) {
  switch (s) {
    case MilpStatus::kOptimal: return "optimal";
    case MilpStatus::kFeasible: return "feasible";
    case MilpStatus::kInfeasible: return "infeasible";
    case MilpStatus::kUnbounded: return "unbounded";
    default: return "no-incumbent";
  }
}

MilpStatus status_from_str(const std::string& s) {
  if (s == "optimal") return MilpStatus::kOptimal;
  if (s == "feasible") return MilpStatus::kFeasible;
  if (s == "infeasible") return MilpStatus::kInfeasible;
  if (s == "unbounded") return MilpStatus::kUnbounded;
  return MilpStatus::kNoIncumbent;
}

void fill_plan_edges(const ClusterSpec& c, PlacementPlan& plan) {
  FlowGraph g = build_flow_graph(c, plan.placement, plan.allow_partial);
  double value = max_flow(g);
  plan.edges.clear();
  for (const FlowEdge& e : g.edges) {
    if (e.kind == EdgeKind::kCompute || e.flow <= 1e-9) continue;
    PlanEdge pe;
    pe.src = e.kind == EdgeKind::kCoordOut ? c.coordinator_id : e.src_id;
    pe.dst = e.kind == EdgeKind::kCoordIn ? c.coordinator_id : e.dst_id;
    pe.flow = e.flow;
    pe.exec_start = e.exec_start;
    pe.exec_end = e.exec_end;
    plan.edges.push_back(pe);
  }
  plan.objective = value;
}

}  // namespace

PlacementPlan plan_from_placement(const ClusterSpec& c, const Placement& p, bool allow_partial,
                                  const std::string& method) {
  PlacementPlan plan;
  plan.method = method;
  plan.placement = p;
  plan.allow_partial = allow_partial;
  plan.status = MilpStatus::kFeasible;
  fill_plan_edges(c, plan);
  plan.best_bound = plan.objective;
  return plan;
}

PlacementPlan plan_placement(const ClusterSpec& cluster, const PlanOptions& opts) {
  validate_cluster(cluster);
  PlacementPlan plan;
  plan.method = "milp";
  plan.allow_partial = opts.allow_partial;

  PruneReport prep;
  ClusterSpec work = opts.prune_degree > 0 ? prune_links(cluster, opts.prune_degree, &prep)
                                           : cluster;
  for (const std::string& w : prep.warnings) plan.warnings.push_back(w);
  if (prep.links_removed > 0)
    log_msg(LogLevel::kInfo, "[plan] pruned " + std::to_string(prep.links_removed) +
                                 " links (avg degree " + std::to_string(prep.avg_degree_after) +
                                 ")");

  MilpBuild mb = build_milp(work, opts.allow_partial);
  if (!opts.export_lp_path.empty()) export_lp_file(mb.lp, opts.export_lp_path);

  double ub = throughput_upper_bound(work);

  std::vector<std::vector<double>> warm;
  if (opts.use_warm_starts) {
    std::vector<HeuristicResult> seeds;
    seeds.push_back(swarm_placement(work));
    seeds.push_back(petals_placement(work));
    bool typed = std::all_of(work.nodes.begin(), work.nodes.end(),
                             [](const NodeSpec& n) { return !n.type.empty(); });
    if (typed) seeds.push_back(separate_pipelines_placement(work));
    for (const HeuristicResult& h : seeds) {
      try {
        std::vector<double> x;
        assignment_from_placement(work, mb, h.placement, &x);
        warm.push_back(std::move(x));
      } catch (const std::exception& e) {
        plan.warnings.push_back(std::string("warm start skipped: ") + e.what());
      }
    }
  }

  BnbOptions bopts;
  bopts.gap = opts.gap;
  bopts.upper_bound = ub;
  bopts.node_budget = opts.node_budget;
  bopts.time_budget_s = opts.time_budget_s;
  bopts.rounding = [&](const std::vector<double>& relax) -> std::optional<std::vector<double>> {
    const int L = work.model.num_layers;
    Placement p;
    for (size_t i = 0; i < work.nodes.size(); ++i) {
      double jf = 0;
      for (size_t j = 1; j < mb.b_var[i].size(); ++j) jf += j * relax[mb.b_var[i][j]];
      int len = std::clamp<int>(static_cast<int>(std::llround(jf)), 0,
                                static_cast<int>(mb.b_var[i].size()) - 1);
      if (len == 0) continue;
      int s = std::clamp<int>(static_cast<int>(std::llround(relax[mb.s_var[i]])), 0, L - len);
      p[work.nodes[i].id] = {s, s + len};
    }
    std::vector<double> x;
    assignment_from_placement(work, mb, p, &x);
    return x;
  };

  BnbResult bb = branch_and_bound(mb.lp, warm, bopts);
  for (const std::string& w : bb.warnings) plan.warnings.push_back(w);

  if (bb.x.empty()) {
    // The all-idle assignment is always feasible, so reaching here means the
    // search was cut off before any incumbent: fall back to heuristics.
    plan.warnings.push_back("milp search returned no incumbent; using best heuristic");
    PlacementPlan best;
    best.objective = -1;
    for (auto gen : {swarm_placement, petals_placement}) {
      try {
        PlacementPlan cand =
            plan_from_placement(work, gen(work).placement, opts.allow_partial, "milp");
        if (cand.objective > best.objective) best = cand;
      } catch (const std::exception&) {
      }
    }
    best.warnings = plan.warnings;
    best.status = MilpStatus::kFeasible;
    best.nodes_explored = bb.nodes;
    return best;
  }

  plan.status = bb.status;
  plan.best_bound = bb.best_bound;
  plan.nodes_explored = bb.nodes;
  plan.nodes_to_best = bb.nodes_to_best;
  plan.placement = placement_from_assignment(work, mb, bb.x);

  // Canonicalize (s_1, e_1, s_2, e_2, ...) among equal-objective optima.
  if (opts.lex_tiebreak && bb.status == MilpStatus::kOptimal) {
    int n = static_cast<int>(work.nodes.size());
    double bits = 2.0 * n * std::log2(work.model.num_layers + 1.0);
    if (bits <= 52) {
      LpProblem lex = mb.lp;
      LpRow keep;
      keep.name = "objective_floor";
      keep.sense = RowSense::kGe;
      keep.rhs = bb.obj - 1e-7 * std::max(1.0, std::fabs(bb.obj));
      for (const MilpBuild::Edge& e : mb.edges)
        if (e.tail == kSourceIdx) keep.coef.push_back({e.f, 1.0});
      lex.rows.push_back(std::move(keep));
      for (double& co : lex.obj) co = 0;
      double M = work.model.num_layers + 1.0;
      for (int i = 0; i < n; ++i) {
        double ws = std::pow(M, 2.0 * (n - i) - 1.0);
        double we = std::pow(M, 2.0 * (n - i) - 2.0);
        lex.obj[mb.s_var[i]] -= ws + we;  // e_i shares the s_i coefficient
        for (size_t j = 1; j < mb.b_var[i].size(); ++j)
          lex.obj[mb.b_var[i][j]] -= we * static_cast<double>(j);
      }
      BnbOptions lopts;
      lopts.node_budget = 20000;
      lopts.time_budget_s = 30;
      lopts.log_every = 0;
      BnbResult lex_bb = branch_and_bound(lex, {bb.x}, lopts);
      if (lex_bb.status == MilpStatus::kOptimal && !lex_bb.x.empty())
        plan.placement = placement_from_assignment(work, mb, lex_bb.x);
    }
  }

  fill_plan_edges(work, plan);  // also recomputes the exact objective

  double scale = std::max(1.0, std::fabs(bb.obj));
  if (std::fabs(plan.objective - bb.obj) > 1e-6 * scale)
    throw InternalError("placement self-verification failed: solver objective " +
                        std::to_string(bb.obj) + " vs max-flow " +
                        std::to_string(plan.objective));
  return plan;
}

std::string serialize_plan(const PlacementPlan& plan) {
  json root;
  root["method"] = plan.method;
  root["status"] = status_str(plan.status);
  root["objective"] = plan.objective;
  root["best_bound"] = plan.best_bound;
  root["allow_partial"] = plan.allow_partial;
  root["nodes_explored"] = plan.nodes_explored;
  root["nodes"] = json::array();
  for (const auto& [id, iv] : plan.placement) {
    if (iv.empty()) continue;
    root["nodes"].push_back(json{{"id", id}, {"start", iv.start}, {"end", iv.end}});
  }
  root["edges"] = json::array();
  for (const PlanEdge& e : plan.edges) {
    root["edges"].push_back(json{{"src", e.src},
                                 {"dst", e.dst},
                                 {"flow", e.flow},
                                 {"exec_start", e.exec_start},
                                 {"exec_end", e.exec_end}});
  }
  return root.dump(2) + "\n";
}

PlacementPlan parse_plan(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": invalid JSON: " + e.what());
  }
  PlacementPlan plan;
  try {
    plan.method = root.at("method").get<std::string>();
    plan.status = status_from_str(root.at("status").get<std::string>());
    plan.objective = root.at("objective").get<double>();
    plan.best_bound = root.value("best_bound", plan.objective);
    plan.allow_partial = root.at("allow_partial").get<bool>();
    plan.nodes_explored = root.value("nodes_explored", 0L);
    for (const json& jn : root.at("nodes"))
      plan.placement[jn.at("id").get<std::string>()] = {jn.at("start").get<int>(),
                                                        jn.at("end").get<int>()};
    for (const json& je : root.at("edges")) {
      PlanEdge e;
      e.src = je.at("src").get<std::string>();
      e.dst = je.at("dst").get<std::string>();
      e.flow = je.at("flow").get<double>();
      e.exec_start = je.at("exec_start").get<int>();
      e.exec_end = je.at("exec_end").get<int>();
      plan.edges.push_back(e);
    }
  } catch (const json::exception& e) {
    throw ParseError(origin + ": bad plan structure: " + e.what());
  }
  return plan;
}

void save_plan(const PlacementPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << serialize_plan(plan);
}

PlacementPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path);
}

}  // namespace helio
