// End-to-end acceptance suite. Each check prints exactly one [PASS]/[FAIL]
// line with the measured numbers; the exit code is the number of failures.
//
// Usage: helio_acceptance --bin /path/to/helio
// The --bin argument points at the CLI binary, used by the determinism check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "helio/cluster.hpp"
#include "helio/flow_graph.hpp"
#include "helio/heuristics.hpp"
#include "helio/placement.hpp"
#include "helio/rng.hpp"
#include "helio/scheduler.hpp"
#include "helio/sim.hpp"
#include "helio/workload.hpp"
#include "oracles/edmonds_karp.hpp"
#include "oracles/enumerate.hpp"
#include "oracles/random_cluster.hpp"

namespace fs = std::filesystem;
using namespace helio;

namespace {

int g_failures = 0;
std::string g_bin;           // CLI binary under test
fs::path g_artifacts;        // per-run output directory

void report(int idx, bool ok, const std::string& what) {
  std::printf("[%s] AC%d %s\n", ok ? "PASS" : "FAIL", idx, what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Cluster builders shared by the scenario checks.

NodeSpec mk_node(const std::string& id, const std::string& type, double vram, double peak) {
  NodeSpec n;
  n.id = id;
  n.type = type;
  n.vram_bytes = vram;
  n.kv_reserve = 0.5;
  n.peak_layer_tokens = peak;
  return n;
}

void biline(ClusterSpec& c, const std::string& a, const std::string& b, double bw, double lat) {
  c.links.push_back({a, b, bw, lat});
  c.links.push_back({b, a, bw, lat});
}

ClusterSpec base_model(const std::string& name, int layers) {
  ClusterSpec c;
  c.model.name = name;
  c.model.num_layers = layers;
  c.model.param_bytes = layers * 1e9;
  c.model.token_bytes = 4;
  c.model.activation_bytes = 16384;
  c.coordinator_id = "coord";
  return c;
}

// One fast node near the coordinator, four more behind a slow uplink but
// meshed together. Hand-made chain splits compete against the solver here.
ClusterSpec two_region() {
  ClusterSpec c = base_model("m8", 8);
  c.nodes.push_back(mk_node("a100", "A100", 16e9, 2400));
  c.nodes.push_back(mk_node("l4", "L4", 12e9, 2000));
  c.nodes.push_back(mk_node("t4a", "T4", 8e9, 1000));
  c.nodes.push_back(mk_node("t4b", "T4", 8e9, 1000));
  c.nodes.push_back(mk_node("t4c", "T4", 8e9, 1000));
  biline(c, "coord", "a100", 10e9, 0.0002);
  const char* far_side[] = {"l4", "t4a", "t4b", "t4c"};
  for (const char* id : far_side) {
    biline(c, "coord", id, 100e6, 0.02);
    biline(c, "a100", id, 100e6, 0.02);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) biline(c, far_side[i], far_side[j], 10e9, 0.0002);
  return c;
}

// Two second-stage replicas: one behind a fat link, one behind a thin one.
ClusterSpec fork_cluster() {
  ClusterSpec c = base_model("m8", 8);
  c.nodes.push_back(mk_node("a", "A", 80e9, 5600));
  c.nodes.push_back(mk_node("b", "B", 80e9, 4000));
  c.nodes.push_back(mk_node("cc", "C", 80e9, 2400));
  biline(c, "coord", "a", 10e9, 0.0002);
  biline(c, "a", "b", 10e9, 0.0002);
  biline(c, "a", "cc", 25e6, 0.02);
  biline(c, "coord", "b", 10e9, 0.0002);
  biline(c, "coord", "cc", 10e9, 0.0002);
  return c;
}

// Minimal two-stage pipeline on fat links.
ClusterSpec two_stage() {
  ClusterSpec c = base_model("m8", 8);
  c.nodes.push_back(mk_node("n1", "A", 80e9, 4000));
  c.nodes.push_back(mk_node("n2", "B", 80e9, 3200));
  biline(c, "coord", "n1", 10e9, 0.0002);
  biline(c, "n1", "n2", 10e9, 0.0002);
  biline(c, "n2", "coord", 10e9, 0.0002);
  return c;
}

// Three full-model replicas with distinct speeds, all equally reachable.
ClusterSpec fan3() {
  ClusterSpec c = base_model("m2", 2);
  c.model.param_bytes = 2e9;
  c.nodes.push_back(mk_node("p0", "A", 6e9, 640));
  c.nodes.push_back(mk_node("p1", "B", 6e9, 380));
  c.nodes.push_back(mk_node("p2", "C", 6e9, 260));
  for (const auto& n : c.nodes) biline(c, "coord", n.id, 10e9, 0.0002);
  return c;
}

// 24 nodes in three regions. Fast rings inside each region, a slow
// high-latency WAN mesh between regions, declaration order interleaved so
// capacity-only heuristics scatter stages across regions.
ClusterSpec geo24() {
  ClusterSpec c = base_model("m24", 24);
  auto a100 = [&](const std::string& id) { return mk_node(id, "A100", 24e9, 4000); };
  auto l4 = [&](const std::string& id) { return mk_node(id, "L4", 12e9, 1000); };
  auto t4 = [&](const std::string& id) { return mk_node(id, "T4", 6e9, 400); };
  c.nodes = {a100("a0"), l4("bl0"), l4("cl0"), t4("bt0"), t4("ct0"), a100("a1"),
             t4("bt1"),  l4("cl1"), t4("bt2"), t4("ct1"), a100("a2"), l4("bl1"),
             l4("cl2"),  t4("bt3"), t4("ct2"), a100("a3"), t4("bt4"), l4("cl3"),
             t4("bt5"),  t4("ct3"), l4("cl4"), t4("bt6"), l4("cl5"), t4("bt7")};
  std::vector<std::string> ra, rb, rc;
  for (const auto& n : c.nodes) {
    if (n.id[0] == 'a') ra.push_back(n.id);
    else if (n.id[0] == 'b') rb.push_back(n.id);
    else rc.push_back(n.id);
  }
  for (const auto& n : c.nodes)
    biline(c, "coord", n.id, n.id[0] == 'a' ? 10e9 : 100e6, n.id[0] == 'a' ? 0.0002 : 0.02);
  auto ring = [&](const std::vector<std::string>& r) {
    for (size_t i = 0; i < r.size(); ++i) biline(c, r[i], r[(i + 1) % r.size()], 10e9, 0.0002);
    biline(c, r[0], r[r.size() / 2], 10e9, 0.0002);
    if (r.size() > 4) biline(c, r[1], r[r.size() / 2 + 1], 10e9, 0.0002);
  };
  ring(ra);
  ring(rb);
  ring(rc);
  auto wan = [&](const std::vector<std::string>& x, const std::vector<std::string>& y) {
    for (const auto& u : x)
      for (const auto& v : y) biline(c, u, v, 12e6, 0.05);
  };
  wan(ra, rb);
  wan(ra, rc);
  wan(rb, rc);
  return c;
}

// Dense 24-node cluster: complete graph between compute nodes. Links along
// same-type chains have lower latency than the rest of the mesh, so pruning
// keeps them.
ClusterSpec dense24() {
  ClusterSpec c = base_model("d24", 24);
  for (int i = 0; i < 4; ++i) c.nodes.push_back(mk_node("a" + std::to_string(i), "A100", 24e9, 4000));
  for (int i = 0; i < 8; ++i) c.nodes.push_back(mk_node("l" + std::to_string(i), "L4", 12e9, 1000));
  for (int i = 0; i < 12; ++i) c.nodes.push_back(mk_node("t" + std::to_string(i), "T4", 6e9, 400));
  for (const auto& n : c.nodes) biline(c, "coord", n.id, 10e9, 0.0002);
  for (size_t i = 0; i < c.nodes.size(); ++i)
    for (size_t j = i + 1; j < c.nodes.size(); ++j) {
      bool chain = c.nodes[i].type == c.nodes[j].type && j == i + 1;
      biline(c, c.nodes[i].id, c.nodes[j].id, 10e9, chain ? 0.0002 : 0.001);
    }
  return c;
}

// Typed two-tier clusters whose per-type node counts divide the layer count
// (so the per-type-chain heuristic is structurally strong), plus an
// occasional slow link that may or may not land on a used edge.
ClusterSpec typed_cluster(Rng& rng) {
  struct Cfg { int layers, na, nb; };
  static const Cfg kCfgs[] = {{6, 2, 3}, {6, 3, 3}, {8, 2, 4}, {8, 4, 4}};
  Cfg cfg = kCfgs[rng.uniform_int(4)];
  ClusterSpec c = base_model("typed", cfg.layers);
  for (int i = 0; i < cfg.na; ++i) c.nodes.push_back(mk_node("a" + std::to_string(i), "A", 9e9, 2400));
  for (int i = 0; i < cfg.nb; ++i) c.nodes.push_back(mk_node("b" + std::to_string(i), "B", 5e9, 1200));
  for (const auto& n : c.nodes) biline(c, "coord", n.id, 1e9, 0.01);
  for (size_t i = 0; i < c.nodes.size(); ++i)
    for (size_t j = i + 1; j < c.nodes.size(); ++j)
      biline(c, c.nodes[i].id, c.nodes[j].id, rng.uniform_int(2) ? 2e9 : 1e9, 0.001);
  if (rng.uniform_int(2)) {
    int n = static_cast<int>(c.nodes.size());
    int u = static_cast<int>(rng.uniform_int(n));
    int v = static_cast<int>(rng.uniform_int(n - 1));
    if (v >= u) ++v;
    for (LinkSpec& l : c.links)
      if ((l.src == c.nodes[u].id && l.dst == c.nodes[v].id) ||
          (l.src == c.nodes[v].id && l.dst == c.nodes[u].id))
        l.bandwidth_bps = 30e6;
  }
  return c;
}

Placement chain_spans(const ClusterSpec& c, const std::vector<int>& spans) {
  Placement p;
  int at = 0;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    p[c.nodes[i].id] = {at, at + spans[i]};
    at += spans[i];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Every simulation in this suite goes through run_sim so the capacity
// invariant (simulated throughput never exceeds the plan's max-flow value)
// is checked across all of them.

struct SimTally {
  long sims = 0;
  long violations = 0;
  double worst_ratio = 0;  // max over sims of throughput / objective
};
SimTally g_sim_tally;

SimMetrics run_sim(const ClusterSpec& c, const PlacementPlan& plan,
                   const std::vector<Request>& trace, const SimConfig& cfg) {
  SimMetrics m = simulate(c, plan, trace, cfg);
  ++g_sim_tally.sims;
  double ratio = m.throughput_tps / plan.objective;
  g_sim_tally.worst_ratio = std::max(g_sim_tally.worst_ratio, ratio);
  if (m.throughput_tps > plan.objective * (1.0 + 1e-6) + 1e-6) ++g_sim_tally.violations;
  return m;
}

// ---------------------------------------------------------------------------
// AC1: the production max-flow matches a BFS augmenting-path reference
// exactly on at least 1000 random integer-capacity graphs.

void ac1() {
  const int kGraphs = 1000;
  double t0 = now_s();
  Rng rng(424201);
  int bad = 0;
  for (int it = 0; it < kGraphs; ++it) {
    FlowGraph g;
    g.num_vertices = 2 + static_cast<int>(rng.uniform_int(19));  // 2..20
    g.source = 0;
    g.sink = g.num_vertices - 1;
    int m = 1 + static_cast<int>(rng.uniform_int(3 * g.num_vertices));
    std::vector<testutil::EkEdge> ek;
    for (int i = 0; i < m; ++i) {
      FlowEdge e;
      e.u = static_cast<int>(rng.uniform_int(g.num_vertices));
      e.v = static_cast<int>(rng.uniform_int(g.num_vertices));
      e.cap = static_cast<double>(rng.uniform_int(51));
      g.edges.push_back(e);
      ek.push_back({e.u, e.v, static_cast<long long>(e.cap)});
    }
    double got = max_flow(g);
    long long want = testutil::ek_max_flow(g.num_vertices, g.source, g.sink, ek);
    if (got != static_cast<double>(want)) ++bad;
  }
  double dt = now_s() - t0;
  report(1, bad == 0 && dt < 5.0,
         fmt("max-flow equals the augmenting-path reference on %d/%d random graphs "
             "(<=20 vertices, integer capacities) in %.2fs (limit 5s)",
             kGraphs - bad, kGraphs, dt));
}

// ---------------------------------------------------------------------------
// AC2: the solver matches exhaustive placement enumeration on 50 random
// clusters, both with and without partial-overlap handoffs.
// AC3: on each of those solves the reported objective equals the max-flow of
// the graph rebuilt from the returned placement.

void ac2_ac3() {
  const int kClusters = 50;
  const unsigned kBase = 7001;
  double t0 = now_s();
  testutil::RandomClusterParams params;
  params.max_nodes = 5;
  params.min_layers = 4;
  params.max_layers = 8;

  int solves = 0, obj_bad = 0, rebuild_bad = 0;
  double worst_rel = 0;
  for (int i = 0; i < kClusters; ++i) {
    Rng rng(kBase + i);
    ClusterSpec c = testutil::random_cluster(rng, params);
    for (bool partial : {false, true}) {
      double want = testutil::best_placement_exhaustive(c, partial, nullptr, nullptr);
      PlanOptions opts;
      opts.allow_partial = partial;
      opts.gap = 0.0;
      opts.lex_tiebreak = false;
      PlacementPlan plan = plan_placement(c, opts);
      ++solves;
      double scale = std::max(1.0, std::fabs(want));
      worst_rel = std::max(worst_rel, std::fabs(plan.objective - want) / scale);
      if (std::fabs(plan.objective - want) > 1e-6 * scale) ++obj_bad;

      FlowGraph fg = build_flow_graph(c, plan.placement, partial);
      double rebuilt = max_flow(fg);
      double rscale = std::max(1.0, std::fabs(plan.objective));
      if (std::fabs(rebuilt - plan.objective) > 1e-6 * rscale) ++rebuild_bad;
    }
  }
  double dt = now_s() - t0;
  report(2, obj_bad == 0 && dt < 600.0,
         fmt("solver equals exhaustive enumeration on %d random clusters x2 modes "
             "(%d solves, worst rel err %.2e, tol 1e-6) in %.1fs (limit 600s)",
             kClusters, solves, worst_rel, dt));
  report(3, rebuild_bad == 0,
         fmt("objective equals max-flow of the rebuilt placement graph on all %d solves "
             "(tol 1e-6)", solves));
}

// ---------------------------------------------------------------------------
// AC4: on the two-region cluster the solver beats the balanced-compute chain
// strictly, which in turn beats the uniform chain.

void ac4() {
  ClusterSpec c = two_region();
  PlacementPlan uni = plan_from_placement(c, chain_spans(c, {2, 2, 2, 1, 1}), true, "uniform");
  PlacementPlan bal = plan_from_placement(c, chain_spans(c, {3, 2, 1, 1, 1}), true, "balanced");
  PlanOptions opts;
  opts.gap = 0.1;
  opts.node_budget = 2000;
  PlacementPlan milp = plan_placement(c, opts);
  double scale = std::max(1.0, bal.objective);
  bool ok = milp.objective > bal.objective + 1e-9 * scale &&
            bal.objective >= uni.objective - 1e-9 * scale;
  report(4, ok,
         fmt("two-region cluster: solver %.2f > balanced-compute chain %.2f >= uniform "
             "chain %.2f tokens/s",
             milp.objective, bal.objective, uni.objective));
}

// ---------------------------------------------------------------------------
// AC5: 24-node three-region cluster; offline throughput of the solver's plan
// beats the window-greedy baseline beats the stage-greedy baseline, each by
// at least 5%.

void ac5() {
  ClusterSpec c = geo24();
  PlanOptions opts;
  opts.gap = 0.05;
  opts.node_budget = 300;
  opts.prune_degree = 6;
  opts.lex_tiebreak = false;
  PlacementPlan milp = plan_placement(c, opts);
  PlacementPlan pet = plan_from_placement(c, petals_placement(c).placement, true, "petals");
  PlacementPlan swm = plan_from_placement(c, swarm_placement(c).placement, true, "swarm");

  LengthParams lens;
  lens.mean_input = 1400;
  lens.mean_output = 100;
  lens.max_input = 2600;
  lens.max_output = 400;
  double best = std::max({milp.objective, pet.objective, swm.objective});
  long count = std::max<long>(1, llround(best * 90 / (lens.mean_input + lens.mean_output)));
  std::vector<Request> trace =
      generate_trace(static_cast<int>(count), 0, TraceMode::kOffline, lens, 51);

  std::map<std::string, double> tput;
  for (const PlacementPlan* pl : {&milp, &pet, &swm}) {
    SimConfig cfg;
    cfg.mode = TraceMode::kOffline;
    cfg.policy = SchedPolicy::kIwrr;
    cfg.seed = 51;
    cfg.warmup_s = 0;
    cfg.horizon_s = 3600;
    tput[pl->method] = run_sim(c, *pl, trace, cfg).throughput_tps;
  }
  bool ok = tput["milp"] >= 1.05 * tput["petals"] && tput["petals"] >= 1.05 * tput["swarm"];
  report(5, ok,
         fmt("geo cluster offline throughput: solver %.1f >= 1.05x window-greedy %.1f >= "
             "1.05x stage-greedy %.1f tokens/s (plan values %.0f/%.0f/%.0f)",
             tput["milp"], tput["petals"], tput["swarm"], milp.objective, pet.objective,
             swm.objective));
}

// ---------------------------------------------------------------------------
// AC6: under congestion the interleaved weighted round-robin scheduler beats
// random/shortest-queue/stake-weighted admission by >=1.05x throughput and
// keeps the worst per-link queueing delay lower. Per-link stats land in a CSV.

void ac6() {
  ClusterSpec c = fork_cluster();
  Placement p;
  p["a"] = {0, 4};
  p["b"] = {4, 8};
  p["cc"] = {4, 8};
  PlacementPlan plan = plan_from_placement(c, p, true, "fixed");

  LengthParams lens;
  double rate = 0.9 * plan.objective / (lens.mean_input + lens.mean_output);
  const double duration = 150;
  int count = static_cast<int>(rate * duration * 1.25) + 64;
  std::vector<Request> trace = generate_trace(count, rate, TraceMode::kOnline, lens, 97);

  fs::create_directories(g_artifacts);
  std::ofstream csv(g_artifacts / "congestion_links.csv");
  csv << "policy,src,dst,transfers,bytes,queue_delay_mean_s,queue_delay_max_s\n";

  std::map<SchedPolicy, double> tput, maxq;
  for (SchedPolicy pol :
       {SchedPolicy::kIwrr, SchedPolicy::kRandom, SchedPolicy::kSqf, SchedPolicy::kSwarm}) {
    SimConfig cfg;
    cfg.mode = TraceMode::kOnline;
    cfg.policy = pol;
    cfg.seed = 97;
    cfg.warmup_s = 20;
    cfg.horizon_s = duration;
    SimMetrics m = run_sim(c, plan, trace, cfg);
    tput[pol] = m.throughput_tps;
    double q = 0;
    for (const LinkStats& l : m.links) {
      q = std::max(q, l.queue_delay_max_s);
      csv << sched_policy_name(pol) << ',' << l.src << ',' << l.dst << ',' << l.transfers << ','
          << l.bytes << ',' << l.queue_delay_mean_s << ',' << l.queue_delay_max_s << '\n';
    }
    maxq[pol] = q;
  }
  csv.close();

  bool ok = true;
  for (SchedPolicy pol : {SchedPolicy::kRandom, SchedPolicy::kSqf, SchedPolicy::kSwarm}) {
    ok = ok && tput[SchedPolicy::kIwrr] >= 1.05 * tput[pol];
    ok = ok && maxq[SchedPolicy::kIwrr] < maxq[pol];
  }
  report(6, ok,
         fmt("congested fork: weighted round-robin %.1f tokens/s, worst link queue %.1fs vs "
             "random %.1f/%.1fs, shortest-queue %.1f/%.1fs, stake-weighted %.1f/%.1fs "
             "(per-link stats: %s)",
             tput[SchedPolicy::kIwrr], maxq[SchedPolicy::kIwrr], tput[SchedPolicy::kRandom],
             maxq[SchedPolicy::kRandom], tput[SchedPolicy::kSqf], maxq[SchedPolicy::kSqf],
             tput[SchedPolicy::kSwarm], maxq[SchedPolicy::kSwarm],
             (g_artifacts / "congestion_links.csv").string().c_str()));
}

// ---------------------------------------------------------------------------
// AC7: simulated throughput never exceeds the plan's max-flow value, and a
// single uncontended pipeline reaches at least 85% of it offline.

void ac7() {
  ClusterSpec c = two_stage();
  Placement p;
  p["n1"] = {0, 4};
  p["n2"] = {4, 8};
  PlacementPlan plan = plan_from_placement(c, p, true, "fixed");

  LengthParams lens;
  long count =
      std::max<long>(1, llround(plan.objective * 120 / (lens.mean_input + lens.mean_output)));
  std::vector<Request> trace =
      generate_trace(static_cast<int>(count), 0, TraceMode::kOffline, lens, 41);
  SimConfig cfg;
  cfg.mode = TraceMode::kOffline;
  cfg.policy = SchedPolicy::kIwrr;
  cfg.seed = 41;
  cfg.warmup_s = 0;
  cfg.horizon_s = 3600;
  SimMetrics m = run_sim(c, plan, trace, cfg);
  double ratio = m.throughput_tps / plan.objective;

  bool ok = g_sim_tally.violations == 0 && ratio >= 0.85;
  report(7, ok,
         fmt("throughput stayed <= plan max-flow in all %ld simulations (worst ratio %.3f); "
             "uncontended pipeline reached %.1f%% of its %.0f tokens/s bound (floor 85%%)",
             g_sim_tally.sims, g_sim_tally.worst_ratio, 100 * ratio, plan.objective));
}

// ---------------------------------------------------------------------------
// AC8: over 10,000 admissions the per-replica admission counts match the
// configured weights to within (number of candidates) / 10,000.

void ac8() {
  ClusterSpec c = fan3();
  Placement p;
  p["p0"] = {0, 2};
  p["p1"] = {0, 2};
  p["p2"] = {0, 2};
  PlacementPlan plan = plan_from_placement(c, p, true, "fixed");

  // Recreate the scheduler's weighting of the three coordinator fan-out edges.
  std::vector<std::string> cand;
  std::vector<double> flows;
  for (const PlanEdge& e : plan.edges)
    if (e.src == c.coordinator_id) {
      cand.push_back(e.dst);
      flows.push_back(e.flow);
    }
  std::vector<long> w = iwrr_weights(flows);
  long wsum = 0;
  for (long x : w) wsum += x;

  const long kAdmits = 10000;
  Scheduler sched(c, plan, SchedPolicy::kIwrr, 7);
  std::map<std::string, long> counts;
  long denied = 0;
  for (long i = 0; i < kAdmits; ++i) {
    auto route = sched.admit(i, 8);
    if (!route || route->empty()) {
      ++denied;
      continue;
    }
    counts[route->front().node]++;
    sched.complete(i, 8);
  }

  double tol = static_cast<double>(cand.size());  // candidates / 10000, in counts
  bool ok = denied == 0 && cand.size() == 3;
  std::string detail;
  for (size_t i = 0; i < cand.size(); ++i) {
    double expect = static_cast<double>(kAdmits) * w[i] / wsum;
    double dev = std::fabs(counts[cand[i]] - expect);
    ok = ok && dev <= tol;
    detail += fmt("%s%s %ld/%.1f", i ? ", " : "", cand[i].c_str(), counts[cand[i]], expect);
  }
  report(8, ok,
         fmt("admission split over %ld requests matches weights %ld:%ld:%ld within %.0f "
             "(%s, denied %ld)",
             kAdmits, w.size() > 0 ? w[0] : 0, w.size() > 1 ? w[1] : 0, w.size() > 2 ? w[2] : 0,
             tol, detail.c_str(), denied));
}

// ---------------------------------------------------------------------------
// AC9: (a) pruning a dense 24-node cluster to average degree 12 removes at
// least 30% of the model variables while keeping the objective within 5%;
// (b) warm starts reach the final incumbent in strictly fewer explored nodes
// on at least 70% of 20 random typed clusters.

long count_lp_vars(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  bool in_bounds = false;
  long n = 0;
  while (std::getline(in, line)) {
    if (line == "Bounds") {
      in_bounds = true;
      continue;
    }
    if (line == "General" || line == "End") in_bounds = false;
    if (in_bounds && !line.empty()) ++n;
  }
  return n;
}

void ac9() {
  fs::create_directories(g_artifacts);
  ClusterSpec dense = dense24();
  PlanOptions full;
  full.gap = 0.0;
  full.lex_tiebreak = false;
  full.export_lp_path = (g_artifacts / "dense_full.lp").string();
  PlacementPlan pf = plan_placement(dense, full);
  PlanOptions pruned = full;
  pruned.prune_degree = 12;
  pruned.export_lp_path = (g_artifacts / "dense_pruned.lp").string();
  PlacementPlan pp = plan_placement(dense, pruned);

  long vf = count_lp_vars(g_artifacts / "dense_full.lp");
  long vp = count_lp_vars(g_artifacts / "dense_pruned.lp");
  double cut = 1.0 - static_cast<double>(vp) / static_cast<double>(vf);
  double drift = std::fabs(pp.objective - pf.objective) / std::max(1.0, pf.objective);

  // The full dense solve is unpruned, so its placement graph can be rebuilt
  // here as one more external consistency point.
  FlowGraph fg = build_flow_graph(dense, pf.placement, true);
  double rebuilt = max_flow(fg);
  bool rebuilt_ok = std::fabs(rebuilt - pf.objective) <= 1e-6 * std::max(1.0, pf.objective);

  bool ok_a = cut >= 0.30 && drift <= 0.05 && rebuilt_ok;

  const unsigned kBase = 301;
  int wins = 0, ties = 0, losses = 0;
  for (unsigned s = 0; s < 20; ++s) {
    Rng rng(kBase + s);
    ClusterSpec c = typed_cluster(rng);
    PlanOptions warm;
    warm.gap = 0.0;
    warm.node_budget = 1500;
    warm.lex_tiebreak = false;
    PlanOptions cold = warm;
    cold.use_warm_starts = false;
    PlacementPlan pw = plan_placement(c, warm);
    PlacementPlan pc = plan_placement(c, cold);
    if (pw.nodes_to_best < pc.nodes_to_best) ++wins;
    else if (pw.nodes_to_best == pc.nodes_to_best) ++ties;
    else ++losses;
  }
  bool ok_b = wins >= 14;
  report(9, ok_a && ok_b,
         fmt("pruning to degree 12 cut variables %ld->%ld (%.1f%%, floor 30%%) with objective "
             "drift %.2f%% (cap 5%%); warm starts reached the incumbent in strictly fewer "
             "nodes on %d/20 typed clusters (floor 14; %d ties, %d losses)",
             vf, vp, 100 * cut, 100 * drift, wins, ties, losses));
}

// ---------------------------------------------------------------------------
// AC10: running the CLI twice with the same command and seed produces
// byte-identical CSV outputs.

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ac10() {
  if (g_bin.empty()) {
    report(10, false, "no --bin argument given; cannot exercise the CLI");
    return;
  }
  fs::create_directories(g_artifacts);
  fs::path cluster_json = g_artifacts / "fork_cluster.json";
  save_cluster(fork_cluster(), cluster_json.string());

  fs::path dir_a = g_artifacts / "repeat_a";
  fs::path dir_b = g_artifacts / "repeat_b";
  std::string base = "\"" + g_bin + "\" compare --cluster \"" + cluster_json.string() +
                     "\" --methods swarm,petals --schedulers iwrr,random --mode online"
                     " --duration 60 --seed 777 --out ";
  int rc_a = std::system((base + "\"" + dir_a.string() + "\" > \"" +
                          (dir_a.string() + ".log") + "\" 2>&1").c_str());
  int rc_b = std::system((base + "\"" + dir_b.string() + "\" > \"" +
                          (dir_b.string() + ".log") + "\" 2>&1").c_str());

  bool ok = rc_a == 0 && rc_b == 0;
  std::string detail = fmt("two identical CLI runs (exit %d/%d)", rc_a, rc_b);
  for (const char* f : {"metrics.csv", "links.csv", "nodes.csv"}) {
    auto a = slurp(dir_a / f), b = slurp(dir_b / f);
    bool same = a && b && !a->empty() && *a == *b;
    ok = ok && same;
    detail += fmt("; %s %s (%zu bytes)", f, same ? "identical" : "DIFFER",
                  a ? a->size() : size_t{0});
  }
  report(10, ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--bin") == 0) g_bin = argv[i + 1];
  g_artifacts = fs::path("acceptance_artifacts");

  struct Entry {
    int idx;
    void (*fn)();
  };
  const Entry entries[] = {{1, ac1}, {2, ac2_ac3}, {4, ac4},  {5, ac5},
                           {6, ac6}, {7, ac7},     {8, ac8},  {9, ac9},
                           {10, ac10}};
  for (const Entry& e : entries) {
    try {
      e.fn();
    } catch (const std::exception& ex) {
      report(e.idx, false, std::string("unexpected exception: ") + ex.what());
    }
  }
  std::printf("%d/10 checks passed\n", 10 - g_failures);
  return g_failures;
}
