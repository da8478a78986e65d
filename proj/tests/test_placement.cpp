#include <cmath>
#include <set>

#include "doctest.h"
#include "helio/errors.hpp"
#include "helio/placement.hpp"
#include "helio/rng.hpp"
#include "oracles/enumerate.hpp"
#include "oracles/random_cluster.hpp"
#include "test_support.hpp"

using namespace helio;
using namespace testutil;

TEST_CASE("throughput upper bound picks each node's best operating point") {
  ClusterSpec c = chain_cluster(2, 2, 1000.0);
  // Analytic profile: j * (K/j) = K at any j, so each node contributes K/L.
  CHECK(throughput_upper_bound(c) == doctest::Approx(2 * 1000.0 / 4.0));

  c.nodes[0].peak_layer_tokens = 0;
  c.nodes[0].throughput_table = {{1, 900.0}, {2, 100.0}};  // j=1 dominates: 900
  CHECK(throughput_upper_bound(c) == doctest::Approx((900.0 + 1000.0) / 4.0));
}

TEST_CASE("milp build exposes one hold-count selector per node") {
  ClusterSpec c = chain_cluster(2, 2, 1000.0);
  MilpBuild mb = build_milp(c, true);
  REQUIRE(mb.s_var.size() == 2);
  REQUIRE(mb.b_var.size() == 2);
  CHECK(mb.b_var[0].size() == 3);  // j = 0, 1, 2
  CHECK(mb.lp.var_names[mb.s_var[0]] == "s_n0");
  CHECK(mb.lp.is_int[mb.s_var[0]]);

  int source_edges = 0, sink_edges = 0;
  for (const auto& e : mb.edges) {
    if (e.tail == kSourceIdx) ++source_edges;
    if (e.head == kSinkIdx) ++sink_edges;
  }
  CHECK(source_edges == 1);
  CHECK(sink_edges == 1);
}

TEST_CASE("milp matches exhaustive enumeration on random clusters") {
  // Modest sizes keep the oracle's interval enumeration tractable.
  for (uint64_t seed : {11u, 12u, 13u, 14u, 15u, 16u}) {
    RandomClusterParams params;
    Rng rng(seed);
    ClusterSpec c = random_cluster(rng, params);
    for (bool partial : {false, true}) {
      Placement best;
      long scored = 0;
      double want = best_placement_exhaustive(c, partial, &best, &scored);

      PlanOptions opts;
      opts.allow_partial = partial;
      opts.gap = 0.0;
      PlacementPlan plan = plan_placement(c, opts);
      REQUIRE(plan.status == MilpStatus::kOptimal);
      CHECK(plan.objective ==
            doctest::Approx(want).epsilon(1e-6 * std::max(1.0, std::fabs(want))));
    }
  }
}

TEST_CASE("plan self-verification holds on a hand case") {
  ClusterSpec c = chain_cluster(3, 2, 900.0);
  PlanOptions opts;
  opts.gap = 0.0;
  PlacementPlan plan = plan_placement(c, opts);
  REQUIRE(plan.status == MilpStatus::kOptimal);
  CHECK(plan.objective == doctest::Approx(450.0));  // every stage runs at T_2 = 450

  // Every node must appear with a valid interval and each layer be covered.
  std::vector<int> cover(6, 0);
  for (const auto& [id, iv] : plan.placement)
    for (int l = iv.start; l < iv.end; ++l) ++cover[l];
  for (int l = 0; l < 6; ++l) CHECK(cover[l] >= 1);

  // Reported edges carry the full objective out of the coordinator.
  double out = 0;
  for (const auto& e : plan.edges)
    if (e.src == "coord") out += e.flow;
  CHECK(out == doctest::Approx(plan.objective));
}

TEST_CASE("plans serialize losslessly") {
  ClusterSpec c = chain_cluster(2, 2, 1000.0);
  PlacementPlan plan = plan_placement(c);
  std::string text = serialize_plan(plan);
  PlacementPlan back = parse_plan(text, "test");
  CHECK(back.method == plan.method);
  CHECK(back.objective == doctest::Approx(plan.objective));
  CHECK(back.allow_partial == plan.allow_partial);
  CHECK(back.placement == plan.placement);
  REQUIRE(back.edges.size() == plan.edges.size());
  for (size_t i = 0; i < plan.edges.size(); ++i) {
    CHECK(back.edges[i].src == plan.edges[i].src);
    CHECK(back.edges[i].dst == plan.edges[i].dst);
    CHECK(back.edges[i].flow == doctest::Approx(plan.edges[i].flow));
    CHECK(back.edges[i].exec_start == plan.edges[i].exec_start);
    CHECK(back.edges[i].exec_end == plan.edges[i].exec_end);
  }
  CHECK(serialize_plan(back) == text);
}

TEST_CASE("planning twice yields identical serialized plans") {
  Rng rng(4242);
  RandomClusterParams params;
  ClusterSpec c = random_cluster(rng, params);
  PlacementPlan a = plan_placement(c);
  PlacementPlan b = plan_placement(c);
  CHECK(serialize_plan(a) == serialize_plan(b));
}

TEST_CASE("link pruning hits the degree target without disconnecting") {
  // 6 nodes, full symmetric mesh (15 pairs) + coordinator links to everyone.
  ClusterSpec c;
  c.model.name = "toy";
  c.model.num_layers = 6;
  c.model.param_bytes = 6e9;
  c.coordinator_id = "coord";
  for (int i = 0; i < 6; ++i) c.nodes.push_back(make_node("n" + std::to_string(i), 3, 600.0));
  for (int i = 0; i < 6; ++i) {
    c.links.push_back(make_link("coord", "n" + std::to_string(i), 10e9));
    c.links.push_back(make_link("n" + std::to_string(i), "coord", 10e9));
  }
  int pair_rank = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      double bw = 1e8 * (1 + pair_rank++);
      c.links.push_back(make_link("n" + std::to_string(i), "n" + std::to_string(j), bw));
      c.links.push_back(make_link("n" + std::to_string(j), "n" + std::to_string(i), bw));
    }

  PruneReport report;
  ClusterSpec pruned = prune_links(c, 2.0, &report);
  // 15 pairs at degree 5 down to 6 pairs at degree 2: 9 pairs = 18 links out.
  CHECK(report.links_removed == 18);
  CHECK(report.avg_degree_before == doctest::Approx(5.0));
  CHECK(report.avg_degree_after == doctest::Approx(2.0));
  CHECK_NOTHROW(validate_cluster(pruned));

  // Coordinator links survive untouched.
  int coord_links = 0;
  for (const auto& l : pruned.links)
    if (l.src == "coord" || l.dst == "coord") ++coord_links;
  CHECK(coord_links == 12);

  // With the coordinator keeping everything connected, the survivors are
  // exactly the fastest pairs.
  double fastest_removed = 0, slowest_kept = kInf;
  std::set<std::pair<std::string, std::string>> kept;
  for (const auto& l : pruned.links) kept.insert({l.src, l.dst});
  for (const auto& l : c.links) {
    if (l.src == "coord" || l.dst == "coord") continue;
    if (kept.count({l.src, l.dst}))
      slowest_kept = std::min(slowest_kept, l.bandwidth_bps);
    else
      fastest_removed = std::max(fastest_removed, l.bandwidth_bps);
  }
  CHECK(fastest_removed < slowest_kept);

  PlacementPlan plan = plan_placement(pruned);
  CHECK(plan.objective > 0);
}

TEST_CASE("pruning respects connectivity over the degree target") {
  // n1 hangs off n0 by a single bridge link; it can never be pruned.
  ClusterSpec c;
  c.model.name = "toy";
  c.model.num_layers = 2;
  c.model.param_bytes = 2e9;
  c.coordinator_id = "coord";
  c.nodes = {make_node("n0", 2, 600.0), make_node("n1", 2, 600.0)};
  c.links = {make_link("coord", "n0", 10e9), make_link("n0", "coord", 10e9),
             make_link("n0", "n1", 1e8)};
  PruneReport report;
  ClusterSpec pruned = prune_links(c, 0.0, &report);
  CHECK(report.links_removed == 0);
  CHECK(pruned.links.size() == c.links.size());
  CHECK(!report.warnings.empty());
}
