#include "helio/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helio/errors.hpp"
#include "helio/lp.hpp"

namespace helio {

HeuristicResult swarm_placement(const ClusterSpec& c) {
  HeuristicResult out;
  const int L = c.model.num_layers;

  std::vector<int> kept;
  int k_min = L + 1;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    int k = c.max_layers(c.nodes[i]);
    if (k < 1) {
      out.warnings.push_back("swarm: node '" + c.nodes[i].id + "' cannot hold a layer; dropped");
      continue;
    }
    kept.push_back(static_cast<int>(i));
    k_min = std::min(k_min, k);
  }
  if (kept.empty()) {
    out.warnings.push_back("swarm: no usable nodes");
    return out;
  }

  int stages = (L + k_min - 1) / k_min;
  int size = (L + stages - 1) / stages;
  if (stages > static_cast<int>(kept.size()))
    out.warnings.push_back("swarm: fewer nodes than stages; pipeline has gaps");

  // Largest capacity first, each onto the currently lightest stage.
  std::vector<int> order = kept;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return c.throughput(c.nodes[a], 1) > c.throughput(c.nodes[b], 1);
  });
  std::vector<double> totals(stages, 0.0);
  for (int i : order) {
    int g = 0;
    for (int s = 1; s < stages; ++s)
      if (totals[s] < totals[g]) g = s;
    int start = g * size;
    int end = std::min(start + size, L);
    out.placement[c.nodes[i].id] = {start, end};
    totals[g] += c.throughput(c.nodes[i], 1);
  }
  return out;
}

HeuristicResult petals_placement(const ClusterSpec& c) {
  HeuristicResult out;
  const int L = c.model.num_layers;
  std::vector<double> served(L, 0.0);

  for (const NodeSpec& n : c.nodes) {
    int w = std::min(c.max_layers(n), L);
    if (w < 1) {
      out.warnings.push_back("petals: node '" + n.id + "' cannot hold a layer; skipped");
      continue;
    }
    int best_s = 0;
    double best_load = kInf;
    for (int s = 0; s + w <= L; ++s) {
      double load = std::accumulate(served.begin() + s, served.begin() + s + w, 0.0);
      if (load < best_load - 1e-12) {
        best_load = load;
        best_s = s;
      }
    }
    out.placement[n.id] = {best_s, best_s + w};
    double rate = c.throughput(n, w);
    for (int l = best_s; l < best_s + w; ++l) served[l] += rate;
  }
  return out;
}

HeuristicResult separate_pipelines_placement(const ClusterSpec& c) {
  HeuristicResult out;
  const int L = c.model.num_layers;

  std::vector<std::string> type_order;
  std::map<std::string, std::vector<int>> groups;
  for (size_t i = 0; i < c.nodes.size(); ++i) {
    if (c.nodes[i].type.empty())
      throw ValidationError("separate-pipelines requires a type label on node '" +
                            c.nodes[i].id + "'");
    if (!groups.count(c.nodes[i].type)) type_order.push_back(c.nodes[i].type);
    groups[c.nodes[i].type].push_back(static_cast<int>(i));
  }

  bool any = false;
  for (const std::string& t : type_order) {
    const std::vector<int>& members = groups[t];
    long cap = 0;
    for (int i : members) cap += c.max_layers(c.nodes[i]);
    if (cap < L) {
      out.warnings.push_back("separate-pipelines: type '" + t + "' cannot hold the model; unused");
      continue;
    }
    int n_use = std::min<int>(static_cast<int>(members.size()), L);
    int base = L / n_use, extra = L % n_use;
    bool fits = true;
    int off = 0;
    std::vector<std::pair<int, Interval>> stage_plan;
    for (int idx = 0; idx < n_use; ++idx) {
      int sz = base + (idx < extra ? 1 : 0);
      if (sz > c.max_layers(c.nodes[members[idx]])) {
        fits = false;
        break;
      }
      stage_plan.push_back({members[idx], {off, off + sz}});
      off += sz;
    }
    if (!fits) {
      out.warnings.push_back("separate-pipelines: type '" + t +
                             "' cannot hold an even pipeline; unused");
      continue;
    }
    if (n_use < static_cast<int>(members.size()))
      out.warnings.push_back("separate-pipelines: type '" + t + "' has idle nodes");
    for (auto& [i, iv] : stage_plan) out.placement[c.nodes[i].id] = iv;
    any = true;
  }
  if (!any) out.warnings.push_back("separate-pipelines: no type can serve the model");
  return out;
}

}  // namespace helio
