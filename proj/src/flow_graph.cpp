#include "helio/flow_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "helio/errors.hpp"

namespace helio {

namespace {

constexpr double kFlowEps = 1e-12;

// Residual arc pair built over FlowGraph edges.
struct Arc {
  int to;
  double cap;
  int rev;      // index of reverse arc in adj[to]
  int edge_id;  // owning FlowGraph edge, -1 for reverse arcs
};

void add_merged_edge(FlowGraph& g, std::map<std::pair<int, int>, int>& dedup, FlowEdge e) {
  auto key = std::make_pair(e.u, e.v);
  auto it = dedup.find(key);
  if (it != dedup.end()) {
    g.edges[it->second].cap += e.cap;  // parallel edges merge by capacity sum
    return;
  }
  dedup[key] = static_cast<int>(g.edges.size());
  g.edges.push_back(std::move(e));
}

}  // namespace

double compute_edge_capacity(const ClusterSpec& c, const NodeSpec& n, int j) {
  double rate = c.throughput(n, j);
  double act = c.model.activation_bytes;
  double nic_rate = std::min(c.nic_in(n), c.nic_out(n)) / (8.0 * act);
  return std::min(rate, nic_rate);
}

FlowGraph build_flow_graph(const ClusterSpec& c, const Placement& p, bool allow_partial) {
  FlowGraph g;
  g.vertex_names = {"source", "sink"};
  g.num_vertices = 2;

  const int L = c.model.num_layers;
  std::map<std::string, Interval> used;
  for (const auto& [id, iv] : p) {
    if (iv.empty()) continue;
    int idx = c.node_index(id);
    if (idx < 0) throw ValidationError("placement references unknown node '" + id + "'");
    if (iv.start < 0 || iv.end > L)
      throw ValidationError("placement for '" + id + "' outside [0, " + std::to_string(L) + ")");
    if (iv.len() > c.max_layers(c.nodes[idx]))
      throw ValidationError("placement for '" + id + "' exceeds its VRAM layer capacity");
    used[id] = iv;
  }

  for (const auto& [id, iv] : used) {
    int in_v = g.num_vertices++;
    int out_v = g.num_vertices++;
    g.vertex_names.push_back("in:" + id);
    g.vertex_names.push_back("out:" + id);
    g.node_vertices[id] = {in_v, out_v};
  }

  std::map<std::pair<int, int>, int> dedup;
  for (const auto& [id, iv] : used) {
    auto [in_v, out_v] = g.node_vertices[id];
    const NodeSpec& n = c.nodes[c.node_index(id)];
    FlowEdge e;
    e.u = in_v;
    e.v = out_v;
    e.cap = compute_edge_capacity(c, n, iv.len());
    e.kind = EdgeKind::kCompute;
    e.src_id = e.dst_id = id;
    e.exec_start = iv.start;
    e.exec_end = iv.end;
    add_merged_edge(g, dedup, e);
  }

  for (const auto& l : c.links) {
    bool src_coord = (l.src == c.coordinator_id);
    bool dst_coord = (l.dst == c.coordinator_id);
    if (src_coord) {
      auto it = used.find(l.dst);
      if (it == used.end() || it->second.start != 0) continue;
      FlowEdge e;
      e.u = g.source;
      e.v = g.node_vertices[l.dst].first;
      e.cap = link_token_capacity(l, c.model.token_bytes);
      e.kind = EdgeKind::kCoordOut;
      e.src_id = l.src;
      e.dst_id = l.dst;
      e.exec_start = 0;
      e.exec_end = it->second.end;
      add_merged_edge(g, dedup, e);
    } else if (dst_coord) {
      auto it = used.find(l.src);
      if (it == used.end() || it->second.end != L) continue;
      FlowEdge e;
      e.u = g.node_vertices[l.src].second;
      e.v = g.sink;
      e.cap = link_token_capacity(l, c.model.token_bytes);
      e.kind = EdgeKind::kCoordIn;
      e.src_id = l.src;
      e.dst_id = l.dst;
      e.exec_start = L;
      e.exec_end = L;
      add_merged_edge(g, dedup, e);
    } else {
      auto si = used.find(l.src);
      auto di = used.find(l.dst);
      if (si == used.end() || di == used.end()) continue;
      const Interval& a = si->second;
      const Interval& b = di->second;
      bool valid = allow_partial ? (b.start <= a.end && a.end < b.end) : (a.end == b.start);
      if (!valid) continue;
      FlowEdge e;
      e.u = g.node_vertices[l.src].second;
      e.v = g.node_vertices[l.dst].first;
      e.cap = link_token_capacity(l, c.model.activation_bytes);
      e.kind = EdgeKind::kInterconnect;
      e.src_id = l.src;
      e.dst_id = l.dst;
      e.exec_start = a.end;  // partial inference: skip layers the sender covered
      e.exec_end = b.end;
      add_merged_edge(g, dedup, e);
    }
  }
  return g;
}

double max_flow(FlowGraph& g) {
  const int n = g.num_vertices;
  std::vector<std::vector<Arc>> adj(n);
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const FlowEdge& e = g.edges[i];
    adj[e.u].push_back({e.v, e.cap, static_cast<int>(adj[e.v].size()), static_cast<int>(i)});
    adj[e.v].push_back({e.u, 0.0, static_cast<int>(adj[e.u].size()) - 1, -1});
  }

  std::vector<double> excess(n, 0.0);
  std::vector<int> height(n, 0), count(2 * n + 1, 0), current(n, 0);
  std::deque<int> active;
  std::vector<char> in_queue(n, 0);

  height[g.source] = n;
  count[0] = n - 1;
  count[n] = 1;

  auto push = [&](int u, Arc& a) {
    double amt = std::min(excess[u], a.cap);
    a.cap -= amt;
    adj[a.to][a.rev].cap += amt;
    excess[u] -= amt;
    excess[a.to] += amt;
    if (a.to != g.source && a.to != g.sink && !in_queue[a.to]) {
      active.push_back(a.to);
      in_queue[a.to] = 1;
    }
  };

  for (Arc& a : adj[g.source]) {
    if (a.cap > kFlowEps) {
      excess[g.source] += a.cap;
      push(g.source, a);
    }
  }

  while (!active.empty()) {
    int u = active.front();
    active.pop_front();
    in_queue[u] = 0;
    while (excess[u] > kFlowEps) {
      if (current[u] == static_cast<int>(adj[u].size())) {
        // Relabel; gap heuristic lifts stranded vertices past n.
        int old = height[u];
        int best = 2 * n;
        for (const Arc& a : adj[u])
          if (a.cap > kFlowEps) best = std::min(best, height[a.to] + 1);
        height[u] = best;
        current[u] = 0;
        count[old]--;
        count[best]++;
        if (old < n && count[old] == 0) {
          for (int v = 0; v < n; ++v) {
            if (v != g.source && height[v] > old && height[v] < n) {
              count[height[v]]--;
              height[v] = n + 1;
              count[height[v]]++;
            }
          }
        }
        if (best >= 2 * n) break;
      } else {
        Arc& a = adj[u][current[u]];
        if (a.cap > kFlowEps && height[u] == height[a.to] + 1)
          push(u, a);
        else
          ++current[u];
      }
    }
  }

  // Recover per-edge flow from residual capacities.
  std::vector<int> cursor(n, 0);
  double value = 0;
  for (int u = 0; u < n; ++u) {
    for (const Arc& a : adj[u]) {
      if (a.edge_id >= 0) {
        FlowEdge& e = g.edges[a.edge_id];
        e.flow = e.cap - a.cap;
        if (e.flow < kFlowEps) e.flow = 0;
      }
    }
  }
  // Net flow into the sink; immune to circulations through the source on
  // graphs that have edges pointing back at it.
  for (const FlowEdge& e : g.edges) {
    if (e.v == g.sink) value += e.flow;
    if (e.u == g.sink) value -= e.flow;
  }
  return value;
}

std::vector<int> min_cut_source_side(const FlowGraph& g) {
  const int n = g.num_vertices;
  std::vector<std::vector<std::pair<int, double>>> res(n);
  for (const FlowEdge& e : g.edges) {
    res[e.u].push_back({e.v, e.cap - e.flow});
    res[e.v].push_back({e.u, e.flow});
  }
  std::vector<char> seen(n, 0);
  std::deque<int> q{g.source};
  seen[g.source] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (auto [v, r] : res[u]) {
      if (r > kFlowEps && !seen[v]) {
        seen[v] = 1;
        q.push_back(v);
      }
    }
  }
  std::vector<int> side;
  for (int v = 0; v < n; ++v)
    if (seen[v]) side.push_back(v);
  return side;
}

std::string to_dot(const FlowGraph& g) {
  std::ostringstream os;
  os << "digraph flow {\n  rankdir=LR;\n";
  for (int v = 0; v < g.num_vertices; ++v)
    os << "  v" << v << " [label=\"" << g.vertex_names[v] << "\"];\n";
  os.setf(std::ios::fixed);
  os.precision(3);
  for (const FlowEdge& e : g.edges) {
    os << "  v" << e.u << " -> v" << e.v << " [label=\"" << e.flow << "/" << e.cap;
    if (e.kind == EdgeKind::kCompute) os << " [" << e.exec_start << "," << e.exec_end << ")";
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace helio
