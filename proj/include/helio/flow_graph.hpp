#pragma once

#include <map>
#include <string>
#include <vector>

#include "helio/cluster.hpp"

namespace helio {

struct Interval {
  int start = 0, end = 0;  // layers [start, end)
  int len() const { return end - start; }
  bool empty() const { return end <= start; }
  bool operator==(const Interval&) const = default;
};

// Per-node layer assignment; nodes absent from the map hold nothing.
using Placement = std::map<std::string, Interval>;

enum class EdgeKind { kCompute, kCoordOut, kCoordIn, kInterconnect };

struct FlowEdge {
  int u = 0, v = 0;
  double cap = 0;
  double flow = 0;
  EdgeKind kind = EdgeKind::kCompute;
  std::string src_id, dst_id;    // owning node / link endpoints ("" for virtual)
  int exec_start = 0, exec_end = 0;  // layers the receiving node runs for this edge
};

struct FlowGraph {
  int num_vertices = 0;
  int source = 0, sink = 1;
  std::vector<FlowEdge> edges;
  std::vector<std::string> vertex_names;
  // node id -> (entry vertex, exit vertex); only nodes with non-empty intervals
  std::map<std::string, std::pair<int, int>> node_vertices;
};

// Graph abstraction of one placement: each used node splits into entry/exit
// vertices joined by a compute edge; the coordinator doubles as source and sink.
FlowGraph build_flow_graph(const ClusterSpec& c, const Placement& p, bool allow_partial);

// Preflow-push (FIFO selection + gap relabeling). Fills edge flows; returns value.
double max_flow(FlowGraph& g);

// Source side of a minimum cut; call after max_flow.
std::vector<int> min_cut_source_side(const FlowGraph& g);

std::string to_dot(const FlowGraph& g);

// Capacity of the compute edge for a node holding j layers: compute rate
// clamped by what the NIC could move (activation payloads, the worst case).
double compute_edge_capacity(const ClusterSpec& c, const NodeSpec& n, int j);

}  // namespace helio
