#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace helio {

struct ModelSpec {
  std::string name;
  int num_layers = 0;                  // L
  double param_bytes = 0;              // total parameter bytes
  double token_bytes = 4;              // wire bytes per token id
  double activation_bytes = 16384;     // per-token activation between stages
  double kv_bytes_per_token_layer = 0; // 0 -> default 2 * activation_bytes

  double bytes_per_layer() const { return param_bytes / num_layers; }
  double kv_token_layer_bytes() const {
    return kv_bytes_per_token_layer > 0 ? kv_bytes_per_token_layer : 2.0 * activation_bytes;
  }
};

struct NodeSpec {
  std::string id;
  std::string type;                    // device class label (heuristic grouping)
  double vram_bytes = 0;
  double kv_reserve = 0.5;             // VRAM fraction withheld for KV cache
  double peak_layer_tokens = 0;        // K: layer-tokens/s; T_j = K/j by default
  std::map<int, double> throughput_table;  // explicit T_j override
  double nic_in_bps = 0;               // 0 -> max incident link bandwidth
  double nic_out_bps = 0;
};

struct LinkSpec {
  std::string src, dst;                // node ids or the coordinator id
  double bandwidth_bps = 0;
  double latency_s = 0;
};

struct ClusterSpec {
  ModelSpec model;
  std::string coordinator_id;
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;

  int node_index(const std::string& id) const;  // -1 if absent
  const NodeSpec& node(int i) const { return nodes[i]; }

  // k_i: layers that fit beside the KV reservation.
  int max_layers(const NodeSpec& n) const;
  // T_j for 1 <= j <= k_i; throws ValidationError outside the profile range.
  double throughput(const NodeSpec& n, int j) const;
  // Layer-token rate while holding j layers (j * T_j).
  double layer_token_rate(const NodeSpec& n, int j) const;
  double nic_in(const NodeSpec& n) const;
  double nic_out(const NodeSpec& n) const;
};

// Tokens/s a link sustains for a given per-token payload.
double link_token_capacity(const LinkSpec& link, double payload_bytes);

ClusterSpec parse_cluster(const std::string& text, const std::string& origin);
ClusterSpec load_cluster(const std::string& path);
std::string serialize_cluster(const ClusterSpec& c);
void save_cluster(const ClusterSpec& c, const std::string& path);

// Throws ValidationError naming the first violated invariant.
void validate_cluster(const ClusterSpec& c);

}  // namespace helio
