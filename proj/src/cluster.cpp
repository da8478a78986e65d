#include "helio/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "helio/errors.hpp"
#include "json.hpp"

namespace helio {

namespace {

using json = nlohmann::ordered_json;

constexpr double kGb = 1e9;
constexpr double kMbps = 1e6;
constexpr double kGbps = 1e9;

[[noreturn]] void fail_parse(const std::string& origin, const std::string& msg) {
  throw ParseError(origin + ": " + msg);
}

void check_fields(const json& obj, const std::set<std::string>& allowed,
                  const std::string& origin, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      fail_parse(origin, "unknown field '" + it.key() + "' in " + where);
  }
}

double get_num(const json& obj, const std::string& key, const std::string& origin,
               std::optional<double> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail_parse(origin, "missing field '" + key + "'");
  }
  if (!obj[key].is_number()) fail_parse(origin, "field '" + key + "' must be a number");
  return obj[key].get<double>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& origin,
                    std::optional<std::string> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail_parse(origin, "missing field '" + key + "'");
  }
  if (!obj[key].is_string()) fail_parse(origin, "field '" + key + "' must be a string");
  return obj[key].get<std::string>();
}

}  // namespace

int ClusterSpec::node_index(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

int ClusterSpec::max_layers(const NodeSpec& n) const {
  double usable = n.vram_bytes * (1.0 - n.kv_reserve);
  int k = static_cast<int>(std::floor(usable / model.bytes_per_layer()));
  if (!n.throughput_table.empty())
    k = std::min(k, n.throughput_table.rbegin()->first);
  return std::min(k, model.num_layers);
}

double ClusterSpec::throughput(const NodeSpec& n, int j) const {
  if (j < 1 || j > max_layers(n))
    throw ValidationError("throughput request for node '" + n.id + "' outside profile range: j=" +
                          std::to_string(j));
  if (!n.throughput_table.empty()) return n.throughput_table.at(j);
  return n.peak_layer_tokens / j;
}

double ClusterSpec::layer_token_rate(const NodeSpec& n, int j) const {
  return j * throughput(n, j);
}

double ClusterSpec::nic_in(const NodeSpec& n) const {
  if (n.nic_in_bps > 0) return n.nic_in_bps;
  double best = 0;
  for (const auto& l : links)
    if (l.src == n.id || l.dst == n.id) best = std::max(best, l.bandwidth_bps);
  return best;
}

double ClusterSpec::nic_out(const NodeSpec& n) const {
  if (n.nic_out_bps > 0) return n.nic_out_bps;
  double best = 0;
  for (const auto& l : links)
    if (l.src == n.id || l.dst == n.id) best = std::max(best, l.bandwidth_bps);
  return best;
}

double link_token_capacity(const LinkSpec& link, double payload_bytes) {
  return link.bandwidth_bps / (8.0 * payload_bytes);
}

ClusterSpec parse_cluster(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail_parse(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail_parse(origin, "top level must be an object");
  check_fields(root, {"model", "coordinator", "nodes", "links"}, origin, "top level");

  ClusterSpec c;
  if (!root.contains("model") || !root["model"].is_object())
    fail_parse(origin, "missing 'model' object");
  const json& m = root["model"];
  check_fields(m,
               {"name", "num_layers", "param_gb", "token_bytes", "activation_bytes",
                "kv_bytes_per_token_layer"},
               origin, "model");
  c.model.name = get_str(m, "name", origin, std::string(""));
  c.model.num_layers = static_cast<int>(get_num(m, "num_layers", origin));
  c.model.param_bytes = get_num(m, "param_gb", origin) * kGb;
  c.model.token_bytes = get_num(m, "token_bytes", origin, 4.0);
  c.model.activation_bytes = get_num(m, "activation_bytes", origin, 16384.0);
  c.model.kv_bytes_per_token_layer = get_num(m, "kv_bytes_per_token_layer", origin, 0.0);

  if (!root.contains("coordinator") || !root["coordinator"].is_object())
    fail_parse(origin, "missing 'coordinator' object");
  check_fields(root["coordinator"], {"id"}, origin, "coordinator");
  c.coordinator_id = get_str(root["coordinator"], "id", origin);

  if (!root.contains("nodes") || !root["nodes"].is_array())
    fail_parse(origin, "missing 'nodes' array");
  for (const json& jn : root["nodes"]) {
    if (!jn.is_object()) fail_parse(origin, "node entries must be objects");
    check_fields(jn,
                 {"id", "type", "vram_gb", "kv_reserve", "peak_layer_tokens_per_s",
                  "throughput_table", "nic_in_gbps", "nic_out_gbps"},
                 origin, "node");
    NodeSpec n;
    n.id = get_str(jn, "id", origin);
    n.type = get_str(jn, "type", origin, std::string(""));
    n.vram_bytes = get_num(jn, "vram_gb", origin) * kGb;
    n.kv_reserve = get_num(jn, "kv_reserve", origin, 0.5);
    n.peak_layer_tokens = get_num(jn, "peak_layer_tokens_per_s", origin, 0.0);
    if (jn.contains("throughput_table")) {
      if (!jn["throughput_table"].is_object())
        fail_parse(origin, "throughput_table must map layer count to tokens/s");
      for (auto it = jn["throughput_table"].begin(); it != jn["throughput_table"].end(); ++it) {
        int j = 0;
        try {
          j = std::stoi(it.key());
        } catch (...) {
          fail_parse(origin, "throughput_table key '" + it.key() + "' is not an integer");
        }
        if (!it.value().is_number())
          fail_parse(origin, "throughput_table values must be numbers");
        n.throughput_table[j] = it.value().get<double>();
      }
    }
    n.nic_in_bps = get_num(jn, "nic_in_gbps", origin, 0.0) * kGbps;
    n.nic_out_bps = get_num(jn, "nic_out_gbps", origin, 0.0) * kGbps;
    c.nodes.push_back(std::move(n));
  }

  if (!root.contains("links") || !root["links"].is_array())
    fail_parse(origin, "missing 'links' array");
  for (const json& jl : root["links"]) {
    if (!jl.is_object()) fail_parse(origin, "link entries must be objects");
    check_fields(jl, {"src", "dst", "bandwidth_mbps", "latency_ms"}, origin, "link");
    LinkSpec l;
    l.src = get_str(jl, "src", origin);
    l.dst = get_str(jl, "dst", origin);
    l.bandwidth_bps = get_num(jl, "bandwidth_mbps", origin) * kMbps;
    l.latency_s = get_num(jl, "latency_ms", origin, 0.0) * 1e-3;
    c.links.push_back(std::move(l));
  }

  validate_cluster(c);
  return c;
}

ClusterSpec load_cluster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cluster(ss.str(), path);
}

std::string serialize_cluster(const ClusterSpec& c) {
  json root;
  json m;
  m["name"] = c.model.name;
  m["num_layers"] = c.model.num_layers;
  m["param_gb"] = c.model.param_bytes / kGb;
  m["token_bytes"] = c.model.token_bytes;
  m["activation_bytes"] = c.model.activation_bytes;
  m["kv_bytes_per_token_layer"] = c.model.kv_bytes_per_token_layer;
  root["model"] = m;
  root["coordinator"] = json{{"id", c.coordinator_id}};
  root["nodes"] = json::array();
  for (const auto& n : c.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["type"] = n.type;
    jn["vram_gb"] = n.vram_bytes / kGb;
    jn["kv_reserve"] = n.kv_reserve;
    jn["peak_layer_tokens_per_s"] = n.peak_layer_tokens;
    if (!n.throughput_table.empty()) {
      json t;
      for (const auto& [j, v] : n.throughput_table) t[std::to_string(j)] = v;
      jn["throughput_table"] = t;
    }
    jn["nic_in_gbps"] = n.nic_in_bps / kGbps;
    jn["nic_out_gbps"] = n.nic_out_bps / kGbps;
    root["nodes"].push_back(jn);
  }
  root["links"] = json::array();
  for (const auto& l : c.links) {
    json jl;
    jl["src"] = l.src;
    jl["dst"] = l.dst;
    jl["bandwidth_mbps"] = l.bandwidth_bps / kMbps;
    jl["latency_ms"] = l.latency_s * 1e3;
    root["links"].push_back(jl);
  }
  return root.dump(2) + "\n";
}

void save_cluster(const ClusterSpec& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << serialize_cluster(c);
}

void validate_cluster(const ClusterSpec& c) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };

  if (c.model.num_layers < 1) fail("model.num_layers must be >= 1");
  if (c.model.param_bytes <= 0) fail("model.param_gb must be > 0");
  if (c.model.token_bytes <= 0) fail("model.token_bytes must be > 0");
  if (c.model.activation_bytes <= 0) fail("model.activation_bytes must be > 0");
  if (c.model.kv_bytes_per_token_layer < 0) fail("model.kv_bytes_per_token_layer must be >= 0");
  if (c.coordinator_id.empty()) fail("coordinator.id must be non-empty");
  if (c.nodes.empty()) fail("cluster needs at least one compute node");

  std::set<std::string> ids;
  for (const auto& n : c.nodes) {
    if (n.id.empty()) fail("node id must be non-empty");
    if (n.id == c.coordinator_id) fail("node id '" + n.id + "' collides with the coordinator");
    if (!ids.insert(n.id).second) fail("duplicate node id '" + n.id + "'");
    if (n.vram_bytes <= 0) fail("node '" + n.id + "': vram_gb must be > 0");
    if (n.kv_reserve < 0 || n.kv_reserve >= 1)
      fail("node '" + n.id + "': kv_reserve must be in [0, 1)");
    bool has_peak = n.peak_layer_tokens > 0;
    bool has_table = !n.throughput_table.empty();
    if (has_peak == has_table)
      fail("node '" + n.id + "': exactly one of peak_layer_tokens_per_s or throughput_table required");
    if (has_table) {
      int expect = 1;
      double prev = 0;
      for (const auto& [j, v] : n.throughput_table) {
        if (j != expect)
          fail("node '" + n.id + "': throughput_table keys must be contiguous from 1");
        if (v <= 0) fail("node '" + n.id + "': throughput_table values must be > 0");
        if (expect > 1 && v >= prev)
          fail("node '" + n.id + "': throughput_table must be strictly decreasing");
        prev = v;
        ++expect;
      }
    }
    if (n.nic_in_bps < 0 || n.nic_out_bps < 0) fail("node '" + n.id + "': NIC rates must be >= 0");
  }

  std::set<std::pair<std::string, std::string>> pairs;
  bool coord_out = false, coord_in = false;
  for (const auto& l : c.links) {
    auto known = [&](const std::string& e) {
      return e == c.coordinator_id || c.node_index(e) >= 0;
    };
    if (!known(l.src)) fail("link endpoint '" + l.src + "' is not a declared node");
    if (!known(l.dst)) fail("link endpoint '" + l.dst + "' is not a declared node");
    if (l.src == l.dst) fail("self-link on '" + l.src + "'");
    if (!pairs.insert({l.src, l.dst}).second)
      fail("duplicate link " + l.src + " -> " + l.dst);
    if (l.bandwidth_bps <= 0) fail("link " + l.src + " -> " + l.dst + ": bandwidth must be > 0");
    if (l.latency_s < 0) fail("link " + l.src + " -> " + l.dst + ": latency must be >= 0");
    if (l.src == c.coordinator_id) coord_out = true;
    if (l.dst == c.coordinator_id) coord_in = true;
  }
  if (!coord_out) fail("coordinator has no outgoing link");
  if (!coord_in) fail("coordinator has no incoming link");

  long total_layers = 0;
  for (const auto& n : c.nodes) total_layers += c.max_layers(n);
  if (total_layers < c.model.num_layers)
    fail("insufficient VRAM: total layer capacity " + std::to_string(total_layers) +
         " < model layers " + std::to_string(c.model.num_layers));
}

}  // namespace helio
