#include <string>

#include "doctest.h"
#include "helio/cluster.hpp"
#include "helio/errors.hpp"

using namespace helio;

namespace {

std::string tiny_json() {
  return R"({
    "model": {"name": "m", "num_layers": 4, "param_gb": 4},
    "coordinator": {"id": "coord"},
    "nodes": [
      {"id": "a", "vram_gb": 9, "peak_layer_tokens_per_s": 1000},
      {"id": "b", "vram_gb": 5, "peak_layer_tokens_per_s": 500}
    ],
    "links": [
      {"src": "coord", "dst": "a", "bandwidth_mbps": 1000, "latency_ms": 1},
      {"src": "a", "dst": "b", "bandwidth_mbps": 1000, "latency_ms": 1},
      {"src": "b", "dst": "coord", "bandwidth_mbps": 1000, "latency_ms": 1}
    ]
  })";
}

}  // namespace

TEST_CASE("cluster parse applies defaults") {
  ClusterSpec c = parse_cluster(tiny_json(), "test");
  CHECK(c.model.token_bytes == 4.0);
  CHECK(c.model.activation_bytes == 16384.0);
  CHECK(c.model.kv_token_layer_bytes() == doctest::Approx(2 * 16384.0));
  CHECK(c.model.bytes_per_layer() == doctest::Approx(1e9));
  CHECK(c.nodes[0].kv_reserve == 0.5);
  // vram 9 GB, half reserved for KV, 1 GB per layer -> 4, capped by L = 4.
  CHECK(c.max_layers(c.nodes[0]) == 4);
  CHECK(c.max_layers(c.nodes[1]) == 2);
}

TEST_CASE("cluster serialize round-trips") {
  ClusterSpec c = parse_cluster(tiny_json(), "test");
  ClusterSpec c2 = parse_cluster(serialize_cluster(c), "round");
  CHECK(serialize_cluster(c) == serialize_cluster(c2));
}

TEST_CASE("cluster rejects unknown fields") {
  std::string text = tiny_json();
  text.replace(text.find("\"name\""), 6, "\"nam3\"");
  CHECK_THROWS_AS(parse_cluster(text, "test"), ParseError);
}

TEST_CASE("analytic throughput profile") {
  ClusterSpec c = parse_cluster(tiny_json(), "test");
  CHECK(c.throughput(c.nodes[0], 1) == doctest::Approx(1000));
  CHECK(c.throughput(c.nodes[0], 4) == doctest::Approx(250));
  CHECK(c.layer_token_rate(c.nodes[0], 4) == doctest::Approx(1000));
  CHECK_THROWS_AS(c.throughput(c.nodes[0], 5), ValidationError);
  CHECK_THROWS_AS(c.throughput(c.nodes[0], 0), ValidationError);
}

TEST_CASE("throughput table overrides and caps layer count") {
  std::string text = R"({
    "model": {"num_layers": 6, "param_gb": 6},
    "coordinator": {"id": "c"},
    "nodes": [
      {"id": "a", "vram_gb": 13, "throughput_table": {"1": 900, "2": 500, "3": 350}},
      {"id": "b", "vram_gb": 13, "peak_layer_tokens_per_s": 600}
    ],
    "links": [
      {"src": "c", "dst": "a", "bandwidth_mbps": 1000},
      {"src": "a", "dst": "b", "bandwidth_mbps": 1000},
      {"src": "b", "dst": "c", "bandwidth_mbps": 1000}
    ]
  })";
  ClusterSpec c = parse_cluster(text, "test");
  CHECK(c.max_layers(c.nodes[0]) == 3);  // table ends at 3 despite 6 layers of VRAM
  CHECK(c.max_layers(c.nodes[1]) == 6);
  CHECK(c.throughput(c.nodes[0], 2) == doctest::Approx(500));
  CHECK(c.layer_token_rate(c.nodes[0], 3) == doctest::Approx(1050));
}

TEST_CASE("table validation") {
  auto cluster_with_table = [](const std::string& table) {
    return R"({
      "model": {"num_layers": 2, "param_gb": 2},
      "coordinator": {"id": "c"},
      "nodes": [{"id": "a", "vram_gb": 9, "throughput_table": )" +
           table + R"(}],
      "links": [
        {"src": "c", "dst": "a", "bandwidth_mbps": 100},
        {"src": "a", "dst": "c", "bandwidth_mbps": 100}
      ]
    })";
  };
  CHECK_THROWS_AS(parse_cluster(cluster_with_table(R"({"2": 100})"), "t"), ValidationError);
  CHECK_THROWS_AS(parse_cluster(cluster_with_table(R"({"1": 100, "2": 100})"), "t"),
                  ValidationError);
  CHECK_THROWS_AS(parse_cluster(cluster_with_table(R"({"1": 100, "2": -5})"), "t"),
                  ValidationError);
  CHECK_NOTHROW(parse_cluster(cluster_with_table(R"({"1": 100, "2": 60})"), "t"));
}

TEST_CASE("nic defaults to the fastest incident link") {
  ClusterSpec c = parse_cluster(tiny_json(), "test");
  CHECK(c.nic_in(c.nodes[0]) == doctest::Approx(1000e6));
  c.nodes[0].nic_in_bps = 5e6;
  CHECK(c.nic_in(c.nodes[0]) == doctest::Approx(5e6));
}

TEST_CASE("link token capacity") {
  LinkSpec l;
  l.bandwidth_bps = 100e6;
  CHECK(link_token_capacity(l, 16384) == doctest::Approx(100e6 / (8 * 16384.0)));
  CHECK(link_token_capacity(l, 4) == doctest::Approx(3.125e6));
}

TEST_CASE("validation failures name the problem") {
  ClusterSpec c = parse_cluster(tiny_json(), "test");

  ClusterSpec dup = c;
  dup.nodes.push_back(dup.nodes[0]);
  CHECK_THROWS_WITH_AS(validate_cluster(dup), "duplicate node id 'a'", ValidationError);

  ClusterSpec self = c;
  LinkSpec loop;
  loop.src = loop.dst = "a";
  loop.bandwidth_bps = 1e6;
  self.links.push_back(loop);
  CHECK_THROWS_WITH_AS(validate_cluster(self), "self-link on 'a'", ValidationError);

  ClusterSpec nocoord = c;
  nocoord.links.erase(nocoord.links.begin());  // removes coord -> a
  CHECK_THROWS_WITH_AS(validate_cluster(nocoord), "coordinator has no outgoing link",
                       ValidationError);

  ClusterSpec small = c;
  small.model.param_bytes = 40e9;  // 10 GB per layer, nothing fits
  CHECK_THROWS_AS(validate_cluster(small), ValidationError);

  ClusterSpec both = c;
  both.nodes[0].throughput_table[1] = 10;
  CHECK_THROWS_AS(validate_cluster(both), ValidationError);
}
