#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helio/placement.hpp"
#include "helio/scheduler.hpp"
#include "helio/workload.hpp"

namespace helio {

struct SimConfig {
  TraceMode mode = TraceMode::kOnline;
  double horizon_s = 300;    // online: stop time; offline: safety cap
  double warmup_s = 20;      // online: excluded from every metric
  SchedPolicy policy = SchedPolicy::kIwrr;
  uint64_t seed = 1;
  int max_batch_requests = 32;
  int max_batch_tokens = 2048;      // cap on summed tokens per batch
  double retry_interval_s = 0.01;   // re-admission backoff after a deferral
  double batch_overhead_s = 0.002;  // fixed launch cost per batch
};

struct NodeStats {
  std::string id;
  double utilization = 0;   // busy fraction of the measurement window
  long batches = 0;
  double layer_tokens = 0;  // work processed (tokens x layers)
  long kv_pages = 0;        // page pool size
};

struct LinkStats {
  std::string src, dst;
  double bytes = 0;
  long transfers = 0;
  double queue_delay_mean_s = 0;
  double queue_delay_max_s = 0;
};

struct SimMetrics {
  double window_s = 0;              // measurement span
  long requests_arrived = 0;
  long requests_completed = 0;      // inside the measurement rules
  long requests_completed_total = 0;
  double throughput_tps = 0;        // pipeline tokens/s, comparable to a plan objective
  double output_tps = 0;            // generated tokens/s delivered to the coordinator
  double latency_mean_s = 0, latency_p50_s = 0, latency_p95_s = 0, latency_max_s = 0;
  double ttft_mean_s = 0, ttft_p95_s = 0;  // time to first token
  long deferrals = 0;
  std::vector<NodeStats> nodes;
  std::vector<LinkStats> links;
  std::vector<std::string> warnings;
};

// Discrete-event run of one plan + scheduler over a request trace.
SimMetrics simulate(const ClusterSpec& c, const PlacementPlan& plan,
                    const std::vector<Request>& trace, const SimConfig& cfg);

}  // namespace helio
