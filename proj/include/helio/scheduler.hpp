#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helio/placement.hpp"
#include "helio/rng.hpp"

namespace helio {

enum class SchedPolicy { kIwrr, kRandom, kSqf, kSwarm };

SchedPolicy sched_policy_from_str(const std::string& s);
std::string sched_policy_name(SchedPolicy p);

// One compute stop on a request's path; the coordinator bookends every route.
struct RouteHop {
  std::string node;
  int exec_start = 0, exec_end = 0;  // layers this node runs for the request
};

// Live load signals supplied by the simulator; absent probes read as zero.
struct SchedulerProbes {
  std::function<int(const std::string&)> queue_len;
  std::function<double(const std::string&)> inflight_tokens;
};

// Interleaved weighted round-robin over a fixed candidate list. Weight w_i
// gives candidate i one service slot in each of rounds 1..w_i; slots whose
// candidate is currently ineligible are forfeited.
class IwrrPicker {
 public:
  explicit IwrrPicker(std::vector<long> weights);
  // Next eligible candidate index, or -1 after a full cycle with none.
  int next(const std::function<bool(int)>& eligible);

 private:
  std::vector<long> weights_;
  long wmax_ = 1;
  long round_ = 1;
  size_t idx_ = 0;
};

// Turns plan flows into per-edge service weights: round(1000 * flow), then
// rescaled so the largest weight is at most 32 (and every weight at least 1)
// to keep round-robin cycles short.
std::vector<long> iwrr_weights(const std::vector<double>& flows);

// Routes requests along the plan's positive-flow edges. Admission charges an
// estimated KV footprint to every node on the route and refuses paths through
// nodes above the occupancy watermark; a request with no admissible path is
// deferred (nullopt) for the caller to retry.
class Scheduler {
 public:
  static constexpr double kWatermark = 0.9;

  Scheduler(const ClusterSpec& c, const PlacementPlan& plan, SchedPolicy policy, uint64_t seed);

  void set_probes(SchedulerProbes probes) { probes_ = std::move(probes); }

  std::optional<std::vector<RouteHop>> admit(long request_id, int input_len);
  void complete(long request_id, int output_len);

  double kv_estimate(const std::string& node) const;  // bytes charged right now
  double kv_capacity(const std::string& node) const;  // bytes free of weights
  double avg_output() const { return avg_output_; }

 private:
  struct OutEdge {
    int dst;  // vertex index (0 = coordinator)
    double flow = 0;
    int exec_start = 0, exec_end = 0;
  };

  double hop_charge(const OutEdge& e, int input_len) const;
  bool hop_eligible(const OutEdge& e, int input_len) const;
  int pick(int vertex, int input_len);

  const ClusterSpec& cluster_;
  SchedPolicy policy_;
  SchedulerProbes probes_;
  Rng rng_;

  std::vector<std::string> vertex_id_;       // [0] = coordinator
  std::map<std::string, int> vertex_of_;
  std::vector<std::vector<OutEdge>> out_;
  std::vector<IwrrPicker> picker_;
  std::vector<double> kv_cap_;               // per vertex, 0 for coordinator
  std::vector<double> kv_est_;
  std::vector<double> swarm_rate_;           // layer-token rate at held count

  std::map<long, std::vector<std::pair<int, double>>> charges_;
  double avg_output_;
  long output_samples_ = 1;
};

}  // namespace helio
