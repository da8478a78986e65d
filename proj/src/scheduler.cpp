#include "helio/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "helio/errors.hpp"

namespace helio {

SchedPolicy sched_policy_from_str(const std::string& s) {
  if (s == "iwrr") return SchedPolicy::kIwrr;
  if (s == "random") return SchedPolicy::kRandom;
  if (s == "sqf") return SchedPolicy::kSqf;
  if (s == "swarm") return SchedPolicy::kSwarm;
  throw ValidationError("unknown scheduler policy '" + s +
                        "' (expected iwrr, random, sqf, or swarm)");
}

std::string sched_policy_name(SchedPolicy p) {
  switch (p) {
    case SchedPolicy::kIwrr: return "iwrr";
    case SchedPolicy::kRandom: return "random";
    case SchedPolicy::kSqf: return "sqf";
    default: return "swarm";
  }
}

IwrrPicker::IwrrPicker(std::vector<long> weights) : weights_(std::move(weights)) {
  for (long w : weights_) wmax_ = std::max(wmax_, w);
}

int IwrrPicker::next(const std::function<bool(int)>& eligible) {
  if (weights_.empty()) return -1;
  long positions = wmax_ * static_cast<long>(weights_.size());
  for (long it = 0; it < positions; ++it) {
    if (idx_ == weights_.size()) {
      idx_ = 0;
      round_ = round_ == wmax_ ? 1 : round_ + 1;
    }
    size_t i = idx_++;
    if (weights_[i] >= round_ && eligible(static_cast<int>(i))) return static_cast<int>(i);
  }
  return -1;
}

std::vector<long> iwrr_weights(const std::vector<double>& flows) {
  std::vector<long> w(flows.size());
  long wmax = 0;
  for (size_t i = 0; i < flows.size(); ++i) {
    w[i] = std::max<long>(1, std::llround(1000.0 * flows[i]));
    wmax = std::max(wmax, w[i]);
  }
  if (wmax > 32)
    for (long& wi : w) wi = std::max<long>(1, std::llround(wi * 32.0 / wmax));
  return w;
}

Scheduler::Scheduler(const ClusterSpec& c, const PlacementPlan& plan, SchedPolicy policy,
                     uint64_t seed)
    : cluster_(c), policy_(policy), rng_(seed), avg_output_(232.0) {
  if (plan.edges.empty()) throw ValidationError("plan has no flow edges to schedule on");

  vertex_id_.push_back(c.coordinator_id);
  vertex_of_[c.coordinator_id] = 0;
  for (const auto& [id, iv] : plan.placement) {
    if (iv.empty()) continue;
    vertex_of_[id] = static_cast<int>(vertex_id_.size());
    vertex_id_.push_back(id);
  }

  out_.resize(vertex_id_.size());
  kv_cap_.assign(vertex_id_.size(), 0.0);
  kv_est_.assign(vertex_id_.size(), 0.0);
  swarm_rate_.assign(vertex_id_.size(), 1.0);
  for (size_t v = 1; v < vertex_id_.size(); ++v) {
    int ni = c.node_index(vertex_id_[v]);
    if (ni < 0) throw ValidationError("plan references unknown node '" + vertex_id_[v] + "'");
    const NodeSpec& n = c.nodes[ni];
    int held = plan.placement.at(vertex_id_[v]).len();
    kv_cap_[v] = std::max(0.0, n.vram_bytes - held * c.model.bytes_per_layer());
    swarm_rate_[v] = c.layer_token_rate(n, held);
  }

  for (const PlanEdge& e : plan.edges) {
    auto si = vertex_of_.find(e.src);
    auto di = vertex_of_.find(e.dst);
    if (si == vertex_of_.end() || di == vertex_of_.end())
      throw ValidationError("plan edge " + e.src + "->" + e.dst + " references an unplaced node");
    out_[si->second].push_back({di->second, e.flow, e.exec_start, e.exec_end});
  }
  if (out_[0].empty()) throw ValidationError("plan has no edge leaving the coordinator");

  for (const std::vector<OutEdge>& edges : out_) {
    std::vector<double> flows;
    for (const OutEdge& e : edges) flows.push_back(e.flow);
    picker_.emplace_back(iwrr_weights(flows));
  }
}

double Scheduler::hop_charge(const OutEdge& e, int input_len) const {
  double tokens = input_len + avg_output_;
  return tokens * cluster_.model.kv_token_layer_bytes() * (e.exec_end - e.exec_start);
}

bool Scheduler::hop_eligible(const OutEdge& e, int input_len) const {
  if (e.dst == 0) return true;  // coordinator never masks
  return kv_est_[e.dst] + hop_charge(e, input_len) <= kWatermark * kv_cap_[e.dst];
}

int Scheduler::pick(int vertex, int input_len) {
  const std::vector<OutEdge>& edges = out_[vertex];
  auto ok = [&](int i) { return hop_eligible(edges[i], input_len); };

  switch (policy_) {
    case SchedPolicy::kIwrr:
      return picker_[vertex].next(ok);
    case SchedPolicy::kRandom: {
      std::vector<int> elig;
      for (size_t i = 0; i < edges.size(); ++i)
        if (ok(static_cast<int>(i))) elig.push_back(static_cast<int>(i));
      if (elig.empty()) return -1;
      return elig[rng_.uniform_int(elig.size())];
    }
    case SchedPolicy::kSqf: {
      int best = -1;
      double best_q = 0;
      for (size_t i = 0; i < edges.size(); ++i) {
        if (!ok(static_cast<int>(i))) continue;
        double q = edges[i].dst == 0 || !probes_.queue_len
                       ? 0
                       : probes_.queue_len(vertex_id_[edges[i].dst]);
        if (best < 0 || q < best_q) {
          best = static_cast<int>(i);
          best_q = q;
        }
      }
      return best;
    }
    default: {  // kSwarm: least normalized in-flight load
      int best = -1;
      double best_load = 0;
      for (size_t i = 0; i < edges.size(); ++i) {
        if (!ok(static_cast<int>(i))) continue;
        double load = 0;
        if (edges[i].dst != 0 && probes_.inflight_tokens)
          load = probes_.inflight_tokens(vertex_id_[edges[i].dst]) / swarm_rate_[edges[i].dst];
        if (best < 0 || load < best_load) {
          best = static_cast<int>(i);
          best_load = load;
        }
      }
      return best;
    }
  }
}

std::optional<std::vector<RouteHop>> Scheduler::admit(long request_id, int input_len) {
  std::vector<RouteHop> hops;
  std::vector<std::pair<int, double>> charged;
  int v = 0;
  int covered = 0;
  const int L = cluster_.model.num_layers;
  while (covered < L) {
    int pickd = pick(v, input_len);
    if (pickd < 0) {
      for (const auto& [vi, bytes] : charged) kv_est_[vi] -= bytes;
      return std::nullopt;
    }
    const OutEdge& e = out_[v][pickd];
    if (e.dst == 0 || e.exec_start != covered)
      throw InternalError("plan edges do not tile the layer range at '" + vertex_id_[v] + "'");
    double bytes = hop_charge(e, input_len);
    kv_est_[e.dst] += bytes;
    charged.push_back({e.dst, bytes});
    hops.push_back({vertex_id_[e.dst], e.exec_start, e.exec_end});
    covered = e.exec_end;
    v = e.dst;
  }
  charges_[request_id] = std::move(charged);
  return hops;
}

void Scheduler::complete(long request_id, int output_len) {
  auto it = charges_.find(request_id);
  if (it == charges_.end()) throw InternalError("completing a request that was never admitted");
  for (const auto& [vi, bytes] : it->second) kv_est_[vi] -= bytes;
  charges_.erase(it);
  ++output_samples_;
  avg_output_ += (output_len - avg_output_) / static_cast<double>(output_samples_);
}

double Scheduler::kv_estimate(const std::string& node) const {
  auto it = vertex_of_.find(node);
  return it == vertex_of_.end() ? 0.0 : kv_est_[it->second];
}

double Scheduler::kv_capacity(const std::string& node) const {
  auto it = vertex_of_.find(node);
  return it == vertex_of_.end() ? 0.0 : kv_cap_[it->second];
}

}  // namespace helio
