#include "helio/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <queue>

#include "helio/errors.hpp"
#include "helio/log.hpp"

namespace helio {

namespace {

constexpr int kPageTokens = 16;  // KV pages cover 16 tokens of one layer

struct WorkItem {
  long req = -1;
  int hop = 0;       // index into the request's route
  int tokens = 0;    // tokens to process in this step
  int kv_tokens = 0; // tokens resident in KV once the step lands
};

struct ReqRt {
  std::vector<RouteHop> route;
  std::vector<long> pages;  // reserved per hop, freed at completion
  int generated = 0;
  double first_token_s = -1, done_s = -1;
  long defers = 0;
};

struct NodeRt {
  int spec = -1;  // cluster node index
  double rate = 1;
  long pool = 0, free_pages = 0;
  std::deque<WorkItem> queue;
  std::vector<WorkItem> batch;
  bool busy = false;
  double batch_start = 0, batch_end = 0;
  double busy_total = 0, busy_win = 0;
  long batches = 0;
  double layer_tokens = 0;
};

struct LinkRt {
  double busy_until = 0;
  double bytes = 0;
  long transfers = 0;
  double qd_sum = 0, qd_max = 0;
};

// Tie order: arrivals, then batch completions, then transfers, then retries,
// then insertion order, so identical runs replay identically.
struct Ev {
  double t = 0;
  int kind = 0;  // 0 arrival, 1 batch-done, 2 transfer-done, 3 admission-retry
  long seq = 0;
  long req = -1;
  int a = 0, b = 0, c = 0;  // transfer: a = hop (-1 coordinator), b = tokens, c = kv
};

struct EvAfter {
  bool operator()(const Ev& x, const Ev& y) const {
    if (x.t != y.t) return x.t > y.t;
    if (x.kind != y.kind) return x.kind > y.kind;
    return x.seq > y.seq;
  }
};

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  size_t rank = static_cast<size_t>(std::ceil(q * sorted.size()));
  return sorted[std::min(sorted.size() - 1, rank == 0 ? 0 : rank - 1)];
}

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

class Engine {
 public:
  Engine(const ClusterSpec& c, const PlacementPlan& plan, const std::vector<Request>& trace,
         const SimConfig& cfg)
      : c_(c), trace_(trace), cfg_(cfg), sched_(c, plan, cfg.policy, cfg.seed) {
    SchedulerProbes probes;
    probes.queue_len = [this](const std::string& id) {
      const NodeRt& n = nodes_[node_of_.at(id)];
      return static_cast<int>(n.queue.size() + n.batch.size());
    };
    probes.inflight_tokens = [this](const std::string& id) {
      const NodeRt& n = nodes_[node_of_.at(id)];
      double tok = 0;
      for (const WorkItem& it : n.queue) tok += it.tokens;
      for (const WorkItem& it : n.batch) tok += it.tokens;
      return tok;
    };
    sched_.set_probes(std::move(probes));

    double page_bytes = kPageTokens * c.model.kv_token_layer_bytes();
    for (const auto& [id, iv] : plan.placement) {
      if (iv.empty()) continue;
      NodeRt rt;
      rt.spec = c.node_index(id);
      const NodeSpec& n = c.nodes[rt.spec];
      rt.rate = c.layer_token_rate(n, iv.len());
      rt.pool = static_cast<long>(
          std::floor((n.vram_bytes - iv.len() * c.model.bytes_per_layer()) / page_bytes));
      rt.free_pages = rt.pool;
      if (rt.pool <= 0)
        metrics_.warnings.push_back("node '" + id + "' has no KV pages left after weights");
      node_of_[id] = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(rt));
    }
    links_.resize(c.links.size());
    for (size_t i = 0; i < c.links.size(); ++i)
      link_of_[{c.links[i].src, c.links[i].dst}] = static_cast<int>(i);
  }

  SimMetrics run() {
    reqs_.resize(trace_.size());
    for (size_t i = 0; i < trace_.size(); ++i) {
      double at = cfg_.mode == TraceMode::kOnline ? trace_[i].arrival_s : 0.0;
      if (cfg_.mode == TraceMode::kOnline && at > cfg_.horizon_s) continue;
      push(at, 0, static_cast<long>(i), 0, 0, 0);
      ++metrics_.requests_arrived;
    }

    bool hit_cap = false;
    while (!pq_.empty()) {
      Ev ev = pq_.top();
      pq_.pop();
      if (ev.t > cfg_.horizon_s) {
        hit_cap = cfg_.mode == TraceMode::kOffline;
        break;
      }
      t_last_ = ev.t;
      switch (ev.kind) {
        case 0:
        case 3: on_admit(ev); break;
        case 1: on_batch_done(ev); break;
        default: on_transfer(ev); break;
      }
    }
    if (hit_cap)
      metrics_.warnings.push_back("offline run hit the time cap before draining the trace");
    finalize();
    return metrics_;
  }

 private:
  void push(double t, int kind, long req, int a, int b, int c) {
    pq_.push(Ev{t, kind, seq_++, req, a, b, c});
  }

  bool in_window(double t) const {
    if (cfg_.mode == TraceMode::kOffline) return true;
    return t >= cfg_.warmup_s && t <= cfg_.horizon_s;
  }

  void send(const std::string& src, const std::string& dst, double bytes, double now, long req,
            int hop, int tokens, int kv) {
    auto it = link_of_.find({src, dst});
    if (it == link_of_.end())
      throw InternalError("route uses a link that does not exist: " + src + " -> " + dst);
    const LinkSpec& l = c_.links[it->second];
    LinkRt& rt = links_[it->second];
    double start = std::max(now, rt.busy_until);
    double dur = 8.0 * bytes / l.bandwidth_bps;
    rt.busy_until = start + dur;
    rt.bytes += bytes;
    ++rt.transfers;
    double qd = start - now;
    rt.qd_sum += qd;
    rt.qd_max = std::max(rt.qd_max, qd);
    push(start + dur + l.latency_s, 2, req, hop, tokens, kv);
  }

  void on_admit(const Ev& ev) {
    long r = ev.req;
    auto route = sched_.admit(r, trace_[r].input_len);
    if (!route) {
      ++reqs_[r].defers;
      ++metrics_.deferrals;
      push(ev.t + cfg_.retry_interval_s, 3, r, 0, 0, 0);
      return;
    }
    reqs_[r].route = std::move(*route);
    reqs_[r].pages.assign(reqs_[r].route.size(), 0);
    int in = trace_[r].input_len;
    send(c_.coordinator_id, reqs_[r].route[0].node, in * c_.model.token_bytes, ev.t, r, 0, in, in);
  }

  void on_transfer(const Ev& ev) {
    if (ev.a < 0) {
      deliver_token(ev);
      return;
    }
    ReqRt& rq = reqs_[ev.req];
    int ni = node_of_.at(rq.route[ev.a].node);
    nodes_[ni].queue.push_back({ev.req, ev.a, ev.b, ev.c});
    try_batch(ni, ev.t);
  }

  void deliver_token(const Ev& ev) {
    long r = ev.req;
    ReqRt& rq = reqs_[r];
    ++rq.generated;
    // The first delivery closes the prefill pass, which pushed the whole
    // prompt through the pipeline; later ones are single decode tokens.
    double pipe_tokens = 1;
    if (rq.first_token_s < 0) {
      rq.first_token_s = ev.t;
      pipe_tokens = trace_[r].input_len;
    }
    if (in_window(ev.t)) {
      pipe_win_ += pipe_tokens;
      out_win_ += 1;
    }
    pipe_total_ += pipe_tokens;
    out_total_ += 1;

    if (rq.generated >= trace_[r].output_len) {
      rq.done_s = ev.t;
      sched_.complete(r, trace_[r].output_len);
      ++metrics_.requests_completed_total;
      for (size_t h = 0; h < rq.route.size(); ++h) {
        int ni = node_of_.at(rq.route[h].node);
        nodes_[ni].free_pages += rq.pages[h];
        rq.pages[h] = 0;
      }
      // Freed pages can unblock items the batcher skipped earlier.
      for (size_t h = 0; h < rq.route.size(); ++h) try_batch(node_of_.at(rq.route[h].node), ev.t);
    } else {
      int kv = trace_[r].input_len + rq.generated;
      send(c_.coordinator_id, rq.route[0].node, c_.model.token_bytes, ev.t, r, 0, 1, kv);
    }
  }

  void try_batch(int ni, double t) {
    NodeRt& n = nodes_[ni];
    if (n.busy || n.queue.empty()) return;
    std::deque<WorkItem> rest;
    double work = 0;
    long batch_tokens = 0;
    while (!n.queue.empty() && static_cast<int>(n.batch.size()) < cfg_.max_batch_requests) {
      WorkItem it = n.queue.front();
      if (!n.batch.empty() && batch_tokens + it.tokens > cfg_.max_batch_tokens) break;
      n.queue.pop_front();
      ReqRt& rq = reqs_[it.req];
      const RouteHop& hop = rq.route[it.hop];
      long layers = hop.exec_end - hop.exec_start;
      long need = ((it.kv_tokens + kPageTokens - 1) / kPageTokens) * layers;
      long delta = need - rq.pages[it.hop];
      if (delta > n.free_pages) {  // stays queued until pages free up
        rest.push_back(it);
        continue;
      }
      if (delta > 0) {
        n.free_pages -= delta;
        rq.pages[it.hop] = need;
      }
      n.batch.push_back(it);
      batch_tokens += it.tokens;
      work += static_cast<double>(it.tokens) * layers;
    }
    while (!n.queue.empty()) {
      rest.push_back(n.queue.front());
      n.queue.pop_front();
    }
    n.queue = std::move(rest);
    if (n.batch.empty()) return;
    n.busy = true;
    n.batch_start = t;
    n.batch_end = t + cfg_.batch_overhead_s + work / n.rate;
    ++n.batches;
    n.layer_tokens += work;
    push(n.batch_end, 1, -1, ni, 0, 0);
  }

  void on_batch_done(const Ev& ev) {
    NodeRt& n = nodes_[ev.a];
    n.busy = false;
    n.busy_total += n.batch_end - n.batch_start;
    n.busy_win += overlap(n.batch_start, n.batch_end, cfg_.warmup_s, cfg_.horizon_s);
    std::vector<WorkItem> batch = std::move(n.batch);
    n.batch.clear();
    for (const WorkItem& it : batch) {
      ReqRt& rq = reqs_[it.req];
      size_t next = static_cast<size_t>(it.hop) + 1;
      if (next < rq.route.size())
        send(rq.route[it.hop].node, rq.route[next].node, it.tokens * c_.model.activation_bytes,
             ev.t, it.req, static_cast<int>(next), it.tokens, it.kv_tokens);
      else
        send(rq.route[it.hop].node, c_.coordinator_id, c_.model.token_bytes, ev.t, it.req, -1, 1,
             it.kv_tokens);
    }
    try_batch(ev.a, ev.t);
  }

  void finalize() {
    bool online = cfg_.mode == TraceMode::kOnline;
    double window = online ? cfg_.horizon_s - cfg_.warmup_s : std::max(t_last_, 1e-9);
    metrics_.window_s = window;
    metrics_.throughput_tps = (online ? pipe_win_ : pipe_total_) / window;
    metrics_.output_tps = (online ? out_win_ : out_total_) / window;

    std::vector<double> lat, ttft;
    for (size_t i = 0; i < reqs_.size(); ++i) {
      const ReqRt& rq = reqs_[i];
      if (rq.done_s < 0) continue;
      if (online && (trace_[i].arrival_s < cfg_.warmup_s || rq.done_s > cfg_.horizon_s)) continue;
      lat.push_back(rq.done_s - trace_[i].arrival_s);
      ttft.push_back(rq.first_token_s - trace_[i].arrival_s);
    }
    metrics_.requests_completed = static_cast<long>(lat.size());
    std::sort(lat.begin(), lat.end());
    std::sort(ttft.begin(), ttft.end());
    if (!lat.empty()) {
      double sum = 0;
      for (double v : lat) sum += v;
      metrics_.latency_mean_s = sum / lat.size();
      metrics_.latency_p50_s = percentile(lat, 0.50);
      metrics_.latency_p95_s = percentile(lat, 0.95);
      metrics_.latency_max_s = lat.back();
      sum = 0;
      for (double v : ttft) sum += v;
      metrics_.ttft_mean_s = sum / ttft.size();
      metrics_.ttft_p95_s = percentile(ttft, 0.95);
    } else {
      metrics_.warnings.push_back("no request finished inside the measurement window");
    }

    for (const auto& [id, ni] : node_of_) {
      NodeRt& n = nodes_[ni];
      if (n.busy) {  // batch still running when the horizon closed
        n.busy_total += t_last_ - n.batch_start;
        n.busy_win += overlap(n.batch_start, cfg_.horizon_s, cfg_.warmup_s, cfg_.horizon_s);
      }
      NodeStats st;
      st.id = id;
      st.utilization = (online ? n.busy_win : n.busy_total) / window;
      st.batches = n.batches;
      st.layer_tokens = n.layer_tokens;
      st.kv_pages = n.pool;
      metrics_.nodes.push_back(std::move(st));
    }
    for (size_t i = 0; i < links_.size(); ++i) {
      const LinkRt& rt = links_[i];
      if (rt.transfers == 0) continue;
      LinkStats st;
      st.src = c_.links[i].src;
      st.dst = c_.links[i].dst;
      st.bytes = rt.bytes;
      st.transfers = rt.transfers;
      st.queue_delay_mean_s = rt.qd_sum / rt.transfers;
      st.queue_delay_max_s = rt.qd_max;
      metrics_.links.push_back(std::move(st));
    }
  }

  const ClusterSpec& c_;
  const std::vector<Request>& trace_;
  const SimConfig& cfg_;
  Scheduler sched_;

  std::vector<ReqRt> reqs_;
  std::vector<NodeRt> nodes_;
  std::map<std::string, int> node_of_;
  std::vector<LinkRt> links_;
  std::map<std::pair<std::string, std::string>, int> link_of_;
  std::priority_queue<Ev, std::vector<Ev>, EvAfter> pq_;
  long seq_ = 0;
  double t_last_ = 0;
  double pipe_win_ = 0, pipe_total_ = 0;
  long out_win_ = 0, out_total_ = 0;
  SimMetrics metrics_;
};

}  // namespace

SimMetrics simulate(const ClusterSpec& c, const PlacementPlan& plan,
                    const std::vector<Request>& trace, const SimConfig& cfg) {
  if (cfg.mode == TraceMode::kOnline && cfg.warmup_s >= cfg.horizon_s)
    throw ValidationError("warmup must end before the horizon");
  Engine eng(c, plan, trace, cfg);
  return eng.run();
}

}  // namespace helio
