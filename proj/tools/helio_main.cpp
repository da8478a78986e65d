// helio: plan layer placement for a distributed LLM cluster and replay the
// plan through a discrete-event simulator.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helio/errors.hpp"
#include "helio/heuristics.hpp"
#include "helio/log.hpp"
#include "helio/placement.hpp"
#include "helio/sim.hpp"
#include "helio/workload.hpp"

namespace fs = std::filesystem;
using namespace helio;

namespace {

struct PlanArgs {
  std::string cluster_path;
  std::string method = "milp";
  bool no_partial = false;
  double prune_degree = 0;
  double gap = 0.02;
  double time_budget = 600;
  long node_budget = -1;
  bool no_warm = false;
  bool no_lex = false;
  std::string export_lp, dump_dot, out_path;
};

struct SimArgs {
  std::string cluster_path, plan_path;
  std::string method = "milp";
  std::string scheduler = "iwrr";
  std::string mode = "online";
  uint64_t seed = 1;
  double rate = 0;  // 0 = derive from the plan objective
  double duration = 120;
  double warmup = 20;
  long requests = 0;  // offline override; 0 = derive
  std::string trace_path, save_trace, out_dir;
};

struct CompareArgs {
  std::string cluster_path;
  std::string methods = "milp,swarm,petals,sp";
  std::string schedulers = "iwrr,random,sqf,swarm";
  std::string mode = "online";
  uint64_t seed = 1;
  double rate = 0;
  double duration = 120;
  double warmup = 20;
  double gap = 0.02;
  double time_budget = 600;
  long node_budget = -1;
  bool no_partial = false;
  double prune_degree = 0;
  std::string out_dir = "compare_out";
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

PlacementPlan make_plan(const ClusterSpec& c, const std::string& method, bool allow_partial,
                        const PlanOptions& milp_opts) {
  if (method == "milp") return plan_placement(c, milp_opts);
  HeuristicResult h;
  if (method == "swarm") {
    h = swarm_placement(c);
  } else if (method == "petals") {
    h = petals_placement(c);
  } else if (method == "sp") {
    h = separate_pipelines_placement(c);
  } else {
    throw ValidationError("unknown method '" + method + "' (expected milp, swarm, petals, sp)");
  }
  for (const std::string& w : h.warnings) log_msg(LogLevel::kWarn, "[" + method + "] " + w);
  PlacementPlan plan = plan_from_placement(c, h.placement, allow_partial, method);
  for (const std::string& w : h.warnings) plan.warnings.push_back(w);
  return plan;
}

void print_plan(const PlacementPlan& plan) {
  std::printf("method        %s\n", plan.method.c_str());
  std::printf("objective     %.4f tokens/s\n", plan.objective);
  std::printf("best bound    %.4f\n", plan.best_bound);
  const char* st = "no-incumbent";
  switch (plan.status) {
    case MilpStatus::kOptimal: st = "optimal"; break;
    case MilpStatus::kFeasible: st = "feasible"; break;
    case MilpStatus::kInfeasible: st = "infeasible"; break;
    case MilpStatus::kUnbounded: st = "unbounded"; break;
    default: break;
  }
  std::printf("status        %s\n", st);
  if (plan.nodes_explored > 0) std::printf("nodes         %ld\n", plan.nodes_explored);
  std::printf("placement:\n");
  for (const auto& [id, iv] : plan.placement)
    if (!iv.empty()) std::printf("  %-16s layers [%d, %d)\n", id.c_str(), iv.start, iv.end);
  std::printf("flow edges:\n");
  for (const PlanEdge& e : plan.edges)
    std::printf("  %-14s -> %-14s %9.3f tok/s  exec [%d, %d)\n", e.src.c_str(), e.dst.c_str(),
                e.flow, e.exec_start, e.exec_end);
  for (const std::string& w : plan.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_plan(const PlanArgs& a) {
  ClusterSpec c = load_cluster(a.cluster_path);
  PlanOptions opts;
  opts.allow_partial = !a.no_partial;
  opts.prune_degree = a.prune_degree;
  opts.gap = a.gap;
  opts.time_budget_s = a.time_budget;
  opts.node_budget = a.node_budget;
  opts.use_warm_starts = !a.no_warm;
  opts.lex_tiebreak = !a.no_lex;
  opts.export_lp_path = a.export_lp;
  PlacementPlan plan = make_plan(c, a.method, !a.no_partial, opts);
  print_plan(plan);
  if (!a.out_path.empty()) {
    save_plan(plan, a.out_path);
    std::printf("plan written to %s\n", a.out_path.c_str());
  }
  if (!a.dump_dot.empty()) {
    FlowGraph g = build_flow_graph(c, plan.placement, plan.allow_partial);
    max_flow(g);
    std::ofstream dot(a.dump_dot);
    if (!dot) throw ParseError(a.dump_dot + ": cannot open for writing");
    dot << to_dot(g);
    std::printf("flow graph written to %s\n", a.dump_dot.c_str());
  }
  return 0;
}

std::vector<Request> build_trace(const ClusterSpec& c, const PlacementPlan& plan,
                                 const SimArgs& a, TraceMode mode, double* rate_out) {
  LengthParams lens;
  if (!a.trace_path.empty()) {
    if (rate_out) *rate_out = 0;
    return load_trace(a.trace_path);
  }
  if (mode == TraceMode::kOnline) {
    double rate = a.rate > 0 ? a.rate : rate_for_online(plan, lens);
    if (rate <= 0) throw ValidationError("derived arrival rate is zero; pass --rate");
    if (rate_out) *rate_out = rate;
    int count = static_cast<int>(std::ceil(rate * a.duration * 1.25)) + 64;
    return generate_trace(count, rate, TraceMode::kOnline, lens, a.seed);
  }
  long count = a.requests;
  if (count <= 0)
    count = std::max<long>(
        1, std::llround(plan.objective * a.duration / (lens.mean_input + lens.mean_output)));
  if (rate_out) *rate_out = 0;
  return generate_trace(static_cast<int>(count), 0, TraceMode::kOffline, lens, a.seed);
}

void write_metrics_csv(std::FILE* f, const std::string& method, const std::string& sched,
                       const std::string& mode, uint64_t seed, const SimMetrics& m) {
  std::fprintf(f, "%s,%s,%s,%llu,%.3f,%ld,%ld,%ld,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%ld\n",
               method.c_str(), sched.c_str(), mode.c_str(),
               static_cast<unsigned long long>(seed), m.window_s, m.requests_arrived,
               m.requests_completed, m.requests_completed_total, m.throughput_tps, m.output_tps,
               m.latency_mean_s, m.latency_p50_s, m.latency_p95_s, m.latency_max_s, m.ttft_mean_s,
               m.ttft_p95_s, m.deferrals);
}

const char* kMetricsHeader =
    "method,scheduler,mode,seed,window_s,arrived,completed,completed_total,throughput_tps,"
    "output_tps,latency_mean_s,latency_p50_s,latency_p95_s,latency_max_s,ttft_mean_s,"
    "ttft_p95_s,deferrals\n";

void print_metrics(const SimMetrics& m) {
  std::printf("window        %.1f s\n", m.window_s);
  std::printf("arrived       %ld\n", m.requests_arrived);
  std::printf("completed     %ld (window) / %ld (total)\n", m.requests_completed,
              m.requests_completed_total);
  std::printf("throughput    %.2f tokens/s through the pipeline\n", m.throughput_tps);
  std::printf("output rate   %.2f generated tokens/s\n", m.output_tps);
  std::printf("latency       mean %.3f  p50 %.3f  p95 %.3f  max %.3f s\n", m.latency_mean_s,
              m.latency_p50_s, m.latency_p95_s, m.latency_max_s);
  std::printf("ttft          mean %.3f  p95 %.3f s\n", m.ttft_mean_s, m.ttft_p95_s);
  std::printf("deferrals     %ld\n", m.deferrals);
  for (const NodeStats& n : m.nodes)
    std::printf("node %-14s util %5.1f%%  batches %6ld  work %12.0f\n", n.id.c_str(),
                100 * n.utilization, n.batches, n.layer_tokens);
  for (const LinkStats& l : m.links)
    std::printf("link %-12s -> %-12s  %10.0f bytes  qdelay mean %.4f max %.4f s\n", l.src.c_str(),
                l.dst.c_str(), l.bytes, l.queue_delay_mean_s, l.queue_delay_max_s);
  for (const std::string& w : m.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_simulate(const SimArgs& a) {
  ClusterSpec c = load_cluster(a.cluster_path);
  PlacementPlan plan;
  if (!a.plan_path.empty()) {
    plan = load_plan(a.plan_path);
  } else {
    PlanOptions opts;
    plan = make_plan(c, a.method, true, opts);
  }
  TraceMode mode = trace_mode_from_str(a.mode);
  double rate = 0;
  std::vector<Request> trace = build_trace(c, plan, a, mode, &rate);
  if (!a.save_trace.empty()) save_trace(trace, a.save_trace);

  SimConfig cfg;
  cfg.mode = mode;
  cfg.policy = sched_policy_from_str(a.scheduler);
  cfg.seed = a.seed;
  cfg.warmup_s = mode == TraceMode::kOnline ? a.warmup : 0;
  cfg.horizon_s = mode == TraceMode::kOnline ? a.duration : 20 * a.duration + 600;

  std::printf("plan objective %.2f tokens/s (%s)\n", plan.objective, plan.method.c_str());
  if (rate > 0) std::printf("arrival rate   %.3f req/s\n", rate);
  std::printf("trace          %zu requests (%s)\n", trace.size(), a.mode.c_str());
  SimMetrics m = simulate(c, plan, trace, cfg);
  print_metrics(m);

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    save_plan(plan, (fs::path(a.out_dir) / "plan.json").string());
    std::FILE* f = std::fopen((fs::path(a.out_dir) / "metrics.csv").string().c_str(), "w");
    if (!f) throw ParseError(a.out_dir + "/metrics.csv: cannot open for writing");
    std::fputs(kMetricsHeader, f);
    write_metrics_csv(f, plan.method, a.scheduler, a.mode, a.seed, m);
    std::fclose(f);
    std::printf("results written to %s\n", a.out_dir.c_str());
  }
  return 0;
}

int cmd_compare(const CompareArgs& a) {
  ClusterSpec c = load_cluster(a.cluster_path);
  std::vector<std::string> methods = split_csv(a.methods);
  std::vector<std::string> schedulers = split_csv(a.schedulers);
  if (methods.empty() || schedulers.empty())
    throw ValidationError("compare needs at least one method and one scheduler");
  TraceMode mode = trace_mode_from_str(a.mode);

  PlanOptions opts;
  opts.allow_partial = !a.no_partial;
  opts.prune_degree = a.prune_degree;
  opts.gap = a.gap;
  opts.time_budget_s = a.time_budget;
  opts.node_budget = a.node_budget;

  fs::create_directories(a.out_dir);
  fs::copy_file(a.cluster_path, fs::path(a.out_dir) / "cluster.json",
                fs::copy_options::overwrite_existing);

  std::vector<std::pair<std::string, PlacementPlan>> plans;
  double best_obj = 0;
  for (const std::string& m : methods) {
    std::printf("planning with %s ...\n", m.c_str());
    PlacementPlan plan = make_plan(c, m, !a.no_partial, opts);
    best_obj = std::max(best_obj, plan.objective);
    save_plan(plan, (fs::path(a.out_dir) / ("plan_" + m + ".json")).string());
    plans.push_back({m, plan});
  }

  // One shared trace, sized against the strongest plan, so every combination
  // faces the same offered load.
  LengthParams lens;
  std::vector<Request> trace;
  double rate = a.rate;
  if (mode == TraceMode::kOnline) {
    if (rate <= 0) rate = 0.75 * best_obj / (lens.mean_input + lens.mean_output);
    if (rate <= 0) throw ValidationError("derived arrival rate is zero; pass --rate");
    int count = static_cast<int>(std::ceil(rate * a.duration * 1.25)) + 64;
    trace = generate_trace(count, rate, mode, lens, a.seed);
  } else {
    long count = std::max<long>(
        1, std::llround(best_obj * a.duration / (lens.mean_input + lens.mean_output)));
    trace = generate_trace(static_cast<int>(count), 0, mode, lens, a.seed);
  }
  save_trace(trace, (fs::path(a.out_dir) / "trace.csv").string());

  std::FILE* fm = std::fopen((fs::path(a.out_dir) / "metrics.csv").string().c_str(), "w");
  std::FILE* fl = std::fopen((fs::path(a.out_dir) / "links.csv").string().c_str(), "w");
  std::FILE* fn = std::fopen((fs::path(a.out_dir) / "nodes.csv").string().c_str(), "w");
  if (!fm || !fl || !fn) throw ParseError(a.out_dir + ": cannot open output files");
  std::fputs(kMetricsHeader, fm);
  std::fputs("method,scheduler,src,dst,bytes,transfers,queue_delay_mean_s,queue_delay_max_s\n",
             fl);
  std::fputs("method,scheduler,node,utilization,batches,layer_tokens,kv_pages\n", fn);

  std::vector<std::tuple<std::string, std::string, SimMetrics>> rows;
  for (const auto& [mname, plan] : plans) {
    for (const std::string& sname : schedulers) {
      std::printf("simulating %s + %s ...\n", mname.c_str(), sname.c_str());
      SimConfig cfg;
      cfg.mode = mode;
      cfg.policy = sched_policy_from_str(sname);
      cfg.seed = a.seed;
      cfg.warmup_s = mode == TraceMode::kOnline ? a.warmup : 0;
      cfg.horizon_s = mode == TraceMode::kOnline ? a.duration : 20 * a.duration + 600;
      SimMetrics m = simulate(c, plan, trace, cfg);
      write_metrics_csv(fm, mname, sname, a.mode, a.seed, m);
      for (const LinkStats& l : m.links)
        std::fprintf(fl, "%s,%s,%s,%s,%.0f,%ld,%.6f,%.6f\n", mname.c_str(), sname.c_str(),
                     l.src.c_str(), l.dst.c_str(), l.bytes, l.transfers, l.queue_delay_mean_s,
                     l.queue_delay_max_s);
      for (const NodeStats& n : m.nodes)
        std::fprintf(fn, "%s,%s,%s,%.4f,%ld,%.0f,%ld\n", mname.c_str(), sname.c_str(),
                     n.id.c_str(), n.utilization, n.batches, n.layer_tokens, n.kv_pages);
      rows.push_back({mname, sname, std::move(m)});
    }
  }
  std::fclose(fm);
  std::fclose(fl);
  std::fclose(fn);

  std::FILE* fr = std::fopen((fs::path(a.out_dir) / "report.md").string().c_str(), "w");
  if (!fr) throw ParseError(a.out_dir + "/report.md: cannot open for writing");
  std::fprintf(fr, "# Plan comparison\n\n## Plans\n\n");
  std::fprintf(fr, "| method | objective (tok/s) | bound | status |\n|---|---|---|---|\n");
  for (const auto& [mname, plan] : plans) {
    const char* st = plan.status == MilpStatus::kOptimal ? "optimal" : "feasible";
    std::fprintf(fr, "| %s | %.2f | %.2f | %s |\n", mname.c_str(), plan.objective,
                 plan.best_bound, st);
  }
  std::fprintf(fr, "\n## Simulation (%s, seed %llu)\n\n", a.mode.c_str(),
               static_cast<unsigned long long>(a.seed));
  std::fprintf(fr,
               "| method | scheduler | throughput tok/s | output tok/s | p50 lat s | p95 lat s |"
               " deferrals |\n|---|---|---|---|---|---|---|\n");
  for (const auto& [mname, sname, m] : rows)
    std::fprintf(fr, "| %s | %s | %.2f | %.2f | %.3f | %.3f | %ld |\n", mname.c_str(),
                 sname.c_str(), m.throughput_tps, m.output_tps, m.latency_p50_s, m.latency_p95_s,
                 m.deferrals);
  std::fclose(fr);
  std::printf("comparison written to %s\n", a.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layer placement planner and cluster simulator for distributed LLM serving"};
  app.require_subcommand(1);

  PlanArgs pa;
  CLI::App* plan = app.add_subcommand("plan", "compute a layer placement for a cluster");
  plan->add_option("--cluster", pa.cluster_path, "cluster spec JSON")->required();
  plan->add_option("--method", pa.method, "milp | swarm | petals | sp");
  plan->add_flag("--no-partial", pa.no_partial, "forbid partial-overlap chaining");
  plan->add_option("--prune-degree", pa.prune_degree, "prune links above this average degree");
  plan->add_option("--gap", pa.gap, "relative early-stop gap for the solver");
  plan->add_option("--time-budget", pa.time_budget, "solver wall-clock budget (s)");
  plan->add_option("--node-budget", pa.node_budget, "solver node budget (deterministic stop)");
  plan->add_flag("--no-warm-starts", pa.no_warm, "skip heuristic warm starts");
  plan->add_flag("--no-lex", pa.no_lex, "skip the canonical tie-break pass");
  plan->add_option("--export-lp", pa.export_lp, "write the model in LP format");
  plan->add_option("--dump-dot", pa.dump_dot, "write the solved flow graph as DOT");
  plan->add_option("--out", pa.out_path, "write the plan JSON here");

  SimArgs sa;
  CLI::App* simc = app.add_subcommand("simulate", "run one plan through the simulator");
  simc->add_option("--cluster", sa.cluster_path, "cluster spec JSON")->required();
  simc->add_option("--plan", sa.plan_path, "plan JSON (skips planning)");
  simc->add_option("--method", sa.method, "plan method when --plan is absent");
  simc->add_option("--scheduler", sa.scheduler, "iwrr | random | sqf | swarm");
  simc->add_option("--mode", sa.mode, "online | offline");
  simc->add_option("--seed", sa.seed, "trace and scheduler seed");
  simc->add_option("--rate", sa.rate, "arrival rate req/s (0 = derive from plan)");
  simc->add_option("--duration", sa.duration, "online horizon / offline workload scale (s)");
  simc->add_option("--warmup", sa.warmup, "online warmup excluded from metrics (s)");
  simc->add_option("--requests", sa.requests, "offline request count override");
  simc->add_option("--trace", sa.trace_path, "replay this trace CSV instead of generating");
  simc->add_option("--save-trace", sa.save_trace, "write the generated trace CSV");
  simc->add_option("--out", sa.out_dir, "write plan.json and metrics.csv here");

  CompareArgs ca;
  CLI::App* cmp = app.add_subcommand("compare", "sweep methods x schedulers on one cluster");
  cmp->add_option("--cluster", ca.cluster_path, "cluster spec JSON")->required();
  cmp->add_option("--methods", ca.methods, "comma list of placement methods");
  cmp->add_option("--schedulers", ca.schedulers, "comma list of scheduler policies");
  cmp->add_option("--mode", ca.mode, "online | offline");
  cmp->add_option("--seed", ca.seed, "trace and scheduler seed");
  cmp->add_option("--rate", ca.rate, "arrival rate req/s (0 = derive)");
  cmp->add_option("--duration", ca.duration, "online horizon / offline workload scale (s)");
  cmp->add_option("--warmup", ca.warmup, "online warmup (s)");
  cmp->add_option("--gap", ca.gap, "solver early-stop gap");
  cmp->add_option("--time-budget", ca.time_budget, "solver budget (s)");
  cmp->add_option("--node-budget", ca.node_budget, "solver node budget");
  cmp->add_flag("--no-partial", ca.no_partial, "forbid partial-overlap chaining");
  cmp->add_option("--prune-degree", ca.prune_degree, "prune links above this average degree");
  cmp->add_option("--out", ca.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (plan->parsed()) return cmd_plan(pa);
    if (simc->parsed()) return cmd_simulate(sa);
    if (cmp->parsed()) return cmd_compare(ca);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
