#include "helio/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>

#include "helio/errors.hpp"
#include "helio/log.hpp"

namespace helio {

namespace {

struct Node {
  double bound;  // parent LP objective (optimistic)
  long seq;
  std::vector<double> lo, hi;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
    return a.seq > b.seq;                              // FIFO among ties
  }
};

bool integral_enough(const LpProblem& p, const std::vector<double>& x, double tol) {
  for (int j = 0; j < p.num_vars(); ++j) {
    if (!p.is_int[j]) continue;
    if (std::fabs(x[j] - std::llround(x[j])) > tol) return false;
  }
  return true;
}

void log_bnb(long nodes, double incumbent, double bound) {
  if (!log_enabled(LogLevel::kInfo)) return;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "[bnb] nodes=%ld incumbent=%.6f bound=%.6f", nodes,
                incumbent, bound);
  log_msg(LogLevel::kInfo, buf);
}

}  // namespace

BnbResult branch_and_bound(const LpProblem& p,
                           const std::vector<std::vector<double>>& warm_starts,
                           const BnbOptions& opts) {
  BnbResult res;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  double incumbent = -kInf;
  std::vector<double> best_x;
  auto keep_if_better = [&](std::vector<double>&& y, long at_node) {
    double v = lp_objective(p, y);
    if (v > incumbent) {
      incumbent = v;
      best_x = std::move(y);
      res.nodes_to_best = at_node;
    }
  };
  // Returns true when x is feasible as-is once the integer variables are
  // snapped, i.e. the caller may treat its node as a finished leaf. A point
  // that only survives the repair re-solve still updates the incumbent but
  // returns false, because the repaired objective can sit below the node
  // bound and the subtree may hold better integer points.
  auto try_incumbent = [&](const std::vector<double>& x, long at_node,
                           const char* origin) -> bool {
    auto reject = [&] {
      res.warnings.push_back(std::string(origin) + " rejected: infeasible");
      log_msg(LogLevel::kWarn, res.warnings.back());
      return false;
    };
    if (static_cast<int>(x.size()) != p.num_vars() || !integral_enough(p, x, 1e-5)) return reject();
    std::vector<double> y = x;
    for (int j = 0; j < p.num_vars(); ++j)
      if (p.is_int[j]) y[j] = static_cast<double>(std::llround(y[j]));
    if (lp_point_feasible(p, y, 1e-6)) {
      keep_if_better(std::move(y), at_node);
      return true;
    }
    // The snap broke feasibility: a nearly-integral LP solution can hide a
    // real violation behind a huge coefficient (d ~ 1e-12 on a gate row
    // still admits flow). Pin the integers and let the LP re-optimize the
    // continuous variables around them.
    std::vector<double> rlo = p.lo, rhi = p.hi;
    for (int j = 0; j < p.num_vars(); ++j)
      if (p.is_int[j]) rlo[j] = rhi[j] = y[j];
    LpResult rep = solve_lp(p, opts.lp, &rlo, &rhi);
    if (rep.status != LpStatus::kOptimal || !lp_point_feasible(p, rep.x, 1e-6) ||
        !integral_enough(p, rep.x, 1e-5))
      return reject();
    keep_if_better(std::move(rep.x), at_node);
    return false;
  };

  for (const auto& ws : warm_starts) try_incumbent(ws, 0, "warm start");

  double early_target = kInf;
  if (std::isfinite(opts.upper_bound)) early_target = (1.0 - opts.gap) * opts.upper_bound;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  open.push({kInf, seq++, p.lo, p.hi});

  bool exhausted = false;
  double open_bound = kInf;
  auto prune_cut = [&] { return incumbent + opts.prune_tol * std::max(1.0, std::fabs(incumbent)); };

  if (incumbent >= early_target) {
    res.early_stopped = true;
  } else {
    while (true) {
      if (open.empty()) {
        exhausted = true;
        open_bound = incumbent;
        break;
      }
      open_bound = std::min(open.top().bound, std::isfinite(opts.upper_bound)
                                                  ? opts.upper_bound
                                                  : open.top().bound);
      if (std::isfinite(incumbent) && open_bound <= prune_cut()) {
        exhausted = true;  // best-first: nothing left can improve
        open_bound = incumbent;
        break;
      }
      if (opts.node_budget >= 0 && res.nodes >= opts.node_budget) {
        res.early_stopped = true;
        break;
      }
      if (opts.time_budget_s > 0 && res.nodes % 16 == 0 && elapsed() > opts.time_budget_s) {
        res.early_stopped = true;
        break;
      }

      Node node = open.top();
      open.pop();

      LpResult lp = solve_lp(p, opts.lp, &node.lo, &node.hi);
      ++res.nodes;
      if (opts.log_every > 0 && res.nodes % opts.log_every == 0)
        log_bnb(res.nodes, incumbent, open_bound);

      if (lp.status == LpStatus::kInfeasible) continue;
      if (lp.status == LpStatus::kUnbounded) {
        res.status = MilpStatus::kUnbounded;
        res.best_bound = kInf;
        res.nodes_to_best = res.nodes;
        log_bnb(res.nodes, incumbent, kInf);
        return res;
      }
      if (lp.status == LpStatus::kIterLimit)
        throw InternalError("simplex iteration cap hit inside branch & bound");
      if (std::isfinite(incumbent) && lp.obj <= prune_cut()) continue;

      if (integral_enough(p, lp.x, opts.int_tol)) {
        bool leaf = try_incumbent(lp.x, res.nodes, "lp-integral node");
        if (incumbent >= early_target) {
          res.early_stopped = true;
          break;
        }
        if (leaf) continue;  // genuine integer leaf
        // Integral only behind the tolerance: keep the subtree and branch on
        // the least-integral variable to split the hidden violation.
      } else if (opts.rounding) {
        if (auto cand = opts.rounding(lp.x)) {
          try_incumbent(*cand, res.nodes, "rounding heuristic");
          if (incumbent >= early_target) {
            res.early_stopped = true;
            break;
          }
        }
      }

      // Branch on the most fractional integer variable (ties: lowest index).
      auto pick_branch = [&](double frac_tol) {
        int best = -1;
        double best_frac = -1;
        for (int j = 0; j < p.num_vars(); ++j) {
          if (!p.is_int[j]) continue;
          double f = lp.x[j] - std::floor(lp.x[j]);
          double dist = std::min(f, 1.0 - f);
          if (dist > frac_tol && dist > best_frac + 1e-12) {
            best_frac = dist;
            best = j;
          }
        }
        return best;
      };
      int q = pick_branch(opts.int_tol);
      if (q < 0) q = pick_branch(0.0);  // any nonzero fraction will do
      if (q < 0) continue;  // exactly integral yet rejected; nothing to split

      double v = lp.x[q];
      Node down = node;
      down.hi[q] = std::floor(v);
      down.bound = lp.obj;
      down.seq = seq++;
      if (down.lo[q] <= down.hi[q]) open.push(std::move(down));
      Node up = std::move(node);
      up.lo[q] = std::ceil(v);
      up.bound = lp.obj;
      up.seq = seq++;
      if (up.lo[q] <= up.hi[q]) open.push(std::move(up));
    }
  }

  res.obj = incumbent;
  res.x = best_x;
  if (!std::isfinite(incumbent)) {
    res.status = exhausted ? MilpStatus::kInfeasible : MilpStatus::kNoIncumbent;
    res.best_bound = exhausted ? -kInf : open_bound;
    log_bnb(res.nodes, incumbent, res.best_bound);
    return res;
  }
  res.best_bound = exhausted ? incumbent : std::max(incumbent, open_bound);
  if (!exhausted && std::isfinite(opts.upper_bound))
    res.best_bound = std::min(res.best_bound, std::max(incumbent, opts.upper_bound));
  res.status = exhausted ? MilpStatus::kOptimal : MilpStatus::kFeasible;
  // Meeting the caller's upper bound proves optimality without exhausting.
  if (!exhausted && std::isfinite(opts.upper_bound) &&
      incumbent >= opts.upper_bound - 1e-9 * std::max(1.0, std::fabs(opts.upper_bound))) {
    res.status = MilpStatus::kOptimal;
    res.best_bound = incumbent;
  }
  log_bnb(res.nodes, incumbent, res.best_bound);
  return res;
}

}  // namespace helio
