#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helio/lp.hpp"

namespace helio {

enum class MilpStatus { kOptimal, kFeasible, kInfeasible, kUnbounded, kNoIncumbent };

struct BnbOptions {
  double int_tol = 1e-6;
  double prune_tol = 1e-9;      // relative incumbent-vs-bound pruning tolerance
  double gap = 0.0;             // stop once incumbent >= (1-gap) * upper_bound
  double upper_bound = kInf;    // externally known valid bound on the optimum
  long node_budget = -1;        // explored-node cap (deterministic), -1 = off
  double time_budget_s = -1;    // wall-clock cap, -1 = off
  LpOptions lp;
  // Primal heuristic: maps an LP-relaxation point to a full candidate
  // assignment (validated before acceptance), or nullopt.
  std::function<std::optional<std::vector<double>>(const std::vector<double>&)> rounding;
  int log_every = 200;
};

struct BnbResult {
  MilpStatus status = MilpStatus::kNoIncumbent;
  double obj = -kInf;
  std::vector<double> x;
  double best_bound = kInf;
  long nodes = 0;           // LP nodes explored
  long nodes_to_best = 0;   // nodes explored when the final incumbent appeared
  bool early_stopped = false;
  std::vector<std::string> warnings;
};

// Maximizing branch & bound over the integer-marked variables of `p`.
// Warm starts are full assignments; infeasible ones are rejected with a warning.
BnbResult branch_and_bound(const LpProblem& p,
                           const std::vector<std::vector<double>>& warm_starts,
                           const BnbOptions& opts = {});

}  // namespace helio
