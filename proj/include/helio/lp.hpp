#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace helio {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLe, kGe, kEq };

struct LpRow {
  std::vector<std::pair<int, double>> coef;  // (var index, coefficient)
  RowSense sense = RowSense::kLe;
  double rhs = 0;
  std::string name;
};

// Always a maximization; integer marks are consumed by branch_and_bound.
struct LpProblem {
  std::vector<double> obj, lo, hi;
  std::vector<char> is_int;
  std::vector<std::string> var_names;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int add_var(const std::string& name, double lo_, double hi_, double obj_, bool int_ = false) {
    var_names.push_back(name);
    lo.push_back(lo_);
    hi.push_back(hi_);
    obj.push_back(obj_);
    is_int.push_back(int_ ? 1 : 0);
    return num_vars() - 1;
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double obj = 0;
  std::vector<double> x;
  long iterations = 0;
};

struct LpOptions {
  long max_iters = 200000;
  double feas_tol = 1e-7;
  double opt_tol = 1e-9;
  int bland_after = 40;  // consecutive degenerate pivots before Bland's rule
};

// Bounded-variable primal simplex (two-phase, dense tableau). lo/hi overrides,
// when given, replace the problem bounds (used by branch & bound).
LpResult solve_lp(const LpProblem& p, const LpOptions& opts = {},
                  const std::vector<double>* lo_override = nullptr,
                  const std::vector<double>* hi_override = nullptr);

// Constraint check used for warm starts and incumbent validation.
bool lp_point_feasible(const LpProblem& p, const std::vector<double>& x, double tol);

double lp_objective(const LpProblem& p, const std::vector<double>& x);

}  // namespace helio
