#include "helio/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "helio/errors.hpp"

namespace helio {

namespace {

enum VStat : char { kBasic, kAtLo, kAtHi };

struct Tableau {
  int m = 0, total = 0;               // rows, columns (vars incl. slacks/artificials)
  std::vector<double> t;              // m x total, row-major: B^-1 * A
  std::vector<double> xb;             // basic variable values
  std::vector<int> basis;             // var basic in each row
  std::vector<VStat> stat;
  std::vector<double> lo, hi, cost;

  double& at(int r, int j) { return t[static_cast<size_t>(r) * total + j]; }
  double at(int r, int j) const { return t[static_cast<size_t>(r) * total + j]; }

  double value(int j) const {
    if (stat[j] == kAtLo) return std::isfinite(lo[j]) ? lo[j] : 0.0;
    if (stat[j] == kAtHi) return hi[j];
    return 0.0;
  }
};

struct SimplexOutcome {
  LpStatus status;
  long iters;
};

// Runs the bounded-variable primal simplex on the tableau in place.
SimplexOutcome run_simplex(Tableau& tb, const LpOptions& opts, long iter_budget) {
  const int m = tb.m, total = tb.total;
  std::vector<double> y(m), d(total);
  long iters = 0;
  int degen_streak = 0;

  while (iters < iter_budget) {
    ++iters;
    for (int r = 0; r < m; ++r) y[r] = tb.cost[tb.basis[r]];
    // Reduced costs d_j = c_j - y' T_j for nonbasic columns.
    for (int j = 0; j < total; ++j) d[j] = tb.stat[j] == kBasic ? 0.0 : tb.cost[j];
    for (int r = 0; r < m; ++r) {
      double yr = y[r];
      if (yr == 0.0) continue;
      const double* row = &tb.t[static_cast<size_t>(r) * total];
      for (int j = 0; j < total; ++j) d[j] -= yr * row[j];
    }

    bool bland = degen_streak >= opts.bland_after;
    int q = -1;
    double best = opts.opt_tol;
    for (int j = 0; j < total; ++j) {
      if (tb.stat[j] == kBasic) continue;
      if (tb.lo[j] == tb.hi[j]) continue;  // fixed
      double dj = d[j];
      bool improving = (tb.stat[j] == kAtLo && dj > opts.opt_tol) ||
                       (tb.stat[j] == kAtHi && dj < -opts.opt_tol);
      if (!improving) continue;
      if (bland) {
        q = j;
        break;
      }
      if (std::fabs(dj) > best) {
        best = std::fabs(dj);
        q = j;
      }
    }
    if (q < 0) return {LpStatus::kOptimal, iters};

    double sgn = tb.stat[q] == kAtHi ? -1.0 : 1.0;
    double span = tb.hi[q] - tb.lo[q];  // may be inf

    // Ratio test: smallest step before a basic variable hits a bound.
    double tmax = span;
    int leave_row = -1;
    double leave_to_hi = false;
    for (int r = 0; r < m; ++r) {
      double w = sgn * tb.at(r, q);
      int b = tb.basis[r];
      if (w > opts.feas_tol) {
        if (!std::isfinite(tb.lo[b])) continue;
        double limit = (tb.xb[r] - tb.lo[b]) / w;
        if (limit < tmax - 1e-12 ||
            (leave_row >= 0 && std::fabs(limit - tmax) <= 1e-12 && b < tb.basis[leave_row])) {
          tmax = std::max(limit, 0.0);
          leave_row = r;
          leave_to_hi = false;
        }
      } else if (w < -opts.feas_tol) {
        if (!std::isfinite(tb.hi[b])) continue;
        double limit = (tb.hi[b] - tb.xb[r]) / (-w);
        if (limit < tmax - 1e-12 ||
            (leave_row >= 0 && std::fabs(limit - tmax) <= 1e-12 && b < tb.basis[leave_row])) {
          tmax = std::max(limit, 0.0);
          leave_row = r;
          leave_to_hi = true;
        }
      }
    }

    if (leave_row < 0 && !std::isfinite(tmax)) return {LpStatus::kUnbounded, iters};

    degen_streak = (tmax <= opts.feas_tol) ? degen_streak + 1 : 0;

    if (leave_row < 0) {
      // Bound flip: q runs to its opposite bound, basis unchanged.
      for (int r = 0; r < m; ++r) tb.xb[r] -= tmax * sgn * tb.at(r, q);
      tb.stat[q] = tb.stat[q] == kAtLo ? kAtHi : kAtLo;
      continue;
    }

    // Pivot q into the basis at leave_row.
    double enter_val = tb.value(q) + sgn * tmax;
    for (int r = 0; r < m; ++r)
      if (r != leave_row) tb.xb[r] -= tmax * sgn * tb.at(r, q);
    int leaving = tb.basis[leave_row];
    tb.stat[leaving] = leave_to_hi ? kAtHi : kAtLo;
    tb.basis[leave_row] = q;
    tb.stat[q] = kBasic;
    tb.xb[leave_row] = enter_val;

    double piv = tb.at(leave_row, q);
    double inv = 1.0 / piv;
    double* prow = &tb.t[static_cast<size_t>(leave_row) * total];
    for (int j = 0; j < total; ++j) prow[j] *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == leave_row) continue;
      double f = tb.at(r, q);
      if (f == 0.0) continue;
      double* row = &tb.t[static_cast<size_t>(r) * total];
      for (int j = 0; j < total; ++j) row[j] -= f * prow[j];
    }
  }
  return {LpStatus::kIterLimit, iters};
}

}  // namespace

bool lp_point_feasible(const LpProblem& p, const std::vector<double>& x, double tol) {
  if (static_cast<int>(x.size()) != p.num_vars()) return false;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (x[j] < p.lo[j] - tol || x[j] > p.hi[j] + tol) return false;
  }
  for (const LpRow& row : p.rows) {
    // Violations are judged relative to the largest term so that rows mixing
    // unit coefficients with huge capacities keep a meaningful tolerance.
    double v = 0;
    double scale = std::max(1.0, std::fabs(row.rhs));
    for (auto [j, a] : row.coef) {
      double t = a * x[j];
      v += t;
      scale = std::max(scale, std::fabs(t));
    }
    if (row.sense == RowSense::kLe && v > row.rhs + tol * scale) return false;
    if (row.sense == RowSense::kGe && v < row.rhs - tol * scale) return false;
    if (row.sense == RowSense::kEq && std::fabs(v - row.rhs) > tol * scale) return false;
  }
  return true;
}

double lp_objective(const LpProblem& p, const std::vector<double>& x) {
  double v = 0;
  for (int j = 0; j < p.num_vars(); ++j) v += p.obj[j] * x[j];
  return v;
}

LpResult solve_lp(const LpProblem& p, const LpOptions& opts,
                  const std::vector<double>* lo_override, const std::vector<double>* hi_override) {
  const int n = p.num_vars();
  const int m = static_cast<int>(p.rows.size());
  const std::vector<double>& plo = lo_override ? *lo_override : p.lo;
  const std::vector<double>& phi = hi_override ? *hi_override : p.hi;

  LpResult res;
  for (int j = 0; j < n; ++j) {
    if (plo[j] > phi[j] + opts.feas_tol) {
      res.status = LpStatus::kInfeasible;
      return res;
    }
  }

  // Columns: n structural, m slacks, up to m artificials.
  Tableau tb;
  tb.m = m;
  tb.total = n + 2 * m;
  tb.t.assign(static_cast<size_t>(m) * tb.total, 0.0);
  tb.lo.assign(tb.total, 0.0);
  tb.hi.assign(tb.total, 0.0);
  tb.cost.assign(tb.total, 0.0);
  tb.stat.assign(tb.total, kAtLo);
  tb.basis.assign(m, -1);
  tb.xb.assign(m, 0.0);

  for (int j = 0; j < n; ++j) {
    tb.lo[j] = plo[j];
    tb.hi[j] = phi[j];
    if (std::isfinite(plo[j]))
      tb.stat[j] = kAtLo;
    else if (std::isfinite(phi[j]))
      tb.stat[j] = kAtHi;
    else
      tb.stat[j] = kAtLo;  // free var parked at 0
  }
  for (int r = 0; r < m; ++r) {
    int s = n + r;
    switch (p.rows[r].sense) {
      case RowSense::kLe: tb.lo[s] = 0, tb.hi[s] = kInf; break;
      case RowSense::kGe: tb.lo[s] = -kInf, tb.hi[s] = 0; break;
      case RowSense::kEq: tb.lo[s] = 0, tb.hi[s] = 0; break;
    }
    tb.stat[s] = p.rows[r].sense == RowSense::kGe ? kAtHi : kAtLo;
    tb.at(r, s) = 1.0;
    for (auto [j, a] : p.rows[r].coef) tb.at(r, j) += a;
  }

  // Initial basis: slacks where the residual fits the slack bounds, else artificials.
  int art_used = 0;
  for (int r = 0; r < m; ++r) {
    double resid = p.rows[r].rhs;
    for (auto [j, a] : p.rows[r].coef) resid -= a * tb.value(j);
    int s = n + r;
    if (resid >= tb.lo[s] - opts.feas_tol && resid <= tb.hi[s] + opts.feas_tol) {
      tb.basis[r] = s;
      tb.stat[s] = kBasic;
      tb.xb[r] = resid;
    } else {
      double target = std::clamp(resid, tb.lo[s], tb.hi[s]);
      tb.stat[s] = (target == tb.hi[s] && std::isfinite(tb.hi[s])) ? kAtHi : kAtLo;
      double gap = resid - target;
      int a = n + m + r;
      if (gap < 0) {
        // Negate the row so the artificial keeps the +1 the simplex assumes
        // of every basic column; a -1 there flips ratio-test directions.
        double* row = &tb.t[static_cast<size_t>(r) * tb.total];
        for (int j = 0; j < tb.total; ++j) row[j] = -row[j];
      }
      tb.at(r, a) = 1.0;
      tb.lo[a] = 0;
      tb.hi[a] = kInf;
      tb.basis[r] = a;
      tb.stat[a] = kBasic;
      tb.xb[r] = std::fabs(gap);
      tb.cost[a] = -1.0;  // phase-1 objective
      ++art_used;
    }
  }

  long total_iters = 0;
  if (art_used > 0) {
    SimplexOutcome ph1 = run_simplex(tb, opts, opts.max_iters);
    total_iters += ph1.iters;
    if (ph1.status == LpStatus::kIterLimit) {
      res.status = LpStatus::kIterLimit;
      res.iterations = total_iters;
      return res;
    }
    double infeas = 0;
    for (int r = 0; r < m; ++r)
      if (tb.basis[r] >= n + m) infeas += tb.xb[r];
    if (infeas > 1e-6) {
      res.status = LpStatus::kInfeasible;
      res.iterations = total_iters;
      return res;
    }
    // Drive leftover (degenerate) artificials out where possible, then freeze them.
    for (int r = 0; r < m; ++r) {
      if (tb.basis[r] < n + m) continue;
      int pick = -1;
      for (int j = 0; j < n + m; ++j) {
        if (tb.stat[j] == kBasic || tb.lo[j] == tb.hi[j]) continue;
        if (std::fabs(tb.at(r, j)) > 1e-9) {
          pick = j;
          break;
        }
      }
      if (pick < 0) continue;  // redundant row; artificial stays basic at 0
      int art = tb.basis[r];
      tb.stat[art] = kAtLo;
      double pick_val = tb.value(pick);  // read before stat flips to basic
      tb.basis[r] = pick;
      tb.stat[pick] = kBasic;
      double piv = tb.at(r, pick);
      double* prow = &tb.t[static_cast<size_t>(r) * tb.total];
      for (int j = 0; j < tb.total; ++j) prow[j] /= piv;
      for (int r2 = 0; r2 < m; ++r2) {
        if (r2 == r) continue;
        double f = tb.at(r2, pick);
        if (f == 0.0) continue;
        double* row = &tb.t[static_cast<size_t>(r2) * tb.total];
        for (int j = 0; j < tb.total; ++j) row[j] -= f * prow[j];
      }
      tb.xb[r] = pick_val;  // zero-length pivot: the entering value is unchanged
    }
    for (int a = n + m; a < tb.total; ++a) {
      if (tb.stat[a] != kBasic) {
        tb.lo[a] = tb.hi[a] = 0;
        tb.stat[a] = kAtLo;
      }
      tb.cost[a] = 0;
    }
  }

  for (int j = 0; j < n; ++j) tb.cost[j] = p.obj[j];
  for (int j = n; j < tb.total; ++j) tb.cost[j] = 0;
  SimplexOutcome ph2 = run_simplex(tb, opts, opts.max_iters - total_iters);
  total_iters += ph2.iters;

  res.status = ph2.status;
  res.iterations = total_iters;
  if (ph2.status != LpStatus::kOptimal) return res;

  res.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) res.x[j] = tb.value(j);
  for (int r = 0; r < m; ++r)
    if (tb.basis[r] < n) res.x[tb.basis[r]] = tb.xb[r];
  for (int j = 0; j < n; ++j) {
    // Clean tiny numerical drift off the bounds.
    if (std::isfinite(plo[j]) && res.x[j] < plo[j]) res.x[j] = plo[j];
    if (std::isfinite(phi[j]) && res.x[j] > phi[j]) res.x[j] = phi[j];
  }
  res.obj = lp_objective(p, res.x);
  return res;
}

}  // namespace helio
