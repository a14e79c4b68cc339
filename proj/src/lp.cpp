#include "homctl/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace homctl {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Shifted/split nonnegative variables standing in for one original variable.
struct VarMap {
  enum class Kind { shifted, mirrored, split } kind;
  int first = -1;   // w index
  int second = -1;  // second w index for split variables
  double shift = 0.0;
};

struct Tableau {
  Matrix t;                // m x (cols + 1), last column is the rhs
  std::vector<int> basis;  // basic column per row
  int cols = 0;

  double rhs(int i) const { return t(i, cols); }
};

// One Bland-rule simplex phase on the canonical tableau. Returns false when
// the entering column is unbounded.
bool run_phase(Tableau& tab, const Vector& cost, const std::vector<bool>& allowed,
               int& iterations) {
  const int m = static_cast<int>(tab.t.rows());
  for (;;) {
    if (++iterations > 1000000) {
      throw std::runtime_error("lp_solve: iteration cap exceeded");
    }
    // Reduced costs under the current basis; Bland: smallest eligible index.
    int entering = -1;
    for (int j = 0; j < tab.cols; ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      double reduced = cost(j);
      for (int i = 0; i < m; ++i) {
        reduced -= cost(tab.basis[static_cast<std::size_t>(i)]) * tab.t(i, j);
      }
      if (reduced < -kPivotTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return true;  // optimal

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tab.t(i, entering);
      if (a > kPivotTol) {
        const double ratio = tab.rhs(i) / a;
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && leaving >= 0 &&
             tab.basis[static_cast<std::size_t>(i)] <
                 tab.basis[static_cast<std::size_t>(leaving)])) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) return false;  // unbounded direction

    tab.t.row(leaving) /= tab.t(leaving, entering);
    for (int i = 0; i < m; ++i) {
      if (i != leaving && std::abs(tab.t(i, entering)) > 0.0) {
        tab.t.row(i) -= tab.t(i, entering) * tab.t.row(leaving);
      }
    }
    tab.basis[static_cast<std::size_t>(leaving)] = entering;
  }
}

}  // namespace

LpResult lp_solve(const LpProblem& p) {
  const int nv = p.variables();
  const int m = p.rows();
  if (p.ineq_lhs.rows() != m || p.ineq_lhs.cols() != nv || p.lower.size() != nv ||
      p.upper.size() != nv) {
    throw std::invalid_argument("lp_solve: inconsistent dimensions");
  }
  require_finite(p.ineq_lhs, "lp_solve: lhs");
  require_finite(p.ineq_rhs, "lp_solve: rhs");
  for (int j = 0; j < nv; ++j) {
    if (p.lower(j) > p.upper(j)) {
      throw std::invalid_argument("lp_solve: lower bound above upper bound");
    }
  }

  // Rewrite in nonnegative variables w.
  std::vector<VarMap> maps(static_cast<std::size_t>(nv));
  int nw = 0;
  int extra_rows = 0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nv; ++j) {
    auto& vm = maps[static_cast<std::size_t>(j)];
    const double lo = p.lower(j), hi = p.upper(j);
    if (lo > -inf) {
      vm = {VarMap::Kind::shifted, nw++, -1, lo};
      if (hi < inf) ++extra_rows;  // w <= hi - lo
    } else if (hi < inf) {
      vm = {VarMap::Kind::mirrored, nw++, -1, hi};  // v = hi - w
    } else {
      vm = {VarMap::Kind::split, nw, nw + 1, 0.0};
      nw += 2;
    }
  }

  const int rows = m + extra_rows;
  Matrix aw = Matrix::Zero(rows, nw);
  Vector bw = Vector::Zero(rows);
  for (int i = 0; i < m; ++i) {
    double shift_total = 0.0;
    for (int j = 0; j < nv; ++j) {
      const auto& vm = maps[static_cast<std::size_t>(j)];
      const double a = p.ineq_lhs(i, j);
      switch (vm.kind) {
        case VarMap::Kind::shifted:
          aw(i, vm.first) += a;
          shift_total += a * vm.shift;
          break;
        case VarMap::Kind::mirrored:
          aw(i, vm.first) -= a;
          shift_total += a * vm.shift;
          break;
        case VarMap::Kind::split:
          aw(i, vm.first) += a;
          aw(i, vm.second) -= a;
          break;
      }
    }
    bw(i) = p.ineq_rhs(i) - shift_total;
  }
  {
    int r = m;
    for (int j = 0; j < nv; ++j) {
      const auto& vm = maps[static_cast<std::size_t>(j)];
      if (vm.kind == VarMap::Kind::shifted && p.upper(j) < inf) {
        aw(r, vm.first) = 1.0;
        bw(r) = p.upper(j) - p.lower(j);
        ++r;
      }
    }
  }

  // Objective in w coordinates (constant part folded back at the end).
  Vector cw = Vector::Zero(nw);
  double c_const = 0.0;
  for (int j = 0; j < nv; ++j) {
    const auto& vm = maps[static_cast<std::size_t>(j)];
    const double c = p.objective(j);
    switch (vm.kind) {
      case VarMap::Kind::shifted:
        cw(vm.first) += c;
        c_const += c * vm.shift;
        break;
      case VarMap::Kind::mirrored:
        cw(vm.first) -= c;
        c_const += c * vm.shift;
        break;
      case VarMap::Kind::split:
        cw(vm.first) += c;
        cw(vm.second) -= c;
        break;
    }
  }

  // Canonical tableau with slack/surplus and artificial columns.
  std::vector<int> slack_sign(static_cast<std::size_t>(rows), 1);
  for (int i = 0; i < rows; ++i) {
    if (bw(i) < 0.0) {
      aw.row(i) *= -1.0;
      bw(i) *= -1.0;
      slack_sign[static_cast<std::size_t>(i)] = -1;
    }
  }
  int n_art = 0;
  for (int i = 0; i < rows; ++i) {
    if (slack_sign[static_cast<std::size_t>(i)] < 0) ++n_art;
  }
  const int cols = nw + rows + n_art;
  Tableau tab;
  tab.cols = cols;
  tab.t = Matrix::Zero(rows, cols + 1);
  tab.t.block(0, 0, rows, nw) = aw;
  tab.basis.resize(static_cast<std::size_t>(rows));
  int art = nw + rows;
  for (int i = 0; i < rows; ++i) {
    tab.t(i, nw + i) = static_cast<double>(slack_sign[static_cast<std::size_t>(i)]);
    if (slack_sign[static_cast<std::size_t>(i)] > 0) {
      tab.basis[static_cast<std::size_t>(i)] = nw + i;
    } else {
      tab.t(i, art) = 1.0;
      tab.basis[static_cast<std::size_t>(i)] = art;
      ++art;
    }
    tab.t(i, cols) = bw(i);
  }

  LpResult result;

  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);
  if (n_art > 0) {
    Vector phase1 = Vector::Zero(cols);
    for (int j = nw + rows; j < cols; ++j) phase1(j) = 1.0;
    if (!run_phase(tab, phase1, allowed, result.iterations)) {
      throw std::runtime_error("lp_solve: phase-1 unbounded (internal error)");
    }
    double art_sum = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] >= nw + rows) art_sum += tab.rhs(i);
    }
    if (art_sum > kFeasTol) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Pivot remaining (zero-valued) artificials out when possible.
    for (int i = 0; i < rows; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] >= nw + rows) {
        for (int j = 0; j < nw + rows; ++j) {
          if (std::abs(tab.t(i, j)) > kPivotTol) {
            tab.t.row(i) /= tab.t(i, j);
            for (int r = 0; r < rows; ++r) {
              if (r != i && std::abs(tab.t(r, j)) > 0.0) {
                tab.t.row(r) -= tab.t(r, j) * tab.t.row(i);
              }
            }
            tab.basis[static_cast<std::size_t>(i)] = j;
            break;
          }
        }
      }
    }
    for (int j = nw + rows; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  Vector cost = Vector::Zero(cols);
  cost.head(nw) = cw;
  if (!run_phase(tab, cost, allowed, result.iterations)) {
    result.status = LpStatus::unbounded;
    return result;
  }

  Vector w = Vector::Zero(nw);
  for (int i = 0; i < rows; ++i) {
    const int b = tab.basis[static_cast<std::size_t>(i)];
    if (b < nw) w(b) = tab.rhs(i);
  }
  Vector v(nv);
  for (int j = 0; j < nv; ++j) {
    const auto& vm = maps[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case VarMap::Kind::shifted:
        v(j) = vm.shift + w(vm.first);
        break;
      case VarMap::Kind::mirrored:
        v(j) = vm.shift - w(vm.first);
        break;
      case VarMap::Kind::split:
        v(j) = w(vm.first) - w(vm.second);
        break;
    }
  }
  result.status = LpStatus::optimal;
  result.solution = v;
  result.objective = p.objective.dot(v);
  (void)c_const;
  return result;
}

}  // namespace homctl
