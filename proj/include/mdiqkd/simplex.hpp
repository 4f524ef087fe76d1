#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

// Dense two-phase primal simplex for small linear programs:
//
//   minimize c.x  subject to  A x <= b,  x >= 0.
//
// Rows are scaled to unit max coefficient before solving. Rows with
// negative right-hand side get an artificial variable and phase 1
// minimizes the artificial sum; phase 2 then optimizes c over the feasible
// basis. Entering columns use Dantzig pricing with a permanent switch to
// Bland's rule after a stall budget, which guarantees termination.
// Problem sizes here are a few hundred rows/columns, so O(m n) pivots are
// fine.

namespace mdiqkd::lp {

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
  SolveStatus status = SolveStatus::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;
};

class DenseSimplex {
 public:
  DenseSimplex(std::vector<double> c, std::vector<std::vector<double>> a,
               std::vector<double> b)
      : c_(std::move(c)), a_(std::move(a)), b_(std::move(b)) {
    n_ = c_.size();
    m_ = a_.size();
    if (b_.size() != m_) throw std::invalid_argument("rhs size mismatch");
    for (const auto& row : a_)
      if (row.size() != n_) throw std::invalid_argument("row size mismatch");
  }

  Solution solve() {
    scale_rows();
    build_tableau();
    // Phase 1: drive the artificial sum to zero.
    if (num_artificial_ > 0) {
      if (!iterate(/*phase1=*/true)) return {SolveStatus::iteration_limit, 0.0, {}};
      const double infeas = phase_objective(true);
      if (infeas > feasibility_tolerance()) return {SolveStatus::infeasible, 0.0, {}};
      purge_basic_artificials();
    }
    allow_artificials_ = false;
    if (!iterate(/*phase1=*/false)) return {SolveStatus::iteration_limit, 0.0, {}};
    if (unbounded_) return {SolveStatus::unbounded, 0.0, {}};

    Solution s;
    s.status = SolveStatus::optimal;
    s.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) s.x[basis_[i]] = rhs_[i];
    for (std::size_t j = 0; j < n_; ++j) s.objective += c_[j] * s.x[j];
    return s;
  }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-10;

  double feasibility_tolerance() const {
    double scale = 1.0;
    for (double v : rhs0_) scale = std::max(scale, std::abs(v));
    return 1e-9 * scale;
  }

  void scale_rows() {
    for (std::size_t i = 0; i < m_; ++i) {
      double mx = 0.0;
      for (double v : a_[i]) mx = std::max(mx, std::abs(v));
      if (mx > 0.0) {
        for (double& v : a_[i]) v /= mx;
        b_[i] /= mx;
      }
    }
  }

  void build_tableau() {
    // Column layout: structural (n) | slack (m) | artificial | end.
    num_artificial_ = 0;
    for (std::size_t i = 0; i < m_; ++i)
      if (b_[i] < 0.0) ++num_artificial_;
    width_ = n_ + m_ + num_artificial_;
    tab_.assign(m_, std::vector<double>(width_, 0.0));
    rhs_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    is_artificial_.assign(width_, false);

    std::size_t next_art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b_[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * a_[i][j];
      tab_[i][n_ + i] = sign;  // slack
      rhs_[i] = sign * b_[i];
      if (sign < 0.0) {
        tab_[i][next_art] = 1.0;
        is_artificial_[next_art] = true;
        basis_[i] = next_art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
    rhs0_ = rhs_;

    // Reduced-cost rows for both phases, canonical w.r.t. the start basis.
    cost1_.assign(width_, 0.0);
    for (std::size_t j = n_ + m_; j < width_; ++j) cost1_[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (is_artificial_[basis_[i]]) add_row_to_cost(cost1_, i, -1.0);
    cost2_.assign(width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost2_[j] = c_[j];
    // Start basis contains only slacks/artificials with zero phase-2 cost,
    // so cost2_ is already canonical.
    allow_artificials_ = true;
    unbounded_ = false;
  }

  void add_row_to_cost(std::vector<double>& cost, std::size_t row, double factor) {
    for (std::size_t j = 0; j < width_; ++j) cost[j] += factor * tab_[row][j];
  }

  double phase_objective(bool phase1) const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t k = basis_[i];
      if (phase1) {
        if (is_artificial_[k]) v += rhs_[i];
      } else if (k < n_) {
        v += c_[k] * rhs_[i];
      }
    }
    return v;
  }

  bool column_allowed(std::size_t j, bool phase1) const {
    if (is_artificial_[j]) return phase1 && allow_artificials_;
    return true;
  }

  long entering_column(const std::vector<double>& cost, bool phase1, bool bland) const {
    long best = -1;
    double best_val = -kCostTol;
    for (std::size_t j = 0; j < width_; ++j) {
      if (!column_allowed(j, phase1)) continue;
      if (cost[j] < -kCostTol) {
        if (bland) return static_cast<long>(j);
        if (cost[j] < best_val) {
          best_val = cost[j];
          best = static_cast<long>(j);
        }
      }
    }
    return best;
  }

  long leaving_row(std::size_t enter) const {
    long best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = tab_[i][enter];
      if (a > kPivotTol) {
        const double ratio = rhs_[i] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (best < 0 || basis_[i] < basis_[static_cast<std::size_t>(best)]))) {
          best_ratio = ratio;
          best = static_cast<long>(i);
        }
      }
    }
    return best;
  }

  void pivot(std::size_t row, std::size_t col, bool phase1) {
    const double p = tab_[row][col];
    for (std::size_t j = 0; j < width_; ++j) tab_[row][j] /= p;
    rhs_[row] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) tab_[i][j] -= f * tab_[row][j];
      rhs_[i] -= f * rhs_[row];
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-11) rhs_[i] = 0.0;
    }
    for (auto* cost : {&cost1_, &cost2_}) {
      const double f = (*cost)[col];
      if (f != 0.0)
        for (std::size_t j = 0; j < width_; ++j) (*cost)[j] -= f * tab_[row][j];
    }
    basis_[row] = col;
    if (!phase1 && rhs_[row] < 0.0) rhs_[row] = 0.0;
  }

  // Artificials still basic after phase 1 sit at value zero. Pivot each out
  // on any usable structural/slack column so phase 2 cannot regrow them; a
  // row with no such column is redundant and gets zeroed instead.
  void purge_basic_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial_[basis_[i]]) continue;
      long col = -1;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::abs(tab_[i][j]) > kPivotTol) {
          col = static_cast<long>(j);
          break;
        }
      }
      if (col >= 0) {
        pivot(i, static_cast<std::size_t>(col), /*phase1=*/true);
      } else {
        for (std::size_t j = 0; j < width_; ++j)
          if (!is_artificial_[j]) tab_[i][j] = 0.0;
        rhs_[i] = 0.0;
      }
    }
  }

  bool iterate(bool phase1) {
    const std::vector<double>& cost = phase1 ? cost1_ : cost2_;
    const std::size_t bland_after = 20 * (m_ + width_);
    const std::size_t max_iters = 400 * (m_ + width_);
    for (std::size_t it = 0; it < max_iters; ++it) {
      const bool bland = it >= bland_after;
      const long enter = entering_column(cost, phase1, bland);
      if (enter < 0) return true;  // optimal for this phase
      const long leave = leaving_row(static_cast<std::size_t>(enter));
      if (leave < 0) {
        if (phase1) return true;  // cannot happen with bounded artificials
        unbounded_ = true;
        return true;
      }
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter), phase1);
    }
    return false;
  }

  std::vector<double> c_;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::size_t n_ = 0, m_ = 0, width_ = 0, num_artificial_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<double> rhs_, rhs0_, cost1_, cost2_;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_artificial_;
  bool allow_artificials_ = true;
  bool unbounded_ = false;
};

inline Solution minimize(std::vector<double> c, std::vector<std::vector<double>> a,
                         std::vector<double> b) {
  return DenseSimplex(std::move(c), std::move(a), std::move(b)).solve();
}

}  // namespace mdiqkd::lp
