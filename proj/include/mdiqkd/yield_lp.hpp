#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mdiqkd/decoy.hpp"
#include "mdiqkd/fluctuation.hpp"
#include "mdiqkd/simplex.hpp"

// Independent linear-program oracle for the single-photon yield and error
// bounds. Yields Y_ij (and error-weighted yields Z_ij = e_ij Y_ij) for
// photon numbers up to a cutoff are free variables constrained by the
// Poisson-sum sandwich of every intensity pair; the oracle minimizes or
// maximizes Y11 (and maximizes Z11) over that polytope. It shares no code
// path with the closed-form bounds and is used to cross-check them.
//
// Tail treatment: photon-number mass above the cutoff is conservative in
// both directions. It may contribute up to its full Poisson weight (yield
// 1) toward a cell's observed gain, so lower constraints are relaxed by
// the tail mass; it contributes at least nothing, so upper constraints
// keep the truncated sum below the observed upper envelope.

namespace mdiqkd {

/// Poisson probabilities e^{-a} a^i / i! for i = 0..cutoff.
inline std::vector<double> poisson_weights(double mean, int cutoff) {
  std::vector<double> w(static_cast<std::size_t>(cutoff) + 1);
  w[0] = std::exp(-mean);
  for (int i = 1; i <= cutoff; ++i) w[i] = w[i - 1] * mean / i;
  return w;
}

/// Conditional yields and error rates per photon-number pair (i, j), with
/// i, j in 0..cutoff.
struct YieldGrid {
  int cutoff = 10;
  std::vector<double> yield;       // (cutoff+1)^2, row-major in i
  std::vector<double> error_rate;  // same shape

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (cutoff + 1) + j;
  }
  double y(int i, int j) const { return yield[index(i, j)]; }
  double e(int i, int j) const { return error_rate[index(i, j)]; }
};

inline void validate_grid(const YieldGrid& g) {
  const std::size_t n = static_cast<std::size_t>(g.cutoff + 1) * (g.cutoff + 1);
  if (g.yield.size() != n || g.error_rate.size() != n)
    throw std::invalid_argument("yield grid shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(g.yield[k] >= 0.0 && g.yield[k] <= 1.0))
      throw std::invalid_argument("yield out of [0,1]");
    const double ey = g.error_rate[k] * g.yield[k];
    if (!(ey >= 0.0 && ey <= g.yield[k]))
      throw std::invalid_argument("error-weighted yield out of [0, yield]");
  }
}

/// Gains and QBERs a yield grid produces for one basis via the truncated
/// Poisson double sum.
struct ForwardRates {
  Grid3 gains{};
  Grid3 qbers{};
};

inline ForwardRates forward_rates(const YieldGrid& grid, const IntensityTriple& ints) {
  validate_grid(grid);
  const std::array<double, 3> means{ints.signal, ints.decoy1, ints.decoy2};
  std::array<std::vector<double>, 3> w;
  for (std::size_t k = 0; k < 3; ++k) w[k] = poisson_weights(means[k], grid.cutoff);
  ForwardRates out;
  for (std::size_t ia = 0; ia < 3; ++ia) {
    for (std::size_t ib = 0; ib < 3; ++ib) {
      double q = 0.0, eq = 0.0;
      for (int i = 0; i <= grid.cutoff; ++i) {
        for (int j = 0; j <= grid.cutoff; ++j) {
          const double p = w[ia][i] * w[ib][j];
          q += p * grid.y(i, j);
          eq += p * grid.e(i, j) * grid.y(i, j);
        }
      }
      out.gains[ia][ib] = q;
      out.qbers[ia][ib] = q > 0.0 ? eq / q : 0.0;
    }
  }
  return out;
}

/// Sandwich intervals for one basis, consumed by the oracle.
struct BasisBounds {
  std::array<std::array<BoundCell, 3>, 3> cells{};  // [ia][ib]
};

inline BasisBounds basis_bounds(const BoundedRates& b, Basis w) {
  BasisBounds out;
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ib = 0; ib < 3; ++ib)
      out.cells[ia][ib] =
          b.cells.at(w, all_intensity_labels[ia], all_intensity_labels[ib]);
  return out;
}

/// Zero-width sandwich pinning each cell at exact gains/QBERs.
inline BasisBounds exact_basis_bounds(const Grid3& gains, const Grid3& qbers) {
  BasisBounds out;
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ib = 0; ib < 3; ++ib) {
      BoundCell& c = out.cells[ia][ib];
      c.gain_lo = c.gain_hi = gains[ia][ib];
      c.eq_lo = c.eq_hi = qbers[ia][ib] * gains[ia][ib];
    }
  return out;
}

struct YieldOracleResult {
  bool gain_feasible = false;   // the yield-only program admits a solution
  bool error_feasible = false;  // the joint yield/error program does too
  double y11_min = 0.0;
  double y11_max = 0.0;
  double z11_max = 0.0;  // max feasible e11 * Y11
  double e11_max = 1.0;  // z11_max / y11_min, clamped to [0,1]
};

namespace detail {

// Absolute slack added to every sandwich side; keeps near-equality
// constraint sets solvable in floating point and only loosens the bounds.
inline constexpr double kSandwichSlack = 1e-12;

struct OracleProblem {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::size_t y11_index = 0;
  std::size_t z11_index = 0;
};

inline OracleProblem build_oracle_problem(const BasisBounds& bounds,
                                          const IntensityTriple& ints, int cutoff,
                                          bool with_error_vars) {
  const std::size_t nv = static_cast<std::size_t>(cutoff + 1) * (cutoff + 1);
  OracleProblem p;
  p.num_vars = with_error_vars ? 2 * nv : nv;
  p.y11_index = static_cast<std::size_t>(cutoff + 1) + 1;
  p.z11_index = nv + p.y11_index;

  const std::array<double, 3> means{ints.signal, ints.decoy1, ints.decoy2};
  std::array<std::vector<double>, 3> w;
  for (std::size_t k = 0; k < 3; ++k) w[k] = poisson_weights(means[k], cutoff);

  auto add_sandwich = [&](std::size_t offset, double lo, double hi,
                          const std::vector<double>& wa, const std::vector<double>& wb,
                          double tail) {
    std::vector<double> row(p.num_vars, 0.0);
    for (int i = 0; i <= cutoff; ++i)
      for (int j = 0; j <= cutoff; ++j)
        row[offset + static_cast<std::size_t>(i) * (cutoff + 1) + j] = wa[i] * wb[j];
    p.rows.push_back(row);
    p.rhs.push_back(hi + kSandwichSlack);
    for (double& v : row) v = -v;
    p.rows.push_back(std::move(row));
    p.rhs.push_back(-(lo - tail) + kSandwichSlack);
  };

  for (std::size_t ia = 0; ia < 3; ++ia) {
    for (std::size_t ib = 0; ib < 3; ++ib) {
      double truncated = 0.0;
      for (int i = 0; i <= cutoff; ++i)
        for (int j = 0; j <= cutoff; ++j) truncated += w[ia][i] * w[ib][j];
      const double tail = 1.0 - truncated;
      const BoundCell& c = bounds.cells[ia][ib];
      add_sandwich(0, c.gain_lo, c.gain_hi, w[ia], w[ib], tail);
      if (with_error_vars) add_sandwich(nv, c.eq_lo, c.eq_hi, w[ia], w[ib], tail);
    }
  }

  // Box rows: Y_ij <= 1, and Z_ij <= Y_ij when error variables are present.
  for (std::size_t k = 0; k < nv; ++k) {
    std::vector<double> row(p.num_vars, 0.0);
    row[k] = 1.0;
    p.rows.push_back(std::move(row));
    p.rhs.push_back(1.0);
  }
  if (with_error_vars) {
    for (std::size_t k = 0; k < nv; ++k) {
      std::vector<double> row(p.num_vars, 0.0);
      row[nv + k] = 1.0;
      row[k] = -1.0;
      p.rows.push_back(std::move(row));
      p.rhs.push_back(0.0);
    }
  }
  return p;
}

}  // namespace detail

/// Solves the yield linear programs for one basis: minimum and maximum
/// feasible Y11 under the gain sandwiches, and (optionally) the maximum
/// feasible error-weighted yield Z11 = e11 Y11 under the joint gain/error
/// constraints. e11_max = z11_max / y11_min is a valid upper bound on the
/// single-photon error rate whenever y11_min > 0.
inline YieldOracleResult y11_oracle_lp(const BasisBounds& bounds,
                                       const IntensityTriple& ints, int cutoff = 10,
                                       bool with_error_bound = true) {
  if (cutoff < 5) throw std::invalid_argument("cutoff must be >= 5");
  if (!(ints.signal > ints.decoy1 && ints.decoy1 > ints.decoy2 && ints.decoy2 >= 0.0))
    throw std::invalid_argument("intensities must satisfy signal > decoy1 > decoy2 >= 0");

  YieldOracleResult r;
  const detail::OracleProblem yp =
      detail::build_oracle_problem(bounds, ints, cutoff, /*with_error_vars=*/false);

  std::vector<double> c(yp.num_vars, 0.0);
  c[yp.y11_index] = 1.0;
  lp::Solution lo = lp::minimize(c, yp.rows, yp.rhs);
  if (lo.status != lp::SolveStatus::optimal) return r;  // gain_feasible stays false
  c[yp.y11_index] = -1.0;
  lp::Solution hi = lp::minimize(c, yp.rows, yp.rhs);
  if (hi.status != lp::SolveStatus::optimal) return r;

  r.gain_feasible = true;
  r.y11_min = std::max(0.0, lo.objective);
  r.y11_max = std::min(1.0, -hi.objective);

  if (with_error_bound) {
    const detail::OracleProblem jp =
        detail::build_oracle_problem(bounds, ints, cutoff, /*with_error_vars=*/true);
    std::vector<double> cj(jp.num_vars, 0.0);
    cj[jp.z11_index] = -1.0;
    lp::Solution zs = lp::minimize(cj, jp.rows, jp.rhs);
    if (zs.status == lp::SolveStatus::optimal) {
      r.error_feasible = true;
      r.z11_max = std::max(0.0, -zs.objective);
      r.e11_max = r.y11_min > 0.0 ? std::min(1.0, r.z11_max / r.y11_min) : 1.0;
    }
  }
  return r;
}

}  // namespace mdiqkd
