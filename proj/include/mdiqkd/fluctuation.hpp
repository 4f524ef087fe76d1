#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdiqkd/core.hpp"
#include "mdiqkd/tally.hpp"

// Gaussian statistical-fluctuation envelopes around measured gains and
// error-weighted gains: the n_alpha-standard-deviation model
//   Q^{L/U}  = Q  * (1 -/+ n_alpha / sqrt(N Q))
//   EQ^{L/U} = EQ * (1 -/+ n_alpha / sqrt(N E Q))
// with lower envelopes clamped at zero.

namespace mdiqkd {

struct FluctuationConfig {
  double n_alpha = 3.0;           // number of standard deviations
  double security_epsilon = 1e-3; // informational label for n_alpha = 3
};

struct BoundCell {
  double gain_lo = 0.0;
  double gain_hi = 0.0;
  double eq_lo = 0.0;  // lower envelope of E*Q
  double eq_hi = 0.0;
};

enum class BoundMode : std::uint8_t { infinite_key, finite_n_alpha };

struct BoundedRates {
  PairGrid<BoundCell> cells;
  BoundMode mode = BoundMode::finite_n_alpha;
};

/// Envelopes for one observed rate given the pulses behind it. A cell with
/// zero observed rate has an undefined relative deviation, so its upper
/// envelope falls back to the rate of a single count, 1/N, widened by
/// (1 + n_alpha).
inline std::pair<double, double> fluctuation_envelope(double rate, double pulses,
                                                      double n_alpha) {
  if (rate == 0.0) {
    const double surrogate = pulses > 0.0 ? (1.0 / pulses) * (1.0 + n_alpha) : 0.0;
    return {0.0, surrogate};
  }
  const double rel = n_alpha / std::sqrt(pulses * rate);
  return {std::max(0.0, rate * (1.0 - rel)), rate * (1.0 + rel)};
}

inline BoundedRates fluct_bounds(const RateMatrix& rates, const PairGrid<double>& counts,
                                 const FluctuationConfig& cfg) {
  if (!(cfg.n_alpha >= 0.0)) throw std::invalid_argument("n_alpha must be nonnegative");
  BoundedRates out;
  out.mode = BoundMode::finite_n_alpha;
  out.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, BoundCell& c) {
    const RateCell& r = rates.cells.at(w, ia, ib);
    const double n = counts.at(w, ia, ib);
    if (n < 0.0) throw std::invalid_argument("negative pulse count");
    if (n == 0.0 && r.gain > 0.0)
      throw std::invalid_argument("nonzero tally in a cell with zero pulses");
    std::tie(c.gain_lo, c.gain_hi) = fluctuation_envelope(r.gain, n, cfg.n_alpha);
    std::tie(c.eq_lo, c.eq_hi) = fluctuation_envelope(r.qber * r.gain, n, cfg.n_alpha);
  });
  return out;
}

/// Zero-width bounds that pin every cell at its observed value; the
/// infinite-key view of a rate matrix.
inline BoundedRates exact_bounds(const RateMatrix& rates) {
  BoundedRates out;
  out.mode = BoundMode::infinite_key;
  out.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, BoundCell& c) {
    const RateCell& r = rates.cells.at(w, ia, ib);
    c.gain_lo = c.gain_hi = r.gain;
    c.eq_lo = c.eq_hi = r.qber * r.gain;
  });
  return out;
}

}  // namespace mdiqkd
