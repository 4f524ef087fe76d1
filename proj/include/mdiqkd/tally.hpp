#pragma once

#include <cstdint>
#include <stdexcept>

#include "mdiqkd/core.hpp"

// Detection statistics per (basis, intensity_A, intensity_B) cell and the
// rate (gain/QBER) view of the same data.

namespace mdiqkd {

struct TallyCell {
  std::uint64_t sent = 0;
  std::uint64_t coincidences = 0;
  std::uint64_t errors = 0;

  friend bool operator==(const TallyCell&, const TallyCell&) = default;
};

struct TallyMatrix {
  PairGrid<TallyCell> cells;

  void record(Basis w, IntensityLabel ia, IntensityLabel ib, bool coincidence,
              bool error) {
    TallyCell& c = cells.at(w, ia, ib);
    c.sent += 1;
    if (coincidence) {
      c.coincidences += 1;
      if (error) c.errors += 1;
    }
  }

  /// Q^W_{IA IB} = coincidences / sent (0 when nothing was sent).
  double gain(Basis w, IntensityLabel ia, IntensityLabel ib) const {
    const TallyCell& c = cells.at(w, ia, ib);
    return c.sent == 0 ? 0.0
                       : static_cast<double>(c.coincidences) / static_cast<double>(c.sent);
  }

  /// E^W_{IA IB} = errors / coincidences (0 when there are no coincidences).
  double qber(Basis w, IntensityLabel ia, IntensityLabel ib) const {
    const TallyCell& c = cells.at(w, ia, ib);
    return c.coincidences == 0
               ? 0.0
               : static_cast<double>(c.errors) / static_cast<double>(c.coincidences);
  }

  friend bool operator==(const TallyMatrix&, const TallyMatrix&) = default;
};

/// Cellwise sum; associative and commutative, the designated reduction
/// operator for concurrent accumulation.
inline TallyMatrix merge(const TallyMatrix& a, const TallyMatrix& b) {
  TallyMatrix out = a;
  out.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, TallyCell& c) {
    const TallyCell& o = b.cells.at(w, ia, ib);
    c.sent += o.sent;
    c.coincidences += o.coincidences;
    c.errors += o.errors;
  });
  return out;
}

/// Integer-free view of a tally: gains, QBERs, and the (possibly expected,
/// hence fractional) number of pulses behind each cell.
struct RateCell {
  double gain = 0.0;
  double qber = 0.0;
  double sent = 0.0;
};

struct RateMatrix {
  PairGrid<RateCell> cells;
};

inline RateMatrix rates_of(const TallyMatrix& t) {
  RateMatrix out;
  out.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, RateCell& c) {
    c.gain = t.gain(w, ia, ib);
    c.qber = t.qber(w, ia, ib);
    c.sent = static_cast<double>(t.cells.at(w, ia, ib).sent);
  });
  return out;
}

/// Reconstructs a rate view from complete 3x3x2 gain and QBER tables plus
/// per-cell pulse counts. Throws on values outside [0,1].
inline RateMatrix from_tables(const PairGrid<double>& gains, const PairGrid<double>& qbers,
                              const PairGrid<double>& counts) {
  RateMatrix out;
  out.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, RateCell& c) {
    const double q = gains.at(w, ia, ib);
    const double e = qbers.at(w, ia, ib);
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("gain out of [0,1] in cell " +
                                  std::string(to_string(w)));
    if (!(e >= 0.0 && e <= 1.0))
      throw std::invalid_argument("qber out of [0,1] in cell " +
                                  std::string(to_string(w)));
    c.gain = q;
    c.qber = e;
    c.sent = counts.at(w, ia, ib);
  });
  return out;
}

struct RateTables {
  PairGrid<double> gains;
  PairGrid<double> qbers;
  PairGrid<double> counts;
};

inline RateTables to_tables(const RateMatrix& m) {
  RateTables t;
  m.cells.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, const RateCell& c) {
    t.gains.at(w, ia, ib) = c.gain;
    t.qbers.at(w, ia, ib) = c.qber;
    t.counts.at(w, ia, ib) = c.sent;
  });
  return t;
}

}  // namespace mdiqkd
