#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Core value types shared by every module: intensity classes, bases,
// BB84 states, protocol/channel/detector configuration, and the expected
// allocation of pulse-pair counts across (basis, intensity, intensity)
// cells. All types are immutable values and safe to copy across threads.

namespace mdiqkd {

enum class IntensityLabel : std::uint8_t { signal = 0, decoy1 = 1, decoy2 = 2 };

inline constexpr std::array<IntensityLabel, 3> all_intensity_labels{
    IntensityLabel::signal, IntensityLabel::decoy1, IntensityLabel::decoy2};

constexpr std::string_view to_string(IntensityLabel label) {
  switch (label) {
    case IntensityLabel::signal: return "signal";
    case IntensityLabel::decoy1: return "decoy1";
    case IntensityLabel::decoy2: return "decoy2";
  }
  return "?";
}

inline std::optional<IntensityLabel> parse_intensity_label(std::string_view s) {
  if (s == "signal") return IntensityLabel::signal;
  if (s == "decoy1") return IntensityLabel::decoy1;
  if (s == "decoy2") return IntensityLabel::decoy2;
  return std::nullopt;
}

struct IntensityClass {
  IntensityLabel label = IntensityLabel::signal;
  double mean_photon_number = 0.0;  // photons per pulse
};

enum class Basis : std::uint8_t { Z = 0, X = 1 };  // rectilinear / diagonal

inline constexpr std::array<Basis, 2> all_bases{Basis::Z, Basis::X};

constexpr std::string_view to_string(Basis w) {
  return w == Basis::Z ? "Z" : "X";
}

inline std::optional<Basis> parse_basis(std::string_view s) {
  if (s == "Z" || s == "z") return Basis::Z;
  if (s == "X" || s == "x") return Basis::X;
  return std::nullopt;
}

enum class Polarization : std::uint8_t {
  horizontal,      // H = (Z, 0)
  vertical,        // V = (Z, 1)
  diagonal_plus,   // + = (X, 0)
  diagonal_minus,  // - = (X, 1)
};

struct Bb84State {
  Basis basis = Basis::Z;
  std::uint8_t bit = 0;  // 0 or 1

  friend bool operator==(const Bb84State&, const Bb84State&) = default;
};

constexpr Polarization polarization_of(Bb84State s) {
  if (s.basis == Basis::Z)
    return s.bit == 0 ? Polarization::horizontal : Polarization::vertical;
  return s.bit == 0 ? Polarization::diagonal_plus : Polarization::diagonal_minus;
}

constexpr Bb84State state_of(Polarization p) {
  switch (p) {
    case Polarization::horizontal: return {Basis::Z, 0};
    case Polarization::vertical: return {Basis::Z, 1};
    case Polarization::diagonal_plus: return {Basis::X, 0};
    case Polarization::diagonal_minus: return {Basis::X, 1};
  }
  return {Basis::Z, 0};
}

/// Basis-choice probability that makes signal-signal rectilinear slots 1.1%
/// of all emitted pairs under the default 4:9:7 intensity split. Derived
/// default, exposed as ordinary configuration: sqrt(0.011) / 0.2.
inline constexpr double derived_default_basis_probability_z = 0.52440442408507577;

struct ProtocolConfig {
  // Ordered signal > decoy1 > decoy2; labels must match the slot.
  std::array<IntensityClass, 3> intensities{{{IntensityLabel::signal, 0.3},
                                             {IntensityLabel::decoy1, 0.1},
                                             {IntensityLabel::decoy2, 0.01}}};
  // Probability of emitting each intensity class; the default is the
  // 4:9:7 split normalized.
  std::array<double, 3> intensity_probabilities{0.2, 0.45, 0.35};
  double basis_probability_z = derived_default_basis_probability_z;  // per party
  std::uint64_t total_pulses = 169'000'000'000ull;                   // N
  double repetition_rate_hz = 500e3;                                 // informational

  double mean_photon_number(IntensityLabel label) const {
    return intensities[static_cast<std::size_t>(label)].mean_photon_number;
  }
  double intensity_probability(IntensityLabel label) const {
    return intensity_probabilities[static_cast<std::size_t>(label)];
  }
};

struct ChannelParams {
  double fiber_length_each_side_km = 5.0;
  double attenuation_db_per_km = 0.2;
  double misalignment_error = 0.01;  // e_d, X-basis single-photon error prob

  /// One-sided channel transmittance 10^(-attenuation * length / 10).
  double transmittance() const {
    return std::pow(10.0, -attenuation_db_per_km * fiber_length_each_side_km / 10.0);
  }
};

enum class DetectorTopology : std::uint8_t {
  one_pbs,  // detectors D1H, D1V only (single polarizing beam splitter read out)
  full,     // all four detectors
};

constexpr std::string_view to_string(DetectorTopology t) {
  return t == DetectorTopology::one_pbs ? "one_pbs" : "full";
}

inline std::optional<DetectorTopology> parse_detector_topology(std::string_view s) {
  if (s == "one_pbs") return DetectorTopology::one_pbs;
  if (s == "full") return DetectorTopology::full;
  return std::nullopt;
}

struct DetectorParams {
  double efficiency = 0.1;                // eta_det
  double dark_count_probability = 5e-5;   // per gate per detector
  DetectorTopology active = DetectorTopology::one_pbs;
};

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every ProtocolConfig invariant; diagnostics are the return value.
inline ValidationResult validate_config(const ProtocolConfig& cfg) {
  ValidationResult r;
  const double mu = cfg.intensities[0].mean_photon_number;
  const double nu = cfg.intensities[1].mean_photon_number;
  const double omega = cfg.intensities[2].mean_photon_number;
  for (std::size_t i = 0; i < 3; ++i) {
    if (cfg.intensities[i].label != all_intensity_labels[i])
      r.violations.push_back("intensity slot " + std::to_string(i) + " has wrong label");
    if (!std::isfinite(cfg.intensities[i].mean_photon_number))
      r.violations.push_back("mean photon numbers must be finite");
  }
  if (!(mu > nu)) r.violations.push_back("signal must exceed decoy1");
  if (!(nu > omega)) r.violations.push_back("decoy1 must exceed decoy2");
  if (!(omega >= 0.0)) r.violations.push_back("decoy2 must be nonnegative");
  double prob_sum = 0.0;
  for (double p : cfg.intensity_probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p))
      r.violations.push_back("intensity probabilities must be nonnegative");
    prob_sum += p;
  }
  if (std::abs(prob_sum - 1.0) > 1e-12)
    r.violations.push_back("probabilities must sum to 1");
  if (!(cfg.basis_probability_z > 0.0 && cfg.basis_probability_z < 1.0))
    r.violations.push_back("basis_probability_z must lie in (0,1)");
  if (cfg.total_pulses < 1) r.violations.push_back("total_pulses must be >= 1");
  return r;
}

inline ValidationResult validate_channel(const ChannelParams& ch) {
  ValidationResult r;
  if (!(ch.fiber_length_each_side_km >= 0.0))
    r.violations.push_back("fiber length must be nonnegative");
  if (!(ch.attenuation_db_per_km >= 0.0))
    r.violations.push_back("attenuation must be nonnegative");
  const double eta = ch.transmittance();
  if (!(eta > 0.0 && eta <= 1.0))
    r.violations.push_back("channel transmittance must lie in (0,1]");
  if (!(ch.misalignment_error >= 0.0 && ch.misalignment_error <= 0.5))
    r.violations.push_back("misalignment_error must lie in [0, 0.5]");
  return r;
}

inline ValidationResult validate_detector(const DetectorParams& det) {
  ValidationResult r;
  if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0))
    r.violations.push_back("detector efficiency must lie in [0,1]");
  if (!(det.dark_count_probability >= 0.0 && det.dark_count_probability < 1.0))
    r.violations.push_back("dark_count_probability must lie in [0,1)");
  return r;
}

/// One value per (basis, intensity_A, intensity_B) cell, basis-major then
/// A-intensity-major. The canonical cell order used everywhere, including
/// CSV output.
template <typename T>
struct PairGrid {
  std::array<T, 18> cells{};

  static constexpr std::size_t index(Basis w, IntensityLabel ia, IntensityLabel ib) {
    return static_cast<std::size_t>(w) * 9 + static_cast<std::size_t>(ia) * 3 +
           static_cast<std::size_t>(ib);
  }

  T& at(Basis w, IntensityLabel ia, IntensityLabel ib) { return cells[index(w, ia, ib)]; }
  const T& at(Basis w, IntensityLabel ia, IntensityLabel ib) const {
    return cells[index(w, ia, ib)];
  }

  template <typename F>
  void for_each(F&& f) {
    for (Basis w : all_bases)
      for (IntensityLabel ia : all_intensity_labels)
        for (IntensityLabel ib : all_intensity_labels) f(w, ia, ib, at(w, ia, ib));
  }
  template <typename F>
  void for_each(F&& f) const {
    for (Basis w : all_bases)
      for (IntensityLabel ia : all_intensity_labels)
        for (IntensityLabel ib : all_intensity_labels) f(w, ia, ib, at(w, ia, ib));
  }

  friend bool operator==(const PairGrid&, const PairGrid&) = default;
};

/// Expected number of pulse pairs landing in each matched-basis cell:
/// N^W_{IA IB} = N * p(IA) * p(IB) * p(W)^2, with p(Z) the configured
/// per-party basis probability. Slots where the two parties pick different
/// bases belong to no cell, so the 18 entries sum to
/// N * (p(Z)^2 + p(X)^2), and to N only once the mixed-basis mass is
/// added back.
inline PairGrid<double> pair_pulse_counts(const ProtocolConfig& cfg) {
  PairGrid<double> out;
  const double n = static_cast<double>(cfg.total_pulses);
  const double pz = cfg.basis_probability_z;
  out.for_each([&](Basis w, IntensityLabel ia, IntensityLabel ib, double& cell) {
    const double pw = (w == Basis::Z) ? pz : 1.0 - pz;
    cell = n * cfg.intensity_probability(ia) * cfg.intensity_probability(ib) * pw * pw;
  });
  return out;
}

}  // namespace mdiqkd
