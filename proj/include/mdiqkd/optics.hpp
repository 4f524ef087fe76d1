#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "mdiqkd/core.hpp"
#include "mdiqkd/rng.hpp"

// Exact coherent-state model of the optical train: polarization encoding,
// reference-frame misalignment, fiber loss, a 50:50 beam splitter followed
// by polarizing beam splitters, and threshold detectors with dark counts.
// Coherent states stay coherent through every linear stage and factorize
// across modes, so per-detector click probabilities are exact and
// independent; no approximation enters anywhere in this header.

namespace mdiqkd {

enum class Party : std::uint8_t { alice = 0, bob = 1 };

struct PulseDescriptor {
  Party party = Party::alice;
  IntensityClass intensity;
  Bb84State state;
  double global_phase = 0.0;  // uniform in [0, 2pi) under phase randomization
};

/// Complex amplitudes of the four optical modes, in sqrt(photon) units.
/// Before the beam splitter the spatial channels are Alice's and Bob's
/// fibers; after it they are the two output ports. Polarization is H then V
/// within each channel.
struct ModeAmplitudes {
  std::array<std::complex<double>, 4> amps{};

  static constexpr std::size_t index(Party ch, bool vertical) {
    return static_cast<std::size_t>(ch) * 2 + (vertical ? 1 : 0);
  }

  std::complex<double>& h(Party ch) { return amps[index(ch, false)]; }
  std::complex<double>& v(Party ch) { return amps[index(ch, true)]; }
  std::complex<double> h(Party ch) const { return amps[index(ch, false)]; }
  std::complex<double> v(Party ch) const { return amps[index(ch, true)]; }

  double total_energy() const {
    double e = 0.0;
    for (const auto& a : amps) e += std::norm(a);
    return e;
  }
};

// Detector mode order shared by click probabilities and click patterns.
inline constexpr std::size_t detector_d1h = 0;
inline constexpr std::size_t detector_d1v = 1;
inline constexpr std::size_t detector_d2h = 2;
inline constexpr std::size_t detector_d2v = 3;

inline constexpr std::array<std::string_view, 4> detector_names{"D1H", "D1V", "D2H",
                                                                "D2V"};

inline bool detector_is_active(std::size_t det, DetectorTopology topology) {
  return topology == DetectorTopology::full || det == detector_d1h ||
         det == detector_d1v;
}

/// Jones vector of a BB84 polarization state.
inline std::array<std::complex<double>, 2> jones_vector(Bb84State s) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  switch (polarization_of(s)) {
    case Polarization::horizontal: return {1.0, 0.0};
    case Polarization::vertical: return {0.0, 1.0};
    case Polarization::diagonal_plus: return {inv_sqrt2, inv_sqrt2};
    case Polarization::diagonal_minus: return {inv_sqrt2, -inv_sqrt2};
  }
  return {1.0, 0.0};
}

/// Coherent amplitudes emitted by one party:
/// sqrt(mean photon number) * e^{i phase} * jones(state), placed in that
/// party's spatial channel.
inline ModeAmplitudes encode_pulse(const PulseDescriptor& p) {
  if (!(p.intensity.mean_photon_number >= 0.0))
    throw std::invalid_argument("mean photon number must be nonnegative");
  const auto j = jones_vector(p.state);
  const std::complex<double> scale =
      std::sqrt(p.intensity.mean_photon_number) *
      std::exp(std::complex<double>(0.0, p.global_phase));
  ModeAmplitudes m;
  m.h(p.party) = scale * j[0];
  m.v(p.party) = scale * j[1];
  return m;
}

/// Reference-frame misalignment as a rotation about the H-V axis of the
/// Poincare sphere: the Jones unitary diag(1, e^{i theta}) with
/// theta = 2 asin(sqrt(e_d)) applied to one party's polarization pair.
/// Rectilinear amplitudes keep their magnitudes; a single photon prepared
/// in a diagonal state acquires exactly probability e_d of flipping to the
/// orthogonal diagonal state.
inline ModeAmplitudes apply_misalignment(const ModeAmplitudes& m, double e_d,
                                         Party channel = Party::alice) {
  if (!(e_d >= 0.0 && e_d <= 0.5))
    throw std::invalid_argument("misalignment error must lie in [0, 0.5]");
  const double theta = 2.0 * std::asin(std::sqrt(e_d));
  ModeAmplitudes out = m;
  out.v(channel) *= std::exp(std::complex<double>(0.0, theta));
  return out;
}

/// Pure loss: every amplitude scaled by sqrt(eta).
inline ModeAmplitudes apply_loss(const ModeAmplitudes& m, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("transmittance must lie in (0,1]");
  ModeAmplitudes out = m;
  const double s = std::sqrt(eta);
  for (auto& a : out.amps) a *= s;
  return out;
}

/// 50:50 beam splitter (symmetric convention, i on the cross terms) acting
/// per polarization, followed by polarizing beam splitters that route each
/// output port's H and V components to separate detectors:
///   out1 = (a + i b)/sqrt2 -> D1H, D1V
///   out2 = (i a + b)/sqrt2 -> D2H, D2V
/// Energy is conserved exactly. Inputs must occupy disjoint spatial
/// channels.
inline ModeAmplitudes bsm_output_amplitudes(const ModeAmplitudes& alice,
                                            const ModeAmplitudes& bob) {
  for (std::size_t k = 0; k < 4; ++k)
    if (std::norm(alice.amps[k]) > 0.0 && std::norm(bob.amps[k]) > 0.0)
      throw std::invalid_argument("BSM inputs must occupy disjoint spatial channels");
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  constexpr std::complex<double> i_unit(0.0, 1.0);
  ModeAmplitudes out;
  for (bool vertical : {false, true}) {
    const std::size_t ka = ModeAmplitudes::index(Party::alice, vertical);
    const std::size_t kb = ModeAmplitudes::index(Party::bob, vertical);
    const std::complex<double> a = alice.amps[ka] + bob.amps[ka];
    const std::complex<double> b = alice.amps[kb] + bob.amps[kb];
    const std::size_t d1 = vertical ? detector_d1v : detector_d1h;
    const std::size_t d2 = vertical ? detector_d2v : detector_d2h;
    out.amps[d1] = inv_sqrt2 * (a + i_unit * b);
    out.amps[d2] = inv_sqrt2 * (i_unit * a + b);
  }
  return out;
}

struct DetectorClickProbabilities {
  std::array<double, 4> p{};  // D1H, D1V, D2H, D2V; inactive detectors get 0
};

/// Threshold-detector click probability per active detector:
/// p = 1 - (1 - p_dark) * exp(-eta_det |alpha|^2). Exact and independent
/// across detectors for coherent-state inputs.
inline DetectorClickProbabilities click_probabilities(const ModeAmplitudes& out,
                                                      const DetectorParams& det) {
  DetectorClickProbabilities r;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!detector_is_active(k, det.active)) continue;
    const double mean_photons = std::norm(out.amps[k]);
    r.p[k] = 1.0 - (1.0 - det.dark_count_probability) *
                       std::exp(-det.efficiency * mean_photons);
  }
  return r;
}

struct ClickPattern {
  std::array<bool, 4> clicks{};  // D1H, D1V, D2H, D2V; inactive always false
};

enum class CoincidenceClass : std::uint8_t { psi_plus, psi_minus, none };

constexpr std::string_view to_string(CoincidenceClass c) {
  switch (c) {
    case CoincidenceClass::psi_plus: return "psi_plus";
    case CoincidenceClass::psi_minus: return "psi_minus";
    case CoincidenceClass::none: return "none";
  }
  return "?";
}

/// Exactly D1H+D1V or D2H+D2V -> psi_plus; exactly D1H+D2V or D1V+D2H ->
/// psi_minus; every other pattern, including three or more clicks, is
/// discarded.
inline CoincidenceClass classify_coincidence(const ClickPattern& c,
                                             const DetectorParams& det) {
  for (std::size_t k = 0; k < 4; ++k)
    if (c.clicks[k] && !detector_is_active(k, det.active))
      throw std::invalid_argument("click on inactive detector");
  const bool d1h = c.clicks[detector_d1h], d1v = c.clicks[detector_d1v];
  const bool d2h = c.clicks[detector_d2h], d2v = c.clicks[detector_d2v];
  const int total = int(d1h) + int(d1v) + int(d2h) + int(d2v);
  if (total != 2) return CoincidenceClass::none;
  if ((d1h && d1v) || (d2h && d2v)) return CoincidenceClass::psi_plus;
  if ((d1h && d2v) || (d1v && d2h)) return CoincidenceClass::psi_minus;
  return CoincidenceClass::none;  // same-polarization pair across ports
}

/// QBER convention for a successful projection when both parties used
/// basis `w`: psi_plus is anticorrelated in Z and correlated in X;
/// psi_minus is anticorrelated in both bases.
constexpr bool is_error(CoincidenceClass outcome, Basis w, unsigned bit_a,
                        unsigned bit_b) {
  const bool same = (bit_a == bit_b);
  if (outcome == CoincidenceClass::psi_plus) return w == Basis::Z ? same : !same;
  if (outcome == CoincidenceClass::psi_minus) return same;
  return false;
}

struct TrialOutcome {
  CoincidenceClass outcome = CoincidenceClass::none;
  bool error = false;
};

/// One physical trial: encode both pulses, misalign Alice's frame, apply
/// per-side loss, interfere, draw independent Bernoulli clicks (order D1H,
/// D1V, D2H, D2V over active detectors), classify. The error flag follows
/// is_error and is meaningful only when the two bases match.
inline TrialOutcome simulate_trial(const PulseDescriptor& a, const PulseDescriptor& b,
                                   const ChannelParams& ch, const DetectorParams& det,
                                   RandomStream& rng) {
  const double eta = ch.transmittance();
  const ModeAmplitudes alice =
      apply_loss(apply_misalignment(encode_pulse(a), ch.misalignment_error), eta);
  const ModeAmplitudes bob = apply_loss(encode_pulse(b), eta);
  const DetectorClickProbabilities probs =
      click_probabilities(bsm_output_amplitudes(alice, bob), det);

  ClickPattern pattern;
  for (std::size_t k = 0; k < 4; ++k)
    if (detector_is_active(k, det.active)) pattern.clicks[k] = rng.bernoulli(probs.p[k]);

  TrialOutcome r;
  r.outcome = classify_coincidence(pattern, det);
  if (r.outcome != CoincidenceClass::none && a.state.basis == b.state.basis)
    r.error = is_error(r.outcome, a.state.basis, a.state.bit, b.state.bit);
  return r;
}

}  // namespace mdiqkd
