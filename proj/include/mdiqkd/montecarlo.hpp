#pragma once

#include <cstdint>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mdiqkd/core.hpp"
#include "mdiqkd/optics.hpp"
#include "mdiqkd/rng.hpp"
#include "mdiqkd/tally.hpp"

// Sampling and expectation engines over the optical model. Both tally into
// the same matched-basis cell structure; mixed-basis slots are counted
// nowhere (they are discarded at sifting).

namespace mdiqkd {

struct SlotDraw {
  IntensityLabel intensity = IntensityLabel::signal;
  Basis basis = Basis::Z;
  std::uint8_t bit = 0;
  double phase = 0.0;
};

// Random-stream lanes. Lane = party for pulse draws; detector Bernoullis
// use their own lane so pulse draws stay aligned across detector setups.
inline constexpr std::uint64_t lane_alice = 0;
inline constexpr std::uint64_t lane_bob = 1;
inline constexpr std::uint64_t lane_detection = 2;

/// The per-slot pulse draw for one party. Consumes exactly four uniforms
/// from the (seed, slot, party-lane) stream, in the order intensity, basis,
/// bit, phase. This ordering is part of the determinism contract.
inline SlotDraw draw_pulse(const ProtocolConfig& cfg, std::uint64_t seed,
                           std::uint64_t slot, Party party) {
  RandomStream rng = make_stream(
      seed, slot, party == Party::alice ? lane_alice : lane_bob);
  SlotDraw d;
  const double u_int = rng.uniform();
  if (u_int < cfg.intensity_probabilities[0])
    d.intensity = IntensityLabel::signal;
  else if (u_int < cfg.intensity_probabilities[0] + cfg.intensity_probabilities[1])
    d.intensity = IntensityLabel::decoy1;
  else
    d.intensity = IntensityLabel::decoy2;
  d.basis = rng.uniform() < cfg.basis_probability_z ? Basis::Z : Basis::X;
  d.bit = rng.uniform() < 0.5 ? 0 : 1;
  d.phase = rng.uniform() * 2.0 * std::numbers::pi;
  return d;
}

inline PulseDescriptor to_descriptor(const ProtocolConfig& cfg, const SlotDraw& d,
                                     Party party) {
  return PulseDescriptor{party,
                         cfg.intensities[static_cast<std::size_t>(d.intensity)],
                         Bb84State{d.basis, d.bit}, d.phase};
}

/// Runs one slot end to end and tallies it (matched-basis slots only).
inline void run_slot(const ProtocolConfig& cfg, const ChannelParams& ch,
                     const DetectorParams& det, std::uint64_t seed, std::uint64_t slot,
                     TallyMatrix& tally) {
  const SlotDraw da = draw_pulse(cfg, seed, slot, Party::alice);
  const SlotDraw db = draw_pulse(cfg, seed, slot, Party::bob);
  RandomStream det_rng = make_stream(seed, slot, lane_detection);
  const TrialOutcome r =
      simulate_trial(to_descriptor(cfg, da, Party::alice),
                     to_descriptor(cfg, db, Party::bob), ch, det, det_rng);
  if (da.basis != db.basis) return;
  tally.record(da.basis, da.intensity, db.intensity,
               r.outcome != CoincidenceClass::none, r.error);
}

/// Deterministic Monte Carlo over n_trials slots. Identical
/// (seed, n_trials, cfg) produce a bit-identical TallyMatrix for any thread
/// count: every slot derives its own counter-based streams and integer
/// tallies merge commutatively.
inline TallyMatrix run_monte_carlo(const ProtocolConfig& cfg, const ChannelParams& ch,
                                   const DetectorParams& det, std::uint64_t n_trials,
                                   std::uint64_t seed, unsigned n_threads = 1) {
  if (n_trials == 0) throw std::invalid_argument("n_trials must be >= 1");
  if (n_threads <= 1) {
    TallyMatrix tally;
    for (std::uint64_t s = 0; s < n_trials; ++s) run_slot(cfg, ch, det, seed, s, tally);
    return tally;
  }

  TallyMatrix total;
  std::mutex merge_mutex;
  std::vector<std::thread> workers;
  const std::uint64_t chunk = (n_trials + n_threads - 1) / n_threads;
  for (unsigned t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t] {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min(n_trials, begin + chunk);
      TallyMatrix local;
      for (std::uint64_t s = begin; s < end; ++s) run_slot(cfg, ch, det, seed, s, local);
      std::lock_guard<std::mutex> lock(merge_mutex);
      total = merge(total, local);
    });
  }
  for (auto& w : workers) w.join();
  return total;
}

/// Deterministic expectation engine. Only the relative phase of the two
/// pulses affects click statistics, so each cell averages the exact
/// per-detector click/no-click products over a uniform K-point grid of the
/// relative phase (trapezoidal rule on a periodic integrand: spectrally
/// accurate) and over the four equally likely bit pairs. Returns expected
/// gains and QBERs per cell; the sent field carries the expected pulse
/// allocation for cfg.total_pulses.
inline RateMatrix expected_tallies(const ProtocolConfig& cfg, const ChannelParams& ch,
                                   const DetectorParams& det, int quadrature_points = 128) {
  if (quadrature_points < 8) throw std::invalid_argument("quadrature_points must be >= 8");
  const double eta = ch.transmittance();
  const PairGrid<double> counts = pair_pulse_counts(cfg);

  RateMatrix out;
  out.cells.for_each([&](Basis w, IntensityLabel la, IntensityLabel lb, RateCell& cell) {
    double p_success = 0.0;
    double p_error = 0.0;
    for (unsigned bit_a = 0; bit_a < 2; ++bit_a) {
      for (unsigned bit_b = 0; bit_b < 2; ++bit_b) {
        for (int k = 0; k < quadrature_points; ++k) {
          const double delta = 2.0 * std::numbers::pi * k / quadrature_points;
          const PulseDescriptor pa{Party::alice,
                                   cfg.intensities[static_cast<std::size_t>(la)],
                                   Bb84State{w, static_cast<std::uint8_t>(bit_a)}, delta};
          const PulseDescriptor pb{Party::bob,
                                   cfg.intensities[static_cast<std::size_t>(lb)],
                                   Bb84State{w, static_cast<std::uint8_t>(bit_b)}, 0.0};
          const ModeAmplitudes alice = apply_loss(
              apply_misalignment(encode_pulse(pa), ch.misalignment_error), eta);
          const ModeAmplitudes bob = apply_loss(encode_pulse(pb), eta);
          const DetectorClickProbabilities probs =
              click_probabilities(bsm_output_amplitudes(alice, bob), det);
          const double p1h = probs.p[detector_d1h], p1v = probs.p[detector_d1v];
          const double p2h = probs.p[detector_d2h], p2v = probs.p[detector_d2v];
          double p_plus, p_minus;
          if (det.active == DetectorTopology::one_pbs) {
            p_plus = p1h * p1v;
            p_minus = 0.0;
          } else {
            p_plus = p1h * p1v * (1 - p2h) * (1 - p2v) +
                     p2h * p2v * (1 - p1h) * (1 - p1v);
            p_minus = p1h * p2v * (1 - p1v) * (1 - p2h) +
                      p1v * p2h * (1 - p1h) * (1 - p2v);
          }
          p_success += p_plus + p_minus;
          if (is_error(CoincidenceClass::psi_plus, w, bit_a, bit_b)) p_error += p_plus;
          if (is_error(CoincidenceClass::psi_minus, w, bit_a, bit_b)) p_error += p_minus;
        }
      }
    }
    const double samples = 4.0 * quadrature_points;
    cell.gain = p_success / samples;
    cell.qber = p_success > 0.0 ? p_error / p_success : 0.0;
    cell.sent = counts.at(w, la, lb);
  });
  return out;
}

}  // namespace mdiqkd
