#pragma once

// Unbalanced (Franson-type) analysis interferometer and the central-peak
// visibility of a two-bin image.

#include "qti/envelope.hpp"

namespace qti {

struct InterferometerArm {
  double delay = 0.0;  // ps
  double phase = 0.0;  // rad
};

// b(t) = 1/2 [a(t) + exp(i phase) a(t - delay)], one output port of a
// balanced interferometer. The delayed copy is formed spectrally and must
// stay inside the window.
SampledEnvelope recombine(const SampledEnvelope& env, double delay, double phase);
inline SampledEnvelope recombine(const SampledEnvelope& env, const InterferometerArm& arm) {
  return recombine(env, arm.delay, arm.phase);
}

struct InterferenceResult {
  SampledEnvelope constructive;  // analyzer phase psi
  SampledEnvelope destructive;   // analyzer phase psi + pi
  double window_start;           // ps, central-peak window
  double window_end;
  double energy_constructive;    // central-window intensity integrals
  double energy_destructive;
  double visibility;             // (E_max - E_min) / (E_max + E_min)
  double peak_visibility;        // same with central-window peak intensities
};

// Runs the analyzer at psi and psi + pi with delay `bin_delay` (= M dt) and
// integrates the central peak over [t_c - delay/2, t_c + delay/2], t_c being
// the midpoint of the two outer peaks. Throws PeakDetection when the
// three-peak structure is absent.
InterferenceResult visibility_experiment(const SampledEnvelope& image, double bin_delay, double psi);

// Central-window energy for a single analyzer phase, window located as above.
double central_peak_energy(const SampledEnvelope& image, double bin_delay, double phase);

// Skewness (normalised third central moment) of the intensity profile.
double asymmetry(const SampledEnvelope& env);

}  // namespace qti
