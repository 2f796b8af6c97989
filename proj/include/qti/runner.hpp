#pragma once

// Scenario execution: builds the input and topology, sizes the grid, runs the
// system and collects the metrics that end up in reports and sweep rows.

#include "qti/design.hpp"
#include "qti/imaging.hpp"
#include "qti/interferometry.hpp"
#include "qti/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qti {

struct StageMetrics {
  std::string name;
  double energy;
  double centroid;
  double carrier_nm;
  std::optional<double> fwhm;     // absent when the profile has no clean half-maximum
  std::optional<PhaseFit> phase;  // absent when too few samples qualify
};

struct SimulationResult {
  InputSpec input;
  SystemSpec system;
  SystemTopology topology;
  TimeGrid grid;
  StageTrace trace;
  std::vector<StageMetrics> metrics;  // one per trace stage
  Complex image_overlap;              // against (1/sqrt|M|) a0(t/M)
  double image_intensity_overlap;
  std::optional<FarFieldCheck> far_field;  // single-lens and field-lens systems
  double bin_delay = 0.0;                  // M * delta_t, time-bin inputs only
  std::optional<InterferenceResult> interference;
  std::optional<DesignReport> design;
};

SampledEnvelope make_input(const TimeGrid& grid, const InputSpec& input);
SampledEnvelope ideal_image(const TimeGrid& grid, const InputSpec& input, double magnification);

SystemTopology build_topology(const SystemSpec& system, const InputSpec& input);
TimeGrid plan_grid(const SystemTopology& topology, const InputSpec& input, const GridSpec& grid);

StageMetrics measure(const std::string& name, const SampledEnvelope& env, double phase_fit_fraction);

// Needs scenario.input and scenario.system.
SimulationResult simulate(const Scenario& scenario);

struct SweepRow {
  double value;  // canonical unit of the swept key
  double output_energy;
  std::optional<double> output_fwhm;
  std::optional<double> output_c2;
  std::optional<double> central_energy;  // central window at the analyzer phase
  std::optional<double> visibility;
};

// Overrides `key` with a + i (b - a)/n for i in [0, n) and simulates each
// point, using up to `threads` workers. Rows come back sorted by value.
std::vector<SweepRow> sweep(const RawDocument& document, const std::string& key, double a, double b,
                            std::size_t n, unsigned threads = 0);

}  // namespace qti
