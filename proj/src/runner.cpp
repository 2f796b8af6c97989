#include "qti/runner.hpp"

#include "qti/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace qti {

SampledEnvelope make_input(const TimeGrid& grid, const InputSpec& input) {
  if (input.kind == InputKind::Gaussian)
    return gaussian_pulse(grid, input.t_fwhm, input.center, 1.0, input.carrier_nm);
  return time_bin_pulse(grid, input.tau, input.delta_t, input.psi, input.carrier_nm);
}

SampledEnvelope ideal_image(const TimeGrid& grid, const InputSpec& input, double magnification) {
  if (input.kind == InputKind::Gaussian)
    return sample_magnified(grid, GaussianShape{input.t_fwhm, input.center}, magnification);
  return sample_magnified(grid, TimeBinShape{input.tau, input.delta_t, input.psi}, magnification);
}

SystemTopology build_topology(const SystemSpec& system, const InputSpec& input) {
  BuildOptions options;
  options.pump_seed_fwhm = system.pump_fwhm;
  options.tod_ratio = system.tod_ratio;
  options.transmission = system.transmission;
  options.signal_carrier_nm = input.carrier_nm;
  options.pump_carrier_nm = system.pump_carrier_nm;

  const double m = system.magnification;
  double scale = 0.0;
  if (system.max_gdd)
    scale = scale_for_max_gdd(system.kind, m, *system.max_gdd);
  else if (system.kind == TopologyKind::Telescope)
    scale = system.d1.value_or(0.0);
  else
    scale = system.focal_gdd.value_or(0.0);

  switch (system.kind) {
    case TopologyKind::SingleLens: return make_single_lens(m, scale, options);
    case TopologyKind::FieldLens: return make_field_lens(m, scale, options);
    case TopologyKind::Telescope: return make_telescope(m, scale, options);
  }
  fail(ErrorCategory::InvalidArgument, "unknown topology");
}

TimeGrid plan_grid(const SystemTopology& topology, const InputSpec& input, const GridSpec& grid) {
  GridOptions options;
  if (grid.n_samples) {
    options.n_samples = *grid.n_samples;
    options.pin_n_samples = true;
  }
  options.margin = grid.margin;
  options.window = grid.window;
  return plan_grid(topology, input.extent(), input.bandwidth(), options);
}

StageMetrics measure(const std::string& name, const SampledEnvelope& env, double phase_fit_fraction) {
  StageMetrics m{name, energy(env), 0.0, env.carrier_nm(), std::nullopt, std::nullopt};
  if (m.energy <= 0.0)
    return m;
  m.centroid = centroid(env);
  try {
    m.fwhm = fwhm(env);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::Degenerate)
      throw;
  }
  try {
    m.phase = phase_fit_quadratic(env, phase_fit_fraction);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::InsufficientSupport && e.category() != ErrorCategory::Degenerate)
      throw;
  }
  return m;
}

namespace {

double lens_focal(const SystemTopology& topology) {
  for (const auto& stage : topology.stages)
    if (const auto* lens = std::get_if<TimeLens>(&stage.element))
      return lens->focal_gdd;
  fail(ErrorCategory::InvalidArgument, "topology has no time lens");
}

}  // namespace

SimulationResult simulate(const Scenario& scenario) {
  require(scenario.input.has_value(), ErrorCategory::ScenarioSemantic, "simulation needs an [input] section");
  require(scenario.system.has_value(), ErrorCategory::ScenarioSemantic, "simulation needs a [system] section");
  const InputSpec& input = *scenario.input;
  const SystemSpec& system = *scenario.system;

  SystemTopology topology = build_topology(system, input);
  const TimeGrid grid = plan_grid(topology, input, scenario.grid);
  StageTrace trace = run_system(make_input(grid, input), topology);

  std::vector<StageMetrics> metrics;
  metrics.reserve(trace.stages.size());
  for (const auto& record : trace.stages)
    metrics.push_back(measure(record.name, record.envelope, scenario.analysis.phase_fit_fraction));

  const double m = topology.magnification;
  const SampledEnvelope target = ideal_image(grid, input, m);
  const Complex image_overlap = overlap(trace.output(), target);
  const double image_intensity_overlap = intensity_overlap(trace.output(), target);

  std::optional<FarFieldCheck> far_field;
  if (topology.kind != TopologyKind::Telescope)
    far_field = check_far_field(m, input.extent(), lens_focal(topology), system.far_field_threshold);

  double bin_delay = 0.0;
  std::optional<InterferenceResult> interference;
  if (input.kind == InputKind::TimeBin)
    bin_delay = m * input.delta_t;
  if (scenario.analysis.interference)
    interference = visibility_experiment(trace.output(), bin_delay, scenario.analysis.analyzer_phase);

  std::optional<DesignReport> design;
  if (scenario.design)
    design = requirements(*scenario.design);

  return SimulationResult{input,
                          system,
                          std::move(topology),
                          grid,
                          std::move(trace),
                          std::move(metrics),
                          image_overlap,
                          image_intensity_overlap,
                          far_field,
                          bin_delay,
                          std::move(interference),
                          std::move(design)};
}

std::vector<SweepRow> sweep(const RawDocument& document, const std::string& key, double a, double b,
                            std::size_t n, unsigned threads) {
  require(n > 0, ErrorCategory::InvalidArgument, "sweep needs at least one point");
  require(std::isfinite(a) && std::isfinite(b) && a != b, ErrorCategory::InvalidArgument,
          "sweep range must have distinct finite endpoints");
  canonical_unit(key);  // rejects unknown and non-numeric keys

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = a + static_cast<double>(i) * (b - a) / static_cast<double>(n);

  // Build every scenario up front so semantic errors surface before any work.
  std::vector<Scenario> scenarios;
  scenarios.reserve(n);
  for (double v : values)
    scenarios.push_back(build_scenario(with_override(document, key, v)));

  std::vector<std::optional<SweepRow>> rows(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_index = n;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Scenario& s = scenarios[i];
        const SimulationResult r = simulate(s);
        const StageMetrics& out = r.metrics.back();
        SweepRow row{values[i], out.energy, out.fwhm, std::nullopt, std::nullopt, std::nullopt};
        if (out.phase)
          row.output_c2 = out.phase->curvature;
        if (r.interference) {
          row.central_energy = r.interference->energy_constructive;
          row.visibility = r.interference->visibility;
        }
        rows[i] = row;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        // Report the failure of the lowest point so the error is deterministic.
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };

  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);

  std::vector<SweepRow> out;
  out.reserve(n);
  for (auto& row : rows)
    out.push_back(*row);
  std::sort(out.begin(), out.end(), [](const SweepRow& x, const SweepRow& y) { return x.value < y.value; });
  return out;
}

}  // namespace qti
