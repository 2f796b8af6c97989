#include "qti/imaging.hpp"

#include "qti/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qti {

std::string_view topology_name(TopologyKind kind) noexcept {
  switch (kind) {
    case TopologyKind::SingleLens: return "single-lens";
    case TopologyKind::FieldLens: return "field-lens";
    case TopologyKind::Telescope: return "telescope";
  }
  return "unknown";
}

std::optional<TopologyKind> parse_topology(std::string_view name) noexcept {
  if (name == "single-lens") return TopologyKind::SingleLens;
  if (name == "field-lens") return TopologyKind::FieldLens;
  if (name == "telescope") return TopologyKind::Telescope;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Condition solvers

SingleLensSolution solve_single_lens(double magnification, double focal_gdd) {
  require(magnification != 0.0 && magnification != 1.0, ErrorCategory::Degenerate,
          "degenerate magnification " + std::to_string(magnification) + ": M must not be 0 or 1");
  require(focal_gdd != 0.0 && std::isfinite(focal_gdd), ErrorCategory::Degenerate,
          "focal GDD must be finite and non-zero");
  const double d1 = focal_gdd * (magnification - 1.0) / magnification;
  return {d1, -magnification * d1};
}

FieldLensSolution solve_field_lens(double magnification, double focal_gdd) {
  const auto [d1, d2] = solve_single_lens(magnification, focal_gdd);
  return {d1, d2, magnification * focal_gdd};
}

TelescopeSolution solve_telescope(double magnification, double d1) {
  require(magnification != 0.0, ErrorCategory::Degenerate, "telescope magnification must be non-zero");
  require(d1 != 0.0 && std::isfinite(d1), ErrorCategory::Degenerate, "telescope D1 must be finite and non-zero");
  const double d3 = -magnification * d1;
  return {d1, -d1, d1 + d3, magnification * d1, d3, magnification == 1.0};
}

double residual_phase(double magnification, double focal_gdd, double t) {
  return t * t / (2.0 * magnification * focal_gdd);
}

double residual_span(double magnification, double t_i, double focal_gdd) {
  return magnification * t_i * t_i / (8.0 * focal_gdd);
}

FarFieldCheck check_far_field(double magnification, double t_i, double focal_gdd, double threshold_ratio) {
  require(threshold_ratio > 0.0, ErrorCategory::InvalidArgument, "far-field threshold must be positive");
  const double span = std::isinf(focal_gdd) ? 0.0 : residual_span(magnification, t_i, focal_gdd);
  const double margin = std::abs(span) / kPi;
  return {margin <= threshold_ratio, span, margin};
}

// ---------------------------------------------------------------------------
// Topology builders

namespace {

DispersiveElement signal_element(double gdd, const BuildOptions& options) {
  return DispersiveElement{gdd, options.tod_ratio * gdd, options.transmission};
}

TimeLens make_lens(ConversionDirection direction, double focal_gdd, double input_carrier,
                   const BuildOptions& options) {
  TimeLens lens;
  lens.direction = direction;
  lens.focal_gdd = focal_gdd;
  lens.pump_seed_fwhm = options.pump_seed_fwhm;
  lens.input_carrier_nm = input_carrier;
  lens.pump_carrier_nm = options.pump_carrier_nm;
  return lens;
}

void check_options(const BuildOptions& options) {
  require(!options.pump_seed_fwhm || *options.pump_seed_fwhm > 0.0, ErrorCategory::InvalidArgument,
          "pump seed FWHM must be positive");
  require(options.transmission > 0.0 && options.transmission <= 1.0, ErrorCategory::InvalidArgument,
          "transmission must lie in (0, 1]");
}

}  // namespace

SystemTopology make_single_lens(double magnification, double focal_gdd, const BuildOptions& options) {
  check_options(options);
  const auto sol = solve_single_lens(magnification, focal_gdd);
  SystemTopology topology{TopologyKind::SingleLens, magnification, {}};
  topology.stages.push_back({"D1", signal_element(sol.d1, options)});
  topology.stages.push_back(
      {"lens", make_lens(ConversionDirection::Down, focal_gdd, options.signal_carrier_nm, options)});
  topology.stages.push_back({"D2", signal_element(sol.d2, options)});
  return topology;
}

SystemTopology make_field_lens(double magnification, double focal_gdd, const BuildOptions& options) {
  SystemTopology topology = make_single_lens(magnification, focal_gdd, options);
  topology.kind = TopologyKind::FieldLens;
  const auto& lens = std::get<TimeLens>(topology.stages[1].element);
  topology.stages.push_back({"field_lens", make_lens(ConversionDirection::Up, magnification * focal_gdd,
                                                     lens.output_carrier_nm(), options)});
  return topology;
}

SystemTopology make_telescope(double magnification, double d1, const BuildOptions& options) {
  check_options(options);
  const auto sol = solve_telescope(magnification, d1);
  SystemTopology topology{TopologyKind::Telescope, magnification, {}};
  const TimeLens first = make_lens(ConversionDirection::Up, sol.df1, options.signal_carrier_nm, options);
  topology.stages.push_back({"D1", signal_element(sol.d1, options)});
  topology.stages.push_back({"lens1", first});
  topology.stages.push_back({"D2", signal_element(sol.d2, options)});
  topology.stages.push_back(
      {"lens2", make_lens(ConversionDirection::Up, sol.df2, first.output_carrier_nm(), options)});
  topology.stages.push_back({"D3", signal_element(sol.d3, options)});
  return topology;
}

double scale_for_max_gdd(TopologyKind kind, double magnification, double max_gdd) {
  require(max_gdd > 0.0, ErrorCategory::InvalidArgument, "maximum GDD must be positive");
  const double m = magnification;
  double factor = 0.0;
  switch (kind) {
    case TopologyKind::SingleLens:
    case TopologyKind::FieldLens:
      require(m != 0.0 && m != 1.0, ErrorCategory::Degenerate, "degenerate magnification: M must not be 0 or 1");
      // D1 = D_f (M-1)/M, D2 = D_f (1-M), D_r = M D_f
      factor = std::max({std::abs((m - 1.0) / m), std::abs(1.0 - m), 1.0});
      if (kind == TopologyKind::FieldLens)
        factor = std::max(factor, std::abs(m));
      break;
    case TopologyKind::Telescope:
      require(m != 0.0, ErrorCategory::Degenerate, "telescope magnification must be non-zero");
      // |D1| = |D_f1|, D2 = D1 (1-M), D_f2 = -D3 = M D1
      factor = std::max({1.0, std::abs(1.0 - m), std::abs(m)});
      break;
  }
  return max_gdd / factor;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * scale; }

const DispersiveElement& dispersion_at(const SystemTopology& t, std::size_t i) {
  const auto* e = std::get_if<DispersiveElement>(&t.stages[i].element);
  if (!e)
    fail(ErrorCategory::InvalidArgument, "topology invariant violated: stage " + std::to_string(i) +
                                             " (" + t.stages[i].name + ") must be a dispersive element");
  return *e;
}

const TimeLens& lens_at(const SystemTopology& t, std::size_t i) {
  const auto* e = std::get_if<TimeLens>(&t.stages[i].element);
  if (!e)
    fail(ErrorCategory::InvalidArgument, "topology invariant violated: stage " + std::to_string(i) +
                                             " (" + t.stages[i].name + ") must be a time lens");
  return *e;
}

[[noreturn]] void violated(const std::string& what) {
  fail(ErrorCategory::InvalidArgument, "topology invariant violated: " + what);
}

}  // namespace

void validate(const SystemTopology& topology) {
  const double m = topology.magnification;
  const std::size_t expected = topology.kind == TopologyKind::SingleLens ? 3 : topology.kind == TopologyKind::FieldLens ? 4 : 5;
  if (topology.stages.size() != expected)
    violated(std::string(topology_name(topology.kind)) + " needs " + std::to_string(expected) + " stages");

  if (topology.kind == TopologyKind::Telescope) {
    const double d1 = dispersion_at(topology, 0).gdd;
    const double df1 = lens_at(topology, 1).focal_gdd;
    const double d2 = dispersion_at(topology, 2).gdd;
    const double df2 = lens_at(topology, 3).focal_gdd;
    const double d3 = dispersion_at(topology, 4).gdd;
    const double scale = std::max({std::abs(d1), std::abs(d2), std::abs(d3), std::abs(df1), std::abs(df2)});
    if (!close(d1, -df1, scale)) violated("D1 = -D_f1");
    if (!close(d3, -df2, scale)) violated("D3 = -D_f2");
    if (!close(df2, m * d1, scale)) violated("D_f2 = M D1");
    if (!close(d2, d1 + d3, scale)) violated("D2 = D1 + D3");
    return;
  }

  const double d1 = dispersion_at(topology, 0).gdd;
  const double df = lens_at(topology, 1).focal_gdd;
  const double d2 = dispersion_at(topology, 2).gdd;
  if (d1 == 0.0 || d2 == 0.0 || df == 0.0)
    violated("single-lens dispersions must be non-zero");
  const double lhs = 1.0 / d1 + 1.0 / d2;
  if (!close(lhs, 1.0 / df, 1.0 / std::abs(d1) + 1.0 / std::abs(d2) + 1.0 / std::abs(df)))
    violated("1/D1 + 1/D2 = 1/D_f");
  if (!close(-d2 / d1, m, std::abs(m)))
    violated("-D2/D1 = M");
  if (topology.kind == TopologyKind::FieldLens) {
    const double dr = lens_at(topology, 3).focal_gdd;
    if (!close(dr, m * df, std::abs(m * df)))
      violated("D_r = M D_f");
  }
}

double max_abs_gdd(const SystemTopology& topology) {
  double out = 0.0;
  for (const auto& stage : topology.stages) {
    if (const auto* d = std::get_if<DispersiveElement>(&stage.element))
      out = std::max(out, std::abs(d->gdd));
    else
      out = std::max(out, std::abs(std::get<TimeLens>(stage.element).focal_gdd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution

StageTrace run_system(const SampledEnvelope& input, const SystemTopology& topology) {
  validate(topology);
  StageTrace trace;
  trace.stages.reserve(topology.stages.size() + 1);
  trace.stages.push_back({"input", input});
  for (const auto& stage : topology.stages) {
    const SampledEnvelope& current = trace.stages.back().envelope;
    SampledEnvelope next = std::visit(
        [&](const auto& element) -> SampledEnvelope {
          using T = std::decay_t<decltype(element)>;
          if constexpr (std::is_same_v<T, DispersiveElement>)
            return apply_dispersion(current, element);
          else
            return apply_time_lens(current, element);
        },
        stage.element);
    trace.stages.push_back({stage.name, std::move(next)});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Grid planning
//
// Extent and bandwidth are propagated stage by stage: dispersion stretches by
// |D| * bandwidth (+ |T| bandwidth^2 / 2), a lens adds extent / |D_f| of
// bandwidth. The window covers margin x the largest predicted extent, and
// every stretched pump out to its 1e-8 amplitude tails.

TimeGrid plan_grid(const SystemTopology& topology, double input_extent, double input_bandwidth,
                   const GridOptions& options) {
  require(input_extent > 0.0 && input_bandwidth > 0.0, ErrorCategory::InvalidArgument,
          "input extent and bandwidth must be positive");
  require(options.margin >= 1.0, ErrorCategory::InvalidArgument, "grid margin must be >= 1");

  double extent = input_extent;
  double bandwidth = input_bandwidth;
  double max_extent = extent;
  double max_bandwidth = bandwidth;
  double pump_window = 0.0;
  // amplitude exp(-2 ln2 x^2) falls to 1e-8 at x = sqrt(ln(1e8) / (2 ln2))
  const double tail_factor = std::sqrt(std::log(1.0 / kBoundaryLeakage) / (2.0 * kLn2));

  for (const auto& stage : topology.stages) {
    if (const auto* d = std::get_if<DispersiveElement>(&stage.element)) {
      extent += std::abs(d->gdd) * bandwidth + 0.5 * std::abs(d->tod) * bandwidth * bandwidth;
    } else {
      const auto& lens = std::get<TimeLens>(stage.element);
      bandwidth += extent / std::abs(lens.focal_gdd);
      if (lens.pump_seed_fwhm) {
        const double tp = *lens.pump_seed_fwhm;
        const double stretch = 4.0 * kLn2 * lens.focal_gdd / (tp * tp);
        const double width = tp * std::sqrt(1.0 + stretch * stretch);
        pump_window = std::max(pump_window, 2.2 * tail_factor * width);
        max_bandwidth = std::max(max_bandwidth, 4.0 * kLn2 / tp);
      }
    }
    max_extent = std::max(max_extent, extent);
    max_bandwidth = std::max(max_bandwidth, bandwidth);
  }

  const double window = options.window ? *options.window : std::max(options.margin * max_extent, pump_window);
  std::size_t n = options.n_samples;
  const double required_nyquist = 0.5 * options.margin * max_bandwidth;
  constexpr std::size_t kMaxSamples = std::size_t{1} << 22;
  while (kPi * static_cast<double>(n) / window < required_nyquist) {
    if (options.pin_n_samples || n >= kMaxSamples)
      fail(ErrorCategory::GridOverflow,
           "time step " + std::to_string(window / static_cast<double>(n)) +
               " ps cannot resolve the predicted bandwidth " + std::to_string(max_bandwidth) +
               " rad/ps; increase n_samples or shrink the window");
    n *= 2;
  }
  return TimeGrid::centered(n, window);
}

}  // namespace qti
