#pragma once

// Imaging topologies (single lens, single lens + field lens, two-lens
// telescope), their closed-form condition solvers and end-to-end execution.
//
// Magnification is signed. With all-positive {D1, D2, D_f} the single-lens
// image is inverted (M < 0); user-facing output reports |M| alongside.

#include "qti/elements.hpp"
#include "qti/envelope.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qti {

enum class TopologyKind { SingleLens, FieldLens, Telescope };

std::string_view topology_name(TopologyKind kind) noexcept;
std::optional<TopologyKind> parse_topology(std::string_view name) noexcept;

struct Stage {
  std::string name;
  std::variant<DispersiveElement, TimeLens> element;
};

struct SystemTopology {
  TopologyKind kind;
  double magnification;
  std::vector<Stage> stages;
};

// 1/D1 + 1/D2 = 1/D_f and -D2/D1 = M.
struct SingleLensSolution {
  double d1;
  double d2;
};

struct FieldLensSolution {
  double d1;
  double d2;
  double dr;  // field-lens pump chirp, M * D_f
};

// D1 = -D_f1, D3 = -D_f2 = -M D1, D2 = D1 + D3.
struct TelescopeSolution {
  double d1;
  double df1;
  double d2;
  double df2;
  double d3;
  bool degenerate;  // M == 1: D2 == 0, back-to-back conjugate lenses
};

SingleLensSolution solve_single_lens(double magnification, double focal_gdd);
FieldLensSolution solve_field_lens(double magnification, double focal_gdd);
TelescopeSolution solve_telescope(double magnification, double d1);

// theta_r(t) = t^2 / (2 M D_f), rad.
double residual_phase(double magnification, double focal_gdd, double t);
// Delta Theta = M t_i^2 / (8 D_f): variation of theta_r across the image.
double residual_span(double magnification, double t_i, double focal_gdd);

struct FarFieldCheck {
  bool pass;
  double delta_theta;  // rad
  double margin;       // |Delta Theta| / pi
};

inline constexpr double kDefaultFarFieldThreshold = 0.1;

FarFieldCheck check_far_field(double magnification, double t_i, double focal_gdd,
                              double threshold_ratio = kDefaultFarFieldThreshold);

struct BuildOptions {
  std::optional<double> pump_seed_fwhm;  // empty: ideal lenses
  double tod_ratio = 0.0;                // beta3/beta2, ps; applied to signal-path elements
  double transmission = 1.0;             // per signal-path element
  double signal_carrier_nm = kUnlabeledCarrier;
  double pump_carrier_nm = kUnlabeledCarrier;
};

SystemTopology make_single_lens(double magnification, double focal_gdd, const BuildOptions& options = {});
SystemTopology make_field_lens(double magnification, double focal_gdd, const BuildOptions& options = {});
// Both telescope lenses are up-conversion lenses with pump chirps D_f1, D_f2.
SystemTopology make_telescope(double magnification, double d1, const BuildOptions& options = {});

// Focal GDD (single/field) or D1 (telescope) that makes the largest |GDD|
// anywhere in the system equal to max_gdd.
double scale_for_max_gdd(TopologyKind kind, double magnification, double max_gdd);

// Throws InvalidArgument when the element chain does not satisfy the
// topology's imaging conditions to relative 1e-12.
void validate(const SystemTopology& topology);

double max_abs_gdd(const SystemTopology& topology);

struct StageRecord {
  std::string name;
  SampledEnvelope envelope;
};

struct StageTrace {
  std::vector<StageRecord> stages;  // input first, image last

  const SampledEnvelope& input() const { return stages.front().envelope; }
  const SampledEnvelope& output() const { return stages.back().envelope; }
};

StageTrace run_system(const SampledEnvelope& input, const SystemTopology& topology);

struct GridOptions {
  std::size_t n_samples = 1u << 15;
  bool pin_n_samples = false;   // otherwise n may grow to resolve the bandwidth
  double margin = 4.0;
  std::optional<double> window;  // ps, overrides auto-sizing
};

// Centred grid wide enough for every intermediate waveform and every pump.
// input_extent: input duration (FWHM-scale), ps; input_bandwidth: angular FWHM, rad/ps.
TimeGrid plan_grid(const SystemTopology& topology, double input_extent, double input_bandwidth,
                   const GridOptions& options = {});

}  // namespace qti
