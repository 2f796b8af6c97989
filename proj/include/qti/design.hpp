#pragma once

// Dispersion lower bounds and bandwidth requirements for imaging a Gaussian
// waveform of FWHM t_i with an available angular bandwidth, per configuration.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qti {

enum class DesignConfiguration { FarField, Telescope, FieldLens };

std::string_view configuration_name(DesignConfiguration configuration) noexcept;
std::optional<DesignConfiguration> parse_configuration(std::string_view name) noexcept;

struct DesignRequest {
  double t_i;            // ps
  double bandwidth;      // available angular bandwidth, rad/ps
  double magnification;  // |M|; values below 1 describe compression
  DesignConfiguration configuration;
  double far_field_multiplier = 10.0;  // recommendation for ">>" bounds
};

enum class BoundKind { AtLeast, MuchGreater };
enum class BandwidthKind { AtLeast, Available };

struct DesignEntry {
  std::string element;       // D1, D_f, D2, D_r, D_f1, D_f2, D3
  BoundKind bound_kind;
  double dispersion_bound;   // ps^2, raw bound
  double recommended;        // ps^2; multiplier x bound for ">>" entries, the bound otherwise
  BandwidthKind bandwidth_kind;
  double bandwidth;          // rad/ps
};

struct FarFieldComparison {
  double d2_far_field_bound;  // pi M^2 t_i^2 / 8
  double d2_bound;            // this configuration's D2 bound
  double penalty;             // ratio of the two
};

struct DesignReport {
  DesignRequest request;
  std::vector<DesignEntry> entries;
  std::optional<double> far_field_margin;  // |Delta Theta| / pi at the recommended D_f
  FarFieldComparison far_field;
  bool compression = false;                // |M| < 1
  bool small_dispersion_violated = false;  // D1 bound >= t_i^2 / 10
  std::vector<std::string> notes;

  const DesignEntry& entry(std::string_view element) const;
};

DesignReport requirements(const DesignRequest& request);

// Angular FWHM of a Gaussian pump of width t_i chirped to focal GDD D_f: t_i / D_f.
double pump_bandwidth(double t_i, double focal_gdd);

}  // namespace qti
