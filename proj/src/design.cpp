#include "qti/design.hpp"

#include "qti/envelope.hpp"
#include "qti/error.hpp"

#include <cmath>

namespace qti {

std::string_view configuration_name(DesignConfiguration configuration) noexcept {
  switch (configuration) {
    case DesignConfiguration::FarField: return "far-field";
    case DesignConfiguration::Telescope: return "telescope";
    case DesignConfiguration::FieldLens: return "field-lens";
  }
  return "unknown";
}

std::optional<DesignConfiguration> parse_configuration(std::string_view name) noexcept {
  if (name == "far-field") return DesignConfiguration::FarField;
  if (name == "telescope") return DesignConfiguration::Telescope;
  if (name == "field-lens") return DesignConfiguration::FieldLens;
  return std::nullopt;
}

const DesignEntry& DesignReport::entry(std::string_view element) const {
  for (const auto& e : entries)
    if (e.element == element)
      return e;
  fail(ErrorCategory::InvalidArgument, "design report has no entry " + std::string(element));
}

double pump_bandwidth(double t_i, double focal_gdd) {
  require(focal_gdd != 0.0, ErrorCategory::Degenerate, "pump bandwidth undefined for zero focal GDD");
  require(t_i > 0.0, ErrorCategory::InvalidArgument, "pulse width must be positive");
  return t_i / std::abs(focal_gdd);
}

DesignReport requirements(const DesignRequest& request) {
  require(request.t_i > 0.0 && std::isfinite(request.t_i), ErrorCategory::InvalidArgument,
          "design request: t_i must be positive");
  require(request.bandwidth > 0.0 && std::isfinite(request.bandwidth), ErrorCategory::InvalidArgument,
          "design request: bandwidth must be positive");
  require(request.magnification > 0.0 && std::isfinite(request.magnification), ErrorCategory::InvalidArgument,
          "design request: magnification magnitude must be positive");
  require(request.far_field_multiplier >= 1.0, ErrorCategory::InvalidArgument,
          "design request: far-field multiplier must be >= 1");

  const double t = request.t_i;
  const double nu = request.bandwidth;
  const double m = request.magnification;
  const double k = request.far_field_multiplier;
  const double input_bw = 4.0 * kLn2 / t;
  const double output_bw = 4.0 * kLn2 / (m * t);

  DesignReport report;
  report.request = request;
  report.compression = m < 1.0;

  auto hard = [&](std::string name, double bound, BandwidthKind bk, double bw) {
    report.entries.push_back({std::move(name), BoundKind::AtLeast, bound, bound, bk, bw});
  };
  auto far = [&](std::string name, double bound, double bw) {
    report.entries.push_back({std::move(name), BoundKind::MuchGreater, bound, k * bound, BandwidthKind::AtLeast, bw});
  };

  const double ff_d2 = kPi * m * m * t * t / 8.0;
  switch (request.configuration) {
    case DesignConfiguration::FieldLens:
      hard("D1", (m + 1.0) * t / (m * nu), BandwidthKind::AtLeast, input_bw);
      hard("D_f", t / nu, BandwidthKind::Available, nu);
      hard("D2", (m + 1.0) * t / nu, BandwidthKind::Available, nu);
      hard("D_r", m * t / nu, BandwidthKind::Available, nu);
      break;
    case DesignConfiguration::Telescope:
      hard("D1", t / nu, BandwidthKind::AtLeast, input_bw);
      hard("D_f1", t / nu, BandwidthKind::Available, nu);
      hard("D2", (m + 1.0) * t / nu, BandwidthKind::Available, nu);
      hard("D_f2", m * t / nu, BandwidthKind::Available, nu);
      hard("D3", m * t / nu, BandwidthKind::AtLeast, output_bw);
      report.notes.push_back(
          "D2 bandwidth is listed as the available bandwidth; the waveform reaching D3 only needs 4 ln2/(M t_i)");
      break;
    case DesignConfiguration::FarField: {
      far("D1", kPi * (m + 1.0) * t * t / 8.0, input_bw);
      far("D_f", kPi * m * t * t / 8.0, input_bw);
      far("D2", ff_d2, output_bw);
      const double recommended_df = report.entries[1].recommended;
      report.far_field_margin = std::abs(m * t * t / (8.0 * recommended_df)) / kPi;
      break;
    }
  }

  const double d2 = report.entry("D2").dispersion_bound;
  report.far_field = {ff_d2, d2, ff_d2 / d2};

  if (request.configuration != DesignConfiguration::FarField &&
      report.entry("D1").dispersion_bound >= t * t / 10.0) {
    report.small_dispersion_violated = true;
    report.notes.push_back("D1 bound is not small compared with t_i^2; the input broadens noticeably before the lens");
  }
  if (report.compression)
    report.notes.push_back("|M| < 1: the system compresses the waveform");
  return report;
}

}  // namespace qti
