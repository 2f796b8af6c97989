#pragma once

// Scenario files: sectioned key/value text with typed scalars and unit
// suffixes, e.g.
//
//   [input]
//   kind = time-bin
//   tau = 5 ps
//
// Parsing is split into a syntax pass (RawDocument) and a semantic pass
// (Scenario) so that sweeps can override single keys and rebuild.

#include "qti/design.hpp"
#include "qti/error.hpp"
#include "qti/imaging.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qti {

struct Diagnostic {
  int line;
  int column;
  std::string message;
};

class ScenarioError : public Error {
public:
  ScenarioError(ErrorCategory category, std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

struct RawValue {
  enum class Kind { Number, Word, String, Bool };
  Kind kind;
  double number = 0.0;
  std::string unit;  // as written, empty when absent
  std::string text;  // word/string payload
  bool flag = false;
  int line = 0;
  int column = 0;
};

// Keys are fully qualified: "section.key".
struct RawDocument {
  std::map<std::string, RawValue> values;
  std::map<std::string, int> section_lines;
};

// Throws ScenarioError(ScenarioSyntax) listing every malformed line.
RawDocument parse_document(std::string_view text);

enum class InputKind { Gaussian, TimeBin };

struct InputSpec {
  InputKind kind = InputKind::Gaussian;
  double t_fwhm = 0.0;  // gaussian
  double center = 0.0;
  double tau = 0.0;     // time-bin
  double delta_t = 0.0;
  double psi = 0.0;
  double carrier_nm = 710.0;

  // FWHM-scale duration and angular spectral FWHM used for grid planning.
  double extent() const;
  double bandwidth() const;
};

struct SystemSpec {
  TopologyKind kind = TopologyKind::FieldLens;
  double magnification = 0.0;
  std::optional<double> focal_gdd;  // single/field lens
  std::optional<double> d1;         // telescope
  std::optional<double> max_gdd;
  std::optional<double> pump_fwhm;  // empty: ideal lenses
  double pump_carrier_nm = 1550.0;
  double tod_ratio = 0.0;
  double transmission = 1.0;
  double far_field_threshold = kDefaultFarFieldThreshold;
};

struct GridSpec {
  std::optional<std::size_t> n_samples;
  double margin = 4.0;
  std::optional<double> window;
};

struct AnalysisSpec {
  bool interference = false;
  double analyzer_phase = 0.0;
  double phase_fit_fraction = 1.0;
};

struct Scenario {
  std::optional<InputSpec> input;
  std::optional<SystemSpec> system;
  GridSpec grid;
  AnalysisSpec analysis;
  std::optional<DesignRequest> design;
  std::optional<std::string> output_dir;
};

// Throws ScenarioError(ScenarioSemantic) listing every violation.
Scenario build_scenario(const RawDocument& document);

Scenario parse_scenario(std::string_view text);

// Canonical unit of a numeric key ("ps", "ps2", "rad", ...; "" when
// dimensionless). Throws ScenarioSemantic for unknown or non-numeric keys.
std::string canonical_unit(std::string_view key);

// Copy of the document with `key` set to `value` in its canonical unit.
RawDocument with_override(const RawDocument& document, std::string_view key, double value);

}  // namespace qti
