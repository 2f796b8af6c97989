#include "qti/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace qti {

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::ostringstream out;
  for (std::size_t i = 0; i < diagnostics.size(); ++i) {
    if (i)
      out << '\n';
    out << "line " << diagnostics[i].line << ", column " << diagnostics[i].column << ": "
        << diagnostics[i].message;
  }
  return out.str();
}

}  // namespace

ScenarioError::ScenarioError(ErrorCategory category, std::vector<Diagnostic> diagnostics)
    : Error(category, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

// ---------------------------------------------------------------------------
// Syntax pass

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool is_name(std::string_view s) {
  return !s.empty() && std::isalpha(static_cast<unsigned char>(s.front())) &&
         std::all_of(s.begin(), s.end(), is_name_char);
}

bool is_dotted_name(std::string_view s) {
  if (s.empty())
    return false;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = s.find('.', start);
    if (!is_name(s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start)))
      return false;
    if (dot == std::string_view::npos)
      return true;
    start = dot + 1;
  }
}

bool is_unit(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '^' || c == '.';
  });
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      quoted = !quoted;
    else if (line[i] == '#' && !quoted)
      return line.substr(0, i);
  }
  return line;
}

int column_of(std::string_view line, std::string_view part) {
  return static_cast<int>(part.data() - line.data()) + 1;
}

std::optional<RawValue> parse_value(std::string_view line, std::string_view text, int line_no,
                                    std::vector<Diagnostic>& diagnostics) {
  RawValue value;
  value.line = line_no;
  value.column = column_of(line, text);
  auto error = [&](std::string message) {
    diagnostics.push_back({line_no, value.column, std::move(message)});
    return std::nullopt;
  };

  if (text.empty())
    return error("missing value after '='");

  if (text.front() == '"') {
    const std::size_t close = text.find('"', 1);
    if (close == std::string_view::npos)
      return error("unterminated string");
    if (!trim(text.substr(close + 1)).empty())
      return error("unexpected text after string");
    value.kind = RawValue::Kind::String;
    value.text = std::string(text.substr(1, close - 1));
    return value;
  }

  if (text == "true" || text == "false") {
    value.kind = RawValue::Kind::Bool;
    value.flag = text == "true";
    return value;
  }

  double number = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+')
    ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, number);
  if (ec == std::errc() && ptr != begin) {
    const std::string_view rest = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    if (!rest.empty() && !std::isspace(static_cast<unsigned char>(*ptr)))
      return error("malformed number '" + std::string(text) + "'");
    if (!rest.empty() && !is_unit(rest))
      return error("malformed unit '" + std::string(rest) + "'");
    if (!std::isfinite(number))
      return error("number must be finite");
    value.kind = RawValue::Kind::Number;
    value.number = number;
    value.unit = std::string(rest);
    return value;
  }
  if (ec == std::errc::result_out_of_range)
    return error("number out of range");

  if (is_name(text)) {
    value.kind = RawValue::Kind::Word;
    value.text = std::string(text);
    return value;
  }
  return error("unrecognised value '" + std::string(text) + "'");
}

}  // namespace

RawDocument parse_document(std::string_view text) {
  RawDocument document;
  std::vector<Diagnostic> diagnostics;
  std::string section;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r')
      raw.remove_suffix(1);

    const std::string_view content = trim(strip_comment(raw));
    if (content.empty())
      continue;

    if (content.front() == '[') {
      if (content.back() != ']') {
        diagnostics.push_back({line_no, column_of(raw, content), "section header missing ']'"});
        continue;
      }
      const std::string_view name = trim(content.substr(1, content.size() - 2));
      if (!is_name(name)) {
        diagnostics.push_back({line_no, column_of(raw, content), "invalid section name '" + std::string(name) + "'"});
        continue;
      }
      section = std::string(name);
      if (document.section_lines.count(section))
        diagnostics.push_back({line_no, column_of(raw, content), "duplicate section [" + section + "]"});
      else
        document.section_lines[section] = line_no;
      continue;
    }

    const std::size_t eq = content.find('=');
    if (eq == std::string_view::npos) {
      diagnostics.push_back({line_no, column_of(raw, content), "expected 'key = value'"});
      continue;
    }
    const std::string_view key = trim(content.substr(0, eq));
    if (!is_dotted_name(key)) {
      diagnostics.push_back({line_no, column_of(raw, content), "invalid key '" + std::string(key) + "'"});
      continue;
    }
    auto value = parse_value(raw, trim(content.substr(eq + 1)), line_no, diagnostics);
    if (!value)
      continue;
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (auto it = document.values.find(full); it != document.values.end()) {
      diagnostics.push_back({line_no, column_of(raw, key),
                             "duplicate key '" + full + "' (first set on line " + std::to_string(it->second.line) + ")"});
      continue;
    }
    document.values.emplace(full, std::move(*value));
  }

  if (!diagnostics.empty())
    throw ScenarioError(ErrorCategory::ScenarioSyntax, std::move(diagnostics));
  return document;
}

// ---------------------------------------------------------------------------
// Schema

namespace {

enum class Dim { Time, Gdd, Angle, AngularFrequency, Wavelength, Dimensionless, Count, Bool, Word, Text, TimeOrWord };

struct UnitFactor {
  std::string_view unit;
  double factor;
};

// Canonical unit first.
const std::vector<UnitFactor>& units_for(Dim dim) {
  static const std::map<Dim, std::vector<UnitFactor>> table{
      {Dim::Time, {{"ps", 1.0}, {"fs", 1e-3}, {"ns", 1e3}}},
      {Dim::TimeOrWord, {{"ps", 1.0}, {"fs", 1e-3}, {"ns", 1e3}}},
      {Dim::Gdd, {{"ps2", 1.0}, {"ps^2", 1.0}, {"fs2", 1e-6}, {"fs^2", 1e-6}}},
      {Dim::Angle, {{"rad", 1.0}, {"deg", kPi / 180.0}}},
      {Dim::AngularFrequency, {{"rad/ps", 1.0}, {"rad/s", 1e-12}, {"rad/fs", 1e3}}},
      {Dim::Wavelength, {{"nm", 1.0}, {"um", 1e3}}},
      {Dim::Dimensionless, {}},
      {Dim::Count, {}},
  };
  static const std::vector<UnitFactor> none;
  auto it = table.find(dim);
  return it == table.end() ? none : it->second;
}

const std::map<std::string, Dim, std::less<>>& schema() {
  static const std::map<std::string, Dim, std::less<>> keys{
      {"input.kind", Dim::Word},
      {"input.t_fwhm", Dim::Time},
      {"input.center", Dim::Time},
      {"input.tau", Dim::Time},
      {"input.delta_t", Dim::Time},
      {"input.psi", Dim::Angle},
      {"input.carrier", Dim::Wavelength},
      {"system.kind", Dim::Word},
      {"system.magnification", Dim::Dimensionless},
      {"system.focal_gdd", Dim::Gdd},
      {"system.d1", Dim::Gdd},
      {"system.max_gdd", Dim::Gdd},
      {"system.pump_fwhm", Dim::TimeOrWord},
      {"system.pump_carrier", Dim::Wavelength},
      {"system.tod_ratio", Dim::Time},
      {"system.transmission", Dim::Dimensionless},
      {"system.far_field_threshold", Dim::Dimensionless},
      {"grid.n_samples", Dim::Count},
      {"grid.margin", Dim::Dimensionless},
      {"grid.window", Dim::Time},
      {"analysis.interference", Dim::Bool},
      {"analysis.analyzer_phase", Dim::Angle},
      {"analysis.phase_fit_fraction", Dim::Dimensionless},
      {"design.configuration", Dim::Word},
      {"design.t_i", Dim::Time},
      {"design.bandwidth", Dim::AngularFrequency},
      {"design.magnification", Dim::Dimensionless},
      {"design.far_field_multiplier", Dim::Dimensionless},
      {"output.dir", Dim::Text},
  };
  return keys;
}

bool is_numeric(Dim dim) {
  return dim != Dim::Bool && dim != Dim::Word && dim != Dim::Text;
}

std::string_view dim_name(Dim dim) {
  switch (dim) {
    case Dim::Time: return "a time";
    case Dim::TimeOrWord: return "a time or 'ideal'";
    case Dim::Gdd: return "a GDD";
    case Dim::Angle: return "an angle";
    case Dim::AngularFrequency: return "an angular frequency";
    case Dim::Wavelength: return "a wavelength";
    case Dim::Dimensionless: return "a dimensionless number";
    case Dim::Count: return "an integer";
    case Dim::Bool: return "true or false";
    case Dim::Word: return "a keyword";
    case Dim::Text: return "a string";
  }
  return "a value";
}

// Typed access to a RawDocument that accumulates diagnostics.
class Reader {
public:
  explicit Reader(const RawDocument& document) : document_(document) {}

  std::vector<Diagnostic>& diagnostics() { return diagnostics_; }

  bool has(std::string_view key) const { return document_.values.count(std::string(key)) > 0; }
  bool has_section(std::string_view section) const {
    const std::string prefix = std::string(section) + ".";
    return std::any_of(document_.values.begin(), document_.values.end(),
                       [&](const auto& kv) { return kv.first.rfind(prefix, 0) == 0; });
  }

  void error(std::string_view key, std::string message) {
    if (auto it = document_.values.find(std::string(key)); it != document_.values.end()) {
      diagnostics_.push_back({it->second.line, it->second.column, std::move(message)});
      return;
    }
    const std::string section(key.substr(0, key.find('.')));
    auto s = document_.section_lines.find(section);
    diagnostics_.push_back({s == document_.section_lines.end() ? 0 : s->second, 1, std::move(message)});
  }

  void missing(std::string_view key) { error(key, "missing required key '" + std::string(key) + "'"); }

  void not_applicable(std::string_view key, std::string_view why) {
    if (has(key))
      error(key, "key '" + std::string(key) + "' does not apply " + std::string(why));
  }

  // Numeric value converted to the canonical unit.
  std::optional<double> number(std::string_view key, bool required = false) {
    auto it = document_.values.find(std::string(key));
    if (it == document_.values.end()) {
      if (required)
        missing(key);
      return std::nullopt;
    }
    const Dim dim = schema().find(key)->second;
    const RawValue& v = it->second;
    if (v.kind != RawValue::Kind::Number) {
      error(key, "'" + std::string(key) + "' must be " + std::string(dim_name(dim)));
      return std::nullopt;
    }
    const auto& units = units_for(dim);
    if (units.empty()) {
      if (!v.unit.empty() && v.unit != "1") {
        error(key, "unit mismatch: '" + std::string(key) + "' is dimensionless, got '" + v.unit + "'");
        return std::nullopt;
      }
      if (dim == Dim::Count && v.number != std::floor(v.number)) {
        error(key, "'" + std::string(key) + "' must be an integer");
        return std::nullopt;
      }
      return v.number;
    }
    if (v.unit.empty()) {
      if (dim == Dim::Angle)
        return v.number;
      error(key, "missing unit: '" + std::string(key) + "' is " + std::string(dim_name(dim)) + " (e.g. " +
                     std::string(units.front().unit) + ")");
      return std::nullopt;
    }
    for (const auto& u : units)
      if (u.unit == v.unit)
        return v.number * u.factor;
    std::string accepted;
    for (const auto& u : units)
      accepted += (accepted.empty() ? "" : ", ") + std::string(u.unit);
    error(key, "unit mismatch: '" + std::string(key) + "' is " + std::string(dim_name(dim)) + ", got '" + v.unit +
                   "' (accepted: " + accepted + ")");
    return std::nullopt;
  }

  std::optional<std::string> word(std::string_view key, bool required = false) {
    auto it = document_.values.find(std::string(key));
    if (it == document_.values.end()) {
      if (required)
        missing(key);
      return std::nullopt;
    }
    const RawValue& v = it->second;
    if (v.kind == RawValue::Kind::Word || v.kind == RawValue::Kind::String)
      return v.text;
    error(key, "'" + std::string(key) + "' must be " + std::string(dim_name(schema().find(key)->second)));
    return std::nullopt;
  }

  std::optional<bool> flag(std::string_view key) {
    auto it = document_.values.find(std::string(key));
    if (it == document_.values.end())
      return std::nullopt;
    if (it->second.kind == RawValue::Kind::Bool)
      return it->second.flag;
    error(key, "'" + std::string(key) + "' must be true or false");
    return std::nullopt;
  }

  const RawValue* raw(std::string_view key) const {
    auto it = document_.values.find(std::string(key));
    return it == document_.values.end() ? nullptr : &it->second;
  }

  // Number that must satisfy a predicate; reports `requirement` otherwise.
  std::optional<double> checked(std::string_view key, bool required, const std::function<bool(double)>& ok,
                                std::string_view requirement) {
    auto v = number(key, required);
    if (v && !ok(*v)) {
      error(key, "'" + std::string(key) + "' " + std::string(requirement));
      return std::nullopt;
    }
    return v;
  }

private:
  const RawDocument& document_;
  std::vector<Diagnostic> diagnostics_;
};

bool positive(double x) { return x > 0.0; }

std::optional<InputSpec> read_input(Reader& r) {
  if (!r.has_section("input"))
    return std::nullopt;
  InputSpec spec;
  const auto kind = r.word("input.kind", true);
  if (kind && *kind != "gaussian" && *kind != "time-bin") {
    r.error("input.kind", "input.kind must be 'gaussian' or 'time-bin', got '" + *kind + "'");
    return std::nullopt;
  }
  if (!kind)
    return std::nullopt;
  if (auto c = r.checked("input.carrier", false, positive, "must be positive"))
    spec.carrier_nm = *c;
  if (*kind == "gaussian") {
    spec.kind = InputKind::Gaussian;
    if (auto v = r.checked("input.t_fwhm", true, positive, "must be positive"))
      spec.t_fwhm = *v;
    if (auto v = r.number("input.center"))
      spec.center = *v;
    for (auto key : {"input.tau", "input.delta_t", "input.psi"})
      r.not_applicable(key, "to a gaussian input");
  } else {
    spec.kind = InputKind::TimeBin;
    if (auto v = r.checked("input.tau", true, positive, "must be positive"))
      spec.tau = *v;
    if (auto v = r.checked("input.delta_t", true, [](double x) { return x >= 0.0; }, "must be non-negative"))
      spec.delta_t = *v;
    if (auto v = r.number("input.psi"))
      spec.psi = *v;
    for (auto key : {"input.t_fwhm", "input.center"})
      r.not_applicable(key, "to a time-bin input");
  }
  return spec;
}

std::optional<SystemSpec> read_system(Reader& r) {
  if (!r.has_section("system"))
    return std::nullopt;
  SystemSpec spec;
  const auto kind_name = r.word("system.kind", true);
  std::optional<TopologyKind> kind;
  if (kind_name) {
    kind = parse_topology(*kind_name);
    if (!kind)
      r.error("system.kind", "system.kind must be single-lens, field-lens or telescope, got '" + *kind_name + "'");
  }
  const auto m = r.number("system.magnification", true);
  if (m) {
    spec.magnification = *m;
    if (*m == 0.0)
      r.error("system.magnification", "degenerate magnification: M = 0 forms no image");
    else if (*m == 1.0 && kind && *kind != TopologyKind::Telescope)
      r.error("system.magnification", "degenerate magnification: M = 1 forces D1 = 0 in a single-lens system");
  }

  const int scale_keys = int(r.has("system.focal_gdd")) + int(r.has("system.d1")) + int(r.has("system.max_gdd"));
  if (scale_keys == 0)
    r.missing(kind == TopologyKind::Telescope ? "system.d1" : "system.focal_gdd");
  else if (scale_keys > 1)
    r.error("system.max_gdd", "give exactly one of system.focal_gdd, system.d1, system.max_gdd");
  auto nonzero = [](double x) { return x != 0.0; };
  spec.focal_gdd = r.checked("system.focal_gdd", false, nonzero, "must be non-zero");
  spec.d1 = r.checked("system.d1", false, nonzero, "must be non-zero");
  spec.max_gdd = r.checked("system.max_gdd", false, positive, "must be positive");
  if (kind == TopologyKind::Telescope)
    r.not_applicable("system.focal_gdd", "to a telescope (use system.d1)");
  else if (kind)
    r.not_applicable("system.d1", "to a single-lens system (use system.focal_gdd)");

  if (const RawValue* pump = r.raw("system.pump_fwhm")) {
    if (pump->kind == RawValue::Kind::Word) {
      if (pump->text != "ideal")
        r.error("system.pump_fwhm", "system.pump_fwhm must be a time or 'ideal'");
    } else {
      spec.pump_fwhm = r.checked("system.pump_fwhm", false, positive, "must be positive");
    }
  }
  if (auto v = r.checked("system.pump_carrier", false, positive, "must be positive"))
    spec.pump_carrier_nm = *v;
  if (auto v = r.number("system.tod_ratio"))
    spec.tod_ratio = *v;
  if (auto v = r.checked("system.transmission", false, [](double x) { return x > 0.0 && x <= 1.0; },
                         "must lie in (0, 1]"))
    spec.transmission = *v;
  if (auto v = r.checked("system.far_field_threshold", false, positive, "must be positive"))
    spec.far_field_threshold = *v;
  if (!kind)
    return std::nullopt;
  spec.kind = *kind;
  return spec;
}

GridSpec read_grid(Reader& r) {
  GridSpec spec;
  if (auto n = r.checked("grid.n_samples", false,
                         [](double x) {
                           const auto v = static_cast<unsigned long long>(x);
                           return x >= 64.0 && x <= double(1u << 24) && (v & (v - 1)) == 0;
                         },
                         "must be a power of two between 64 and 2^24"))
    spec.n_samples = static_cast<std::size_t>(*n);
  if (auto v = r.checked("grid.margin", false, [](double x) { return x >= 1.0; }, "must be >= 1"))
    spec.margin = *v;
  spec.window = r.checked("grid.window", false, positive, "must be positive");
  return spec;
}

AnalysisSpec read_analysis(Reader& r, const std::optional<InputSpec>& input) {
  AnalysisSpec spec;
  const bool time_bin = input && input->kind == InputKind::TimeBin;
  spec.interference = r.flag("analysis.interference").value_or(time_bin);
  if (spec.interference && input && !time_bin)
    r.error("analysis.interference", "interference analysis needs a time-bin input");
  spec.analyzer_phase = r.number("analysis.analyzer_phase").value_or(input ? input->psi : 0.0);
  if (auto v = r.checked("analysis.phase_fit_fraction", false, positive, "must be positive"))
    spec.phase_fit_fraction = *v;
  return spec;
}

std::optional<DesignRequest> read_design(Reader& r) {
  if (!r.has_section("design"))
    return std::nullopt;
  DesignRequest request{};
  const auto name = r.word("design.configuration", true);
  std::optional<DesignConfiguration> configuration;
  if (name) {
    configuration = parse_configuration(*name);
    if (!configuration)
      r.error("design.configuration",
              "design.configuration must be far-field, telescope or field-lens, got '" + *name + "'");
  }
  const auto t_i = r.checked("design.t_i", true, positive, "must be positive");
  const auto bw = r.checked("design.bandwidth", true, positive, "must be positive");
  const auto m = r.checked("design.magnification", true, positive, "must be positive (|M|)");
  request.far_field_multiplier =
      r.checked("design.far_field_multiplier", false, [](double x) { return x >= 1.0; }, "must be >= 1")
          .value_or(10.0);
  if (!configuration || !t_i || !bw || !m)
    return std::nullopt;
  request.configuration = *configuration;
  request.t_i = *t_i;
  request.bandwidth = *bw;
  request.magnification = *m;
  return request;
}

}  // namespace

double InputSpec::extent() const {
  return kind == InputKind::Gaussian ? t_fwhm : delta_t + tau;
}

double InputSpec::bandwidth() const {
  return 4.0 * kLn2 / (kind == InputKind::Gaussian ? t_fwhm : tau);
}

Scenario build_scenario(const RawDocument& document) {
  Reader r(document);
  for (const auto& [key, value] : document.values)
    if (!schema().count(key))
      r.diagnostics().push_back({value.line, value.column, "unknown key '" + key + "'"});

  Scenario scenario;
  scenario.input = read_input(r);
  scenario.system = read_system(r);
  scenario.grid = read_grid(r);
  scenario.analysis = read_analysis(r, scenario.input);
  scenario.design = read_design(r);
  if (r.has("output.dir"))
    scenario.output_dir = r.word("output.dir");

  auto& diagnostics = r.diagnostics();
  if (!diagnostics.empty()) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    throw ScenarioError(ErrorCategory::ScenarioSemantic, std::move(diagnostics));
  }
  return scenario;
}

Scenario parse_scenario(std::string_view text) { return build_scenario(parse_document(text)); }

std::string canonical_unit(std::string_view key) {
  auto it = schema().find(key);
  if (it == schema().end() || !is_numeric(it->second))
    throw ScenarioError(ErrorCategory::ScenarioSemantic,
                        {{0, 0, "'" + std::string(key) + "' is not a numeric scenario key"}});
  const auto& units = units_for(it->second);
  return units.empty() ? std::string() : std::string(units.front().unit);
}

RawDocument with_override(const RawDocument& document, std::string_view key, double value) {
  RawDocument out = document;
  RawValue v;
  v.kind = RawValue::Kind::Number;
  v.number = value;
  v.unit = canonical_unit(key);
  if (auto it = document.values.find(std::string(key)); it != document.values.end()) {
    v.line = it->second.line;
    v.column = it->second.column;
  }
  out.values[std::string(key)] = v;
  return out;
}

}  // namespace qti
