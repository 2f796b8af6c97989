#include "qti/serialize.hpp"

#include "qti/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qti {

using nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc())
    fail(ErrorCategory::Io, "number formatting failed");
  return std::string(buf, ptr);
}

std::string waveform_csv(const SampledEnvelope& env) {
  std::string out = "t_ps,re,im,intensity\n";
  out.reserve(out.size() + env.size() * 80);
  const TimeGrid& grid = env.grid();
  for (std::size_t k = 0; k < env.size(); ++k) {
    const Complex a = env[k];
    out += format_number(grid.time(k));
    out += ',';
    out += format_number(a.real());
    out += ',';
    out += format_number(a.imag());
    out += ',';
    out += format_number(std::norm(a));
    out += '\n';
  }
  return out;
}

SampledEnvelope read_waveform_csv(const std::string& text, const TimeGrid& grid, double carrier_nm) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t_ps,re,im,intensity")
    fail(ErrorCategory::Io, "waveform CSV: unexpected header");
  std::vector<Complex> samples;
  samples.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    double fields[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 4; ++f) {
      const auto [next, ec] = std::from_chars(p, end, fields[f]);
      if (ec != std::errc())
        fail(ErrorCategory::Io, "waveform CSV: malformed row " + std::to_string(samples.size() + 2));
      p = next;
      if (f < 3) {
        if (p == end || *p != ',')
          fail(ErrorCategory::Io, "waveform CSV: malformed row " + std::to_string(samples.size() + 2));
        ++p;
      }
    }
    samples.emplace_back(fields[1], fields[2]);
  }
  if (samples.size() != grid.size())
    fail(ErrorCategory::Io, "waveform CSV: expected " + std::to_string(grid.size()) + " rows, found " +
                                std::to_string(samples.size()));
  return SampledEnvelope(grid, std::move(samples), carrier_nm);
}

namespace {

ordered_json q(double value, const char* unit) { return {{"value", value}, {"unit", unit}}; }

std::string_view bound_name(BoundKind k) { return k == BoundKind::AtLeast ? "at-least" : "much-greater"; }
std::string_view bandwidth_name(BandwidthKind k) { return k == BandwidthKind::AtLeast ? "at-least" : "available"; }

ordered_json design_object(const DesignReport& report) {
  ordered_json j;
  j["request"] = {{"configuration", configuration_name(report.request.configuration)},
                  {"t_i", q(report.request.t_i, "ps")},
                  {"bandwidth", q(report.request.bandwidth, "rad/ps")},
                  {"magnification", q(report.request.magnification, "1")},
                  {"far_field_multiplier", q(report.request.far_field_multiplier, "1")}};
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"element", e.element},
                       {"bound", bound_name(e.bound_kind)},
                       {"dispersion_bound", q(e.dispersion_bound, "ps2")},
                       {"recommended", q(e.recommended, "ps2")},
                       {"bandwidth_requirement", bandwidth_name(e.bandwidth_kind)},
                       {"bandwidth", q(e.bandwidth, "rad/ps")}});
  j["entries"] = std::move(entries);
  if (report.far_field_margin)
    j["far_field_margin"] = q(*report.far_field_margin, "1");
  j["far_field_comparison"] = {{"d2_far_field_bound", q(report.far_field.d2_far_field_bound, "ps2")},
                               {"d2_bound", q(report.far_field.d2_bound, "ps2")},
                               {"penalty", q(report.far_field.penalty, "1")}};
  j["compression"] = report.compression;
  j["small_dispersion_violated"] = report.small_dispersion_violated;
  j["notes"] = report.notes;
  return j;
}

ordered_json stage_object(const StageMetrics& m, const std::string& file) {
  ordered_json j;
  j["name"] = m.name;
  j["file"] = file;
  j["carrier"] = q(m.carrier_nm, "nm");
  j["energy"] = q(m.energy, "1");
  j["centroid"] = q(m.centroid, "ps");
  j["fwhm"] = m.fwhm ? q(*m.fwhm, "ps") : ordered_json(nullptr);
  if (m.phase) {
    const PhaseFit& p = *m.phase;
    j["phase_fit"] = {{"c2", q(p.curvature, "rad/ps2")},
                      {"rms_residual", q(p.rms_residual, "rad")},
                      {"flat_rms", q(p.flat_rms, "rad")},
                      {"window_start", q(p.window_start, "ps")},
                      {"window_end", q(p.window_end, "ps")},
                      {"samples_used", q(static_cast<double>(p.samples_used), "1")}};
  } else {
    j["phase_fit"] = nullptr;
  }
  return j;
}

ordered_json element_object(const Stage& stage) {
  ordered_json j;
  j["name"] = stage.name;
  if (const auto* d = std::get_if<DispersiveElement>(&stage.element)) {
    j["type"] = "dispersion";
    j["gdd"] = q(d->gdd, "ps2");
    j["tod"] = q(d->tod, "ps3");
    j["transmission"] = q(d->transmission, "1");
  } else {
    const auto& lens = std::get<TimeLens>(stage.element);
    j["type"] = "time-lens";
    j["direction"] = direction_name(lens.direction);
    j["focal_gdd"] = q(lens.focal_gdd, "ps2");
    j["pump_fwhm"] = lens.pump_seed_fwhm ? q(*lens.pump_seed_fwhm, "ps") : ordered_json("ideal");
    j["input_carrier"] = q(lens.input_carrier_nm, "nm");
    j["pump_carrier"] = q(lens.pump_carrier_nm, "nm");
    j["output_carrier"] = q(lens.output_carrier_nm(), "nm");
  }
  return j;
}

ordered_json input_object(const InputSpec& in) {
  ordered_json j;
  if (in.kind == InputKind::Gaussian) {
    j["kind"] = "gaussian";
    j["t_fwhm"] = q(in.t_fwhm, "ps");
    j["center"] = q(in.center, "ps");
  } else {
    j["kind"] = "time-bin";
    j["tau"] = q(in.tau, "ps");
    j["delta_t"] = q(in.delta_t, "ps");
    j["psi"] = q(in.psi, "rad");
  }
  j["carrier"] = q(in.carrier_nm, "nm");
  return j;
}

std::string stage_file(std::size_t index, const std::string& name) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "stage_%02zu_", index);
  return prefix + name + ".csv";
}

}  // namespace

std::string design_json(const DesignReport& report) { return design_object(report).dump(2) + "\n"; }

std::string simulation_json(const SimulationResult& r, const std::vector<NamedFile>& manifest) {
  auto file_for = [&](const std::string& role) {
    for (const auto& f : manifest)
      if (f.role == role)
        return f.file;
    return std::string();
  };

  ordered_json j;
  j["input"] = input_object(r.input);

  ordered_json system;
  system["kind"] = topology_name(r.topology.kind);
  system["magnification"] = q(r.topology.magnification, "1");
  system["magnification_abs"] = q(std::abs(r.topology.magnification), "1");
  system["max_abs_gdd"] = q(max_abs_gdd(r.topology), "ps2");
  ordered_json elements = ordered_json::array();
  for (const auto& stage : r.topology.stages)
    elements.push_back(element_object(stage));
  system["elements"] = std::move(elements);
  j["system"] = std::move(system);

  j["grid"] = {{"n_samples", q(static_cast<double>(r.grid.size()), "1")},
               {"dt", q(r.grid.dt(), "ps")},
               {"t0", q(r.grid.t0(), "ps")},
               {"window", q(r.grid.window(), "ps")}};

  ordered_json stages = ordered_json::array();
  for (const auto& m : r.metrics)
    stages.push_back(stage_object(m, file_for(m.name)));
  j["stages"] = std::move(stages);

  j["image"] = {{"overlap_abs", q(std::abs(r.image_overlap), "1")},
                {"overlap_phase", q(std::arg(r.image_overlap), "rad")},
                {"intensity_overlap", q(r.image_intensity_overlap, "1")}};

  if (r.far_field)
    j["far_field"] = {{"pass", r.far_field->pass},
                      {"delta_theta", q(r.far_field->delta_theta, "rad")},
                      {"margin", q(r.far_field->margin, "1")},
                      {"threshold", q(r.system.far_field_threshold, "1")}};

  if (r.interference) {
    const InterferenceResult& i = *r.interference;
    j["visibility"] = q(i.visibility, "1");
    j["interference"] = {{"delay", q(r.bin_delay, "ps")},
                         {"window_start", q(i.window_start, "ps")},
                         {"window_end", q(i.window_end, "ps")},
                         {"energy_constructive", q(i.energy_constructive, "1")},
                         {"energy_destructive", q(i.energy_destructive, "1")},
                         {"visibility", q(i.visibility, "1")},
                         {"peak_visibility", q(i.peak_visibility, "1")},
                         {"constructive_file", file_for("interference_constructive")},
                         {"destructive_file", file_for("interference_destructive")}};
  }

  if (r.design)
    j["design"] = design_object(*r.design);

  ordered_json files = ordered_json::array();
  for (const auto& f : manifest)
    files.push_back(f.file);
  files.push_back("report.json");
  j["files"] = std::move(files);
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::string& key, const std::vector<SweepRow>& rows) {
  std::string unit = canonical_unit(key);
  std::string out = key + (unit.empty() ? "" : "_" + unit) +
                    ",output_energy,output_fwhm_ps,output_c2_rad_per_ps2,central_energy,visibility\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows)
    out += format_number(r.value) + ',' + format_number(r.output_energy) + ',' + opt(r.output_fwhm) + ',' +
           opt(r.output_c2) + ',' + opt(r.central_energy) + ',' + opt(r.visibility) + '\n';
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::path missing = dir_;
  std::vector<fs::path> to_create;
  while (!missing.empty() && !fs::exists(missing, ec)) {
    to_create.push_back(missing);
    missing = missing.parent_path();
  }
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    fail(ErrorCategory::Io, "cannot create output directory " + dir_.string());
  created_dirs_.assign(to_create.begin(), to_create.end());  // deepest first
}

ArtifactWriter::~ArtifactWriter() {
  if (committed_)
    return;
  std::error_code ec;
  for (const auto& name : written_)
    std::filesystem::remove(dir_ / name, ec);
  for (const auto& d : created_dirs_)
    std::filesystem::remove(d, ec);  // only succeeds when empty
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  written_.push_back(name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out)
    fail(ErrorCategory::Io, "cannot write " + path.string());
}

void write_simulation(ArtifactWriter& out, const SimulationResult& result) {
  std::vector<NamedFile> manifest;
  for (std::size_t i = 0; i < result.trace.stages.size(); ++i) {
    const StageRecord& record = result.trace.stages[i];
    const std::string file = stage_file(i, record.name);
    out.write(file, waveform_csv(record.envelope));
    manifest.push_back({record.name, file});
  }
  if (result.interference) {
    out.write("interference_constructive.csv", waveform_csv(result.interference->constructive));
    manifest.push_back({"interference_constructive", "interference_constructive.csv"});
    out.write("interference_destructive.csv", waveform_csv(result.interference->destructive));
    manifest.push_back({"interference_destructive", "interference_destructive.csv"});
  }
  out.write("report.json", simulation_json(result, manifest));
}

}  // namespace qti
