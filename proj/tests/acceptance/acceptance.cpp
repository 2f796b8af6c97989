// Acceptance checks, one line per criterion. Exit status is the number of
// failing criteria.

#include "qti/design.hpp"
#include "qti/elements.hpp"
#include "qti/error.hpp"
#include "qti/interferometry.hpp"
#include "qti/runner.hpp"
#include "qti/scenario.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace qti;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario load(const std::string& name) { return parse_scenario(slurp(fs::path(QTI_SCENARIOS) / name)); }

Scenario gaussian_system(const std::string& system) {
  return parse_scenario("[input]\nkind = gaussian\nt_fwhm = 5 ps\n[system]\n" + system);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome design_regression() {
  const DesignReport f = requirements({5.0, 1.0, 20.0, DesignConfiguration::FieldLens});
  const double d1 = f.entry("D1").dispersion_bound, df = f.entry("D_f").dispersion_bound;
  const double d2 = f.entry("D2").dispersion_bound, dr = f.entry("D_r").dispersion_bound;
  const bool exact = rel(d1, 5.25) <= 1e-12 && rel(df, 5.0) <= 1e-12 && rel(d2, 105.0) <= 1e-12 &&
                     rel(dr, 100.0) <= 1e-12;
  const DesignReport ff = requirements({5.0, 1.0, 20.0, DesignConfiguration::FarField});
  const double ff_d2 = ff.entry("D2").dispersion_bound;
  const double expected = std::numbers::pi * 400.0 * 25.0 / 8.0;
  // Quoted as ">>3,900": two significant figures.
  const bool far = rel(ff_d2, expected) <= 1e-12 && std::floor(ff_d2 / 100.0) * 100.0 == 3900.0;
  return {exact && far, fmt("D1=%.15g D_f=%.15g D2=%.15g D_r=%.15g ps2; far-field D2 bound %.2f ps2", d1, df, d2,
                            dr, ff_d2)};
}

Outcome single_lens_residual() {
  const SimulationResult r = simulate(gaussian_system("kind = single-lens\nmagnification = -20\nfocal_gdd = 5 ps2\n"));
  const double expected = 1.0 / (2.0 * -20.0 * 5.0);
  const double c2 = r.metrics.back().phase->curvature;
  return {rel(c2, expected) < 0.01 && r.image_intensity_overlap >= 0.999,
          fmt("c2=%.6g rad/ps2 (expected %.6g, off by %.3g%%), intensity overlap %.6f", c2, expected,
              100 * rel(c2, expected), r.image_intensity_overlap)};
}

Outcome corrected(const std::string& system) {
  const SimulationResult r = simulate(gaussian_system(system));
  const double rms = r.metrics.back().phase->flat_rms;
  const double ov = std::abs(r.image_overlap);
  return {rms < 0.01 && ov >= 0.999, fmt("phase rms over image FWHM %.3g rad, |overlap| %.9f", rms, ov)};
}

Outcome visibility_reproduction() {
  const double vf = simulate(load("timebin_field_lens.qti")).interference->visibility;
  const double vt = simulate(load("timebin_telescope.qti")).interference->visibility;
  const double vs = simulate(load("timebin_single_lens.qti")).interference->visibility;
  const bool pass = std::abs(vf - 0.984) <= 0.02 && std::abs(vt - 0.986) <= 0.02 && vs < 0.05;
  return {pass, fmt("field lens v=%.4f, telescope v=%.4f, single lens v=%.4f", vf, vt, vs)};
}

Outcome aberrations() {
  Scenario s = load("timebin_field_lens.qti");
  const double half_width = std::abs(s.system->magnification) * s.input->extent() / 4.0;

  s.system->pump_fwhm.reset();
  const SimulationResult ideal = simulate(s);
  s.system->pump_fwhm = s.input->tau;
  const SimulationResult pumped = simulate(s);
  const double e_ideal = ideal.metrics.back().energy, e_pumped = pumped.metrics.back().energy;
  const double w_ideal = wing_energy_ratio(ideal.trace.output(), half_width);
  const double w_pumped = wing_energy_ratio(pumped.trace.output(), half_width);

  s.system->pump_fwhm.reset();
  s.system->tod_ratio = 1.0;
  const double skew1 = asymmetry(simulate(s).trace.output());
  s.system->tod_ratio = 0.1;
  const double skew01 = asymmetry(simulate(s).trace.output());

  const bool pass = e_pumped < e_ideal && w_pumped < w_ideal && std::abs(skew1) > 0.01 &&
                    std::abs(skew01) * 10.0 <= std::abs(skew1);
  return {pass, fmt("energy %.4f -> %.4f, wing ratio %.3f -> %.3f; skew %.4g (1 ps) vs %.4g (0.1 ps), ratio %.1f",
                    e_ideal, e_pumped, w_ideal, w_pumped, skew1, skew01, std::abs(skew1 / skew01))};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(QTI_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome properties() {
  // Parseval on a random envelope.
  const TimeGrid grid = TimeGrid::centered(1 << 15, 4000.0);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  std::vector<Complex> s(grid.size());
  for (auto& x : s)
    x = {nd(rng), nd(rng)};
  const SampledEnvelope noise(grid, s);
  double et = 0, ew = 0;
  for (auto a : noise.samples())
    et += std::norm(a) * grid.dt();
  const SpectralEnvelope spectrum = to_frequency(noise);
  for (auto a : spectrum.samples())
    ew += std::norm(a) * grid.d_omega();
  const double parseval = std::abs(et - ew) / et;

  // Additivity and inverse.
  const SampledEnvelope tb = time_bin_pulse(grid, 5.0, 15.0, 0.4);
  auto diff = [](const SampledEnvelope& a, const SampledEnvelope& b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
      m = std::max(m, std::abs(a[k] - b[k]));
    return m;
  };
  const double additivity =
      diff(apply_dispersion(apply_dispersion(tb, {120.0, 3.0}), {-45.0, 2.0}), apply_dispersion(tb, {75.0, 5.0}));
  const double inverse = diff(apply_dispersion(apply_dispersion(tb, {400.0, 40.0}), {-400.0, -40.0}), tb);

  const double width = fwhm(apply_dispersion(gaussian_pulse(grid, 5.0), {5.0}));

  // Visibility under global phase/amplitude.
  const SimulationResult sim = simulate(load("timebin_field_lens.qti"));
  const double v = sim.interference->visibility;
  double dv = 0;
  for (Complex f : {Complex(3.0, 0.0), std::polar(0.2, 1.3), Complex(0.0, -1.0)})
    dv = std::max(dv, std::abs(visibility_experiment(sim.trace.output().scaled(f), sim.bin_delay, 0.0).visibility - v));

  // Bit-identical CLI reruns.
  const fs::path a = fs::temp_directory_path() / "qti_accept_a", b = fs::temp_directory_path() / "qti_accept_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string sc = (fs::path(QTI_SCENARIOS) / "timebin_telescope.qti").string();
  bool identical = run_cli("simulate " + sc + " --out " + a.string()) == 0 &&
                   run_cli("simulate " + sc + " --out " + b.string()) == 0;
  std::size_t files = 0;
  if (identical)
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      identical = identical && slurp(e.path()) == slurp(b / e.path().filename());
    }
  identical = identical && files > 0;
  fs::remove_all(a);
  fs::remove_all(b);

  const bool pass = parseval < 1e-9 && additivity < 1e-12 && inverse < 1e-12 && rel(width, 5.718) < 1e-3 &&
                    dv < 1e-12 && identical;
  return {pass, fmt("parseval %.2g, additivity %.2g, inverse %.2g, width %.4f ps, visibility drift %.2g, "
                    "%zu artifacts %s",
                    parseval, additivity, inverse, width, dv, files, identical ? "identical" : "DIFFER")};
}

Outcome carriers() {
  const SimulationResult r = simulate(load("timebin_field_lens.qti"));
  const double signal = r.metrics.front().carrier_nm;
  double idler = 0.0;
  double pump = 0.0;
  for (const auto& stage : r.topology.stages)
    if (const auto* lens = std::get_if<TimeLens>(&stage.element); lens && lens->direction == ConversionDirection::Down) {
      idler = lens->output_carrier_nm();
      pump = lens->pump_carrier_nm;
    }
  const double back = r.metrics.back().carrier_nm;
  const double relation = std::abs(1.0 / idler - (1.0 / signal - 1.0 / pump)) / (1.0 / idler);
  const bool pass = rel(idler, 1310.0) < 1e-3 && relation < 1e-3 && rel(back, signal) < 1e-3;
  return {pass, fmt("%.1f nm signal, %.1f nm pump -> %.2f nm idler -> %.6f nm", signal, pump, idler, back)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"design regression", design_regression},
      {"single-lens residual phase", single_lens_residual},
      {"field-lens correction",
       [] { return corrected("kind = field-lens\nmagnification = -20\nfocal_gdd = 5 ps2\n"); }},
      {"telescope correction", [] { return corrected("kind = telescope\nmagnification = 20\nd1 = 5 ps2\n"); }},
      {"visibility reproduction", visibility_reproduction},
      {"aberration phenomenology", aberrations},
      {"property suite", properties},
      {"carrier bookkeeping", carriers},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
  }
  std::fflush(stdout);
  return failures;
}
