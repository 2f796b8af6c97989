// Drives the qti executable end to end.

#include "qti/interferometry.hpp"
#include "qti/serialize.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qti;

namespace {

const fs::path kWork = fs::temp_directory_path() / "qti_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string err;
};

// Runs `qti <args>` with an optional environment prefix; stderr is captured.
Run run_qti(const std::string& args, const std::string& env = "env -u QTI_OUT_DIR") {
  fs::create_directories(kWork);
  const fs::path err = kWork / "stderr.txt";
  const std::string cmd = env + " " + QTI_CLI + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::string scenario(const std::string& name) { return std::string(QTI_SCENARIOS) + "/" + name; }

fs::path fresh(const std::string& name) {
  const fs::path p = kWork / name;
  fs::remove_all(p);
  return p;
}

fs::path write_scenario(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

TimeGrid grid_of(const json& report) {
  const auto& g = report["grid"];
  return TimeGrid(static_cast<std::size_t>(g["n_samples"]["value"].get<double>()), g["dt"]["value"].get<double>(),
                  g["t0"]["value"].get<double>());
}

}  // namespace

TEST_CASE("simulate artifacts are bit-identical across runs") {
  const fs::path a = fresh("det_a"), b = fresh("det_b");
  REQUIRE(run_qti("simulate " + scenario("timebin_field_lens.qti") + " --out " + a.string()).code == 0);
  REQUIRE(run_qti("simulate " + scenario("timebin_field_lens.qti") + " --out " + b.string()).code == 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
  CHECK(files == 8);
}

TEST_CASE("CSV time axis is the report grid") {
  const fs::path out = fresh("axis");
  REQUIRE(run_qti("simulate " + scenario("gaussian_field_lens.qti") + " --out " + out.string()).code == 0);
  const json report = json::parse(slurp(out / "report.json"));
  const TimeGrid grid = grid_of(report);
  for (const auto& stage : report["stages"]) {
    std::istringstream in(slurp(out / stage["file"].get<std::string>()));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_ps,re,im,intensity");
    std::size_t k = 0;
    double prev = -INFINITY;
    while (std::getline(in, line)) {
      const double t = std::stod(line.substr(0, line.find(',')));
      CHECK(t > prev);
      if (k > 0)
        CHECK(std::abs((t - prev) - grid.dt()) < 1e-9 * grid.dt());
      CHECK(t == grid.time(k));
      prev = t;
      ++k;
    }
    CHECK(k == grid.size());
  }
}

TEST_CASE("report values are re-derivable from the waveform CSVs") {
  const fs::path out = fresh("rederive");
  REQUIRE(run_qti("simulate " + scenario("timebin_telescope.qti") + " --out " + out.string()).code == 0);
  const json report = json::parse(slurp(out / "report.json"));
  const TimeGrid grid = grid_of(report);

  SampledEnvelope last(grid, std::vector<Complex>(grid.size()));
  for (const auto& stage : report["stages"]) {
    const SampledEnvelope env = read_waveform_csv(slurp(out / stage["file"].get<std::string>()), grid);
    CHECK(energy(env) == stage["energy"]["value"].get<double>());
    CHECK(centroid(env) == stage["centroid"]["value"].get<double>());
    CHECK(fwhm(env) == stage["fwhm"]["value"].get<double>());
    const PhaseFit fit = phase_fit_quadratic(env);
    CHECK(fit.curvature == stage["phase_fit"]["c2"]["value"].get<double>());
    CHECK(fit.flat_rms == stage["phase_fit"]["flat_rms"]["value"].get<double>());
    last = env;
  }
  const auto& inter = report["interference"];
  const InterferenceResult r =
      visibility_experiment(last, inter["delay"]["value"].get<double>(), report["input"]["psi"]["value"].get<double>());
  CHECK(r.visibility == report["visibility"]["value"].get<double>());
  CHECK(r.energy_constructive == inter["energy_constructive"]["value"].get<double>());
  const SampledEnvelope c = read_waveform_csv(slurp(out / inter["constructive_file"].get<std::string>()), grid);
  CHECK(energy(c) == energy(r.constructive));

  // Every listed file exists.
  for (const auto& f : report["files"])
    CHECK(fs::exists(out / f.get<std::string>()));
}

TEST_CASE("analyzer-phase sweep is sinusoidal and matches the reported visibility") {
  const fs::path out = fresh("sweep");
  const fs::path sim = fresh("sweep_sim");
  REQUIRE(run_qti("sweep " + scenario("timebin_field_lens.qti") +
              " --param analysis.analyzer_phase --range 0:6.283185307179586:32 --out " + out.string())
              .code == 0);
  REQUIRE(run_qti("simulate " + scenario("timebin_field_lens.qti") + " --out " + sim.string()).code == 0);
  const double v = json::parse(slurp(sim / "report.json"))["visibility"]["value"].get<double>();

  std::istringstream in(slurp(out / "sweep.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("analysis.analyzer_phase_rad,", 0) == 0);
  std::vector<double> phi, e;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');)
      cols.push_back(c);
    REQUIRE(cols.size() == 6);
    phi.push_back(std::stod(cols[0]));
    e.push_back(std::stod(cols[4]));
  }
  REQUIRE(e.size() == 32);
  CHECK(phi.front() == 0.0);
  CHECK(phi.back() < 2 * M_PI);

  // Fourier fit E = a + b cos + c sin; residual must vanish.
  const double n = static_cast<double>(e.size());
  double a = 0, b = 0, c = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    a += e[i] / n;
    b += 2 * e[i] * std::cos(phi[i]) / n;
    c += 2 * e[i] * std::sin(phi[i]) / n;
  }
  double resid = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    resid = std::max(resid, std::abs(e[i] - (a + b * std::cos(phi[i]) + c * std::sin(phi[i]))));
  CHECK(resid < 1e-9 * a);

  const double hi = *std::max_element(e.begin(), e.end());
  const double lo = *std::min_element(e.begin(), e.end());
  const double sampled = (hi - lo) / (hi + lo);
  const double fitted = std::hypot(b, c) / a;
  CHECK(sampled == doctest::Approx(v).epsilon(0.01));
  CHECK(fitted >= v - 1e-9);
  CHECK(fitted == doctest::Approx(v).epsilon(0.01));
}

TEST_CASE("design subcommand") {
  const fs::path out = fresh("design");
  REQUIRE(run_qti("design " + scenario("field_lens_design.qti") + " --out " + out.string()).code == 0);
  const json j = json::parse(slurp(out / "design.json"));
  std::map<std::string, double> bounds;
  for (const auto& e : j["entries"])
    bounds[e["element"]] = e["dispersion_bound"]["value"].get<double>();
  CHECK(bounds["D1"] == 5.25);
  CHECK(bounds["D_f"] == 5.0);
  CHECK(bounds["D2"] == 105.0);
  CHECK(bounds["D_r"] == 100.0);
  CHECK(run_qti("design " + scenario("gaussian_field_lens.qti") + " --out " + fresh("nodesign").string()).code == 4);
}

TEST_CASE("errors map to exit codes and leave no artifacts") {
  const fs::path out = fresh("bad");
  const fs::path syntax = write_scenario("syntax.qti", "[input\nkind = gaussian\n");
  Run r = run_qti("simulate " + syntax.string() + " --out " + out.string());
  CHECK(r.code == 3);
  const json e = json::parse(r.err);
  CHECK(e["error"] == "scenario-syntax");
  CHECK(e["diagnostics"][0]["line"] == 1);
  CHECK_FALSE(fs::exists(out));

  const fs::path semantic = write_scenario(
      "semantic.qti", "[input]\nkind = gaussian\nt_fwhm = 5 ps\n[system]\nkind = field-lens\nmagnification = 0\n"
                      "focal_gdd = 5 ps2\n");
  r = run_qti("simulate " + semantic.string() + " --out " + out.string());
  CHECK(r.code == 4);
  CHECK(r.err.find("degenerate magnification") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  // A pinned grid that cannot hold the image.
  const fs::path overflow = write_scenario(
      "overflow.qti", "[input]\nkind = gaussian\nt_fwhm = 5 ps\n[system]\nkind = field-lens\nmagnification = -20\n"
                      "focal_gdd = 5 ps2\n[grid]\nn_samples = 4096\nwindow = 120 ps\n");
  r = run_qti("simulate " + overflow.string() + " --out " + out.string());
  CHECK(r.code == 8);
  CHECK(json::parse(r.err)["error"] == "grid-overflow");
  CHECK_FALSE(fs::exists(out));

  CHECK(run_qti("simulate " + (kWork / "missing.qti").string()).code == 11);
  CHECK(run_qti("simulate").code == 2);
  CHECK(run_qti("sweep " + scenario("timebin_field_lens.qti") + " --param analysis.analyzer_phase --range 0:1").code == 5);
}

TEST_CASE("output directory precedence") {
  const fs::path env_dir = fresh("from_env");
  const fs::path scen_dir = fresh("from_scenario");
  const fs::path flag_dir = fresh("from_flag");
  const std::string design = slurp(scenario("field_lens_design.qti"));
  const fs::path with_dir = write_scenario("with_dir.qti", design + "[output]\ndir = \"" + scen_dir.string() + "\"\n");

  CHECK(run_qti("design " + scenario("field_lens_design.qti"), "QTI_OUT_DIR=" + env_dir.string()).code == 0);
  CHECK(fs::exists(env_dir / "design.json"));

  CHECK(run_qti("design " + with_dir.string(), "QTI_OUT_DIR=" + env_dir.string()).code == 0);
  CHECK(fs::exists(scen_dir / "design.json"));

  CHECK(run_qti("design " + with_dir.string() + " --out " + flag_dir.string(), "QTI_OUT_DIR=" + env_dir.string()).code ==
        0);
  CHECK(fs::exists(flag_dir / "design.json"));
}
