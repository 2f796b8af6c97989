// Shipped scenario files through the library pipeline.

#include "qti/runner.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qti;

namespace {

Scenario load(const std::string& name) {
  std::ifstream in(std::string(QTI_SCENARIOS) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace

TEST_CASE("every shipped scenario parses") {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(QTI_SCENARIOS)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load(entry.path().filename().string()));
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("time-bin reproduction runs for all topologies") {
  for (const char* name : {"timebin_field_lens.qti", "timebin_telescope.qti", "timebin_single_lens.qti"}) {
    CAPTURE(name);
    const SimulationResult r = simulate(load(name));
    CHECK(max_abs_gdd(r.topology) == doctest::Approx(1000.0));
    CHECK(std::abs(r.topology.magnification) == 20.0);
    REQUIRE(r.interference);
    // Pumped lenses only remove energy.
    CHECK(r.metrics.back().energy < r.metrics.front().energy);
    // Output intensity matches the magnified input regardless of phase errors.
    CHECK(r.image_intensity_overlap > 0.99);
    // Each bin is magnified from 5 ps to 100 ps.
    CHECK(r.metrics.back().fwhm.value_or(0.0) == doctest::Approx(100.0).epsilon(0.1));
  }
}

TEST_CASE("signal carrier returns after a down/up pair") {
  const SimulationResult r = simulate(load("timebin_field_lens.qti"));
  CHECK(r.metrics[1].carrier_nm == 710.0);
  CHECK(r.metrics[2].carrier_nm == doctest::Approx(oracle::inverse_wavelength_difference(710.0, 1550.0)));
  CHECK(r.metrics[3].carrier_nm == r.metrics[2].carrier_nm);
  CHECK(r.metrics[4].carrier_nm == doctest::Approx(710.0).epsilon(1e-12));
}

TEST_CASE("pumped field lens stays close to the ideal image") {
  Scenario s = load("timebin_field_lens.qti");
  const SimulationResult pumped = simulate(s);
  s.system->pump_fwhm.reset();
  s.grid.n_samples = pumped.grid.size();
  s.grid.window = pumped.grid.window();
  const SimulationResult ideal = simulate(s);
  CHECK(std::abs(ideal.image_overlap) > 0.9999);
  CHECK(std::abs(overlap(pumped.trace.output(), ideal.trace.output())) > 0.99);
  CHECK(ideal.interference->visibility > pumped.interference->visibility);
}
