#include "qti/elements.hpp"
#include "qti/error.hpp"

#include "oracle.hpp"

#include <doctest.h>

using namespace qti;

namespace {

double max_abs_diff(const SampledEnvelope& a, const SampledEnvelope& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

const TimeGrid& grid() {
  static const TimeGrid g = TimeGrid::centered(1 << 15, 4000.0);
  return g;
}

}  // namespace

TEST_CASE("dispersed gaussian matches the closed form") {
  const SampledEnvelope in = gaussian_pulse(grid(), 5.0);
  const SampledEnvelope out = apply_dispersion(in, {5.0});
  double err = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k)
    err = std::max(err, std::abs(out[k] - oracle::dispersed_gaussian(5.0, 5.0, grid().time(k))));
  CHECK(err < 1e-10);
  CHECK(oracle::dispersed_fwhm(5.0, 5.0) == doctest::Approx(5.718).epsilon(1e-3));
  CHECK(fwhm(out) == doctest::Approx(oracle::dispersed_fwhm(5.0, 5.0)).epsilon(1e-3));
  CHECK(energy(out) == doctest::Approx(energy(in)).epsilon(1e-12));

  // Negative GDD broadens equally with opposite chirp.
  const SampledEnvelope neg = apply_dispersion(in, {-5.0});
  CHECK(fwhm(neg) == doctest::Approx(fwhm(out)).epsilon(1e-12));
  CHECK(phase_fit_quadratic(neg).curvature == doctest::Approx(-phase_fit_quadratic(out).curvature).epsilon(1e-9));
  CHECK(phase_fit_quadratic(out).curvature == doctest::Approx(oracle::dispersed_curvature(5.0, 5.0)).epsilon(1e-3));
}

TEST_CASE("dispersion additivity and inverse") {
  const SampledEnvelope in = time_bin_pulse(grid(), 5.0, 15.0, 0.9);
  const SampledEnvelope two_step = apply_dispersion(apply_dispersion(in, {30.0, 4.0}), {-12.0, 1.0});
  const SampledEnvelope one_step = apply_dispersion(in, {18.0, 5.0});
  CHECK(max_abs_diff(two_step, one_step) < 1e-12);
  const SampledEnvelope undone = apply_dispersion(apply_dispersion(in, {250.0, 30.0}), {-250.0, -30.0});
  CHECK(max_abs_diff(undone, in) < 1e-12);
}

TEST_CASE("zero dispersion and transmission") {
  const SampledEnvelope in = gaussian_pulse(grid(), 5.0);
  CHECK(max_abs_diff(apply_dispersion(in, {}), in) == 0.0);
  const SampledEnvelope lossy = apply_dispersion(in, {10.0, 0.0, 0.5});
  CHECK(energy(lossy) == doctest::Approx(0.25 * energy(in)).epsilon(1e-12));
}

TEST_CASE("third-order dispersion skews the pulse") {
  const SampledEnvelope in = gaussian_pulse(grid(), 2.0);
  const SampledEnvelope out = apply_dispersion(in, {0.0, 10.0});
  const auto t = grid().times();
  const double skew = oracle::skewness(t, out.intensity());
  CHECK(std::abs(skew) > 0.1);
  const SampledEnvelope mirrored = apply_dispersion(in, {0.0, -10.0});
  CHECK(oracle::skewness(t, mirrored.intensity()) == doctest::Approx(-skew).epsilon(1e-9));
}

TEST_CASE("dispersion that leaves the window is reported") {
  const TimeGrid small = TimeGrid::centered(1024, 100.0);
  const SampledEnvelope in = gaussian_pulse(small, 2.0);
  try {
    apply_dispersion(in, {200.0});
    FAIL("expected GridOverflow");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::GridOverflow);
  }
}

TEST_CASE("carrier bookkeeping") {
  const double idler = converted_carrier(710.0, 1550.0, ConversionDirection::Down);
  CHECK(idler == doctest::Approx(oracle::inverse_wavelength_difference(710.0, 1550.0)).epsilon(1e-15));
  CHECK(idler == doctest::Approx(1310.0).epsilon(1e-3));
  const double back = converted_carrier(idler, 1550.0, ConversionDirection::Up);
  CHECK(back == doctest::Approx(710.0).epsilon(1e-12));
  CHECK(converted_carrier(1310.0, 1550.0, ConversionDirection::Up) ==
        doctest::Approx(oracle::inverse_wavelength_sum(1310.0, 1550.0)).epsilon(1e-15));
  // 1550 nm signal with a 710 nm pump has no difference-frequency wave.
  CHECK_THROWS_AS(converted_carrier(1550.0, 710.0, ConversionDirection::Down), Error);
}

TEST_CASE("ideal lens imprints the quadratic phase") {
  const SampledEnvelope in = gaussian_pulse(grid(), 20.0, 0.0, 1.0, 710.0);
  for (auto dir : {ConversionDirection::Down, ConversionDirection::Up}) {
    const TimeLens lens{dir, 50.0, std::nullopt, 710.0, 1550.0};
    const SampledEnvelope out = apply_time_lens(in, lens);
    const double sign = dir == ConversionDirection::Down ? 1.0 : -1.0;
    double err = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double t = grid().time(k);
      const Complex expected = Complex(0.0, 1.0) * std::polar(1.0, sign * t * t / 100.0) * in[k];
      err = std::max(err, std::abs(out[k] - expected));
    }
    CHECK(err < 1e-12);
    CHECK(out.carrier_nm() == doctest::Approx(lens.output_carrier_nm()));
  }
}

TEST_CASE("lens carrier checks") {
  const SampledEnvelope in = gaussian_pulse(grid(), 5.0, 0.0, 1.0, 800.0);
  const TimeLens lens{ConversionDirection::Down, 10.0, std::nullopt, 710.0, 1550.0};
  try {
    apply_time_lens(in, lens);
    FAIL("expected CarrierMismatch");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::CarrierMismatch);
  }
  // Unlabelled envelopes and lenses pass through.
  const TimeLens unlabeled{ConversionDirection::Down, 10.0};
  CHECK_NOTHROW(apply_time_lens(in, unlabeled));
  CHECK_THROWS_AS(apply_time_lens(in, TimeLens{ConversionDirection::Down, 0.0}), Error);
}

TEST_CASE("synthesized pump") {
  const double tau_p = 2.5;
  for (double chirp : {5.0, 50.0, -200.0}) {
    const PumpWaveform pump = synthesize_pump(grid(), tau_p, chirp);
    double peak = 0.0;
    for (auto a : pump.envelope.samples())
      peak = std::max(peak, std::abs(a));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-15));
    const double c2 = phase_fit_quadratic(pump.envelope).curvature;
    CHECK(c2 == doctest::Approx(oracle::dispersed_curvature(tau_p, chirp)).epsilon(1e-3));
  }
  // Large chirp approaches the ideal lens phase -t^2/(2D).
  const PumpWaveform wide = synthesize_pump(grid(), tau_p, -200.0);
  CHECK(phase_fit_quadratic(wide.envelope).curvature == doctest::Approx(1.0 / 400.0).epsilon(2e-3));
}

TEST_CASE("pumped lens conversion amplitude") {
  const SampledEnvelope in = gaussian_pulse(grid(), 40.0);
  const TimeLens lens{ConversionDirection::Down, 100.0, 2.5};
  const PumpWaveform pump = synthesize_pump(grid(), 2.5, 100.0);
  const SampledEnvelope out = apply_time_lens(in, lens, pump);
  for (std::size_t k = 0; k < out.size(); k += 97) {
    const double eta = std::sin(oracle::pi / 2 * std::abs(pump.envelope[k]));
    CHECK(std::abs(out[k]) == doctest::Approx(eta * std::abs(in[k])).epsilon(1e-12));
  }
  CHECK(energy(out) < energy(in));
  // Same result when the lens synthesises its own pump.
  const SampledEnvelope self = apply_time_lens(in, lens);
  CHECK(max_abs_diff(self, out) == 0.0);
}
