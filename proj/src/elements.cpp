#include "qti/elements.hpp"

#include "qti/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qti {

std::string_view direction_name(ConversionDirection direction) noexcept {
  return direction == ConversionDirection::Down ? "down" : "up";
}

double converted_carrier(double input_nm, double pump_nm, ConversionDirection direction) {
  require(input_nm > 0.0 && pump_nm > 0.0, ErrorCategory::InvalidArgument,
          "carrier wavelengths must be positive");
  const double sign = direction == ConversionDirection::Up ? 1.0 : -1.0;
  const double inverse = 1.0 / input_nm + sign / pump_nm;
  require(inverse > 0.0, ErrorCategory::InvalidArgument,
          "difference-frequency generation needs the pump wavelength longer than the input");
  return 1.0 / inverse;
}

double TimeLens::output_carrier_nm() const {
  if (input_carrier_nm == kUnlabeledCarrier || pump_carrier_nm == kUnlabeledCarrier)
    return input_carrier_nm;
  return converted_carrier(input_carrier_nm, pump_carrier_nm, direction);
}

SampledEnvelope apply_dispersion(const SampledEnvelope& env, const DispersiveElement& element) {
  require(element.transmission > 0.0 && element.transmission <= 1.0, ErrorCategory::InvalidArgument,
          "element transmission must lie in (0, 1]");
  if (element.gdd == 0.0 && element.tod == 0.0)
    return element.transmission == 1.0 ? env : env.scaled(element.transmission);

  SpectralEnvelope spec = to_frequency(env);
  auto& bins = spec.mutable_samples();
  for (std::size_t j = 0; j < bins.size(); ++j) {
    const double w = spec.omega(j);
    const double phase = 0.5 * element.gdd * w * w + element.tod * w * w * w / 6.0;
    bins[j] *= std::polar(element.transmission, phase);
  }
  SampledEnvelope out = to_time(spec);
  check_boundary(out, "dispersion");
  return out;
}

PumpWaveform synthesize_pump(const TimeGrid& grid, double seed_fwhm, double chirp_gdd) {
  require(seed_fwhm > 0.0, ErrorCategory::InvalidArgument, "pump seed FWHM must be positive");
  SampledEnvelope seed = gaussian_pulse(grid, seed_fwhm);
  SampledEnvelope stretched = apply_dispersion(seed, DispersiveElement{chirp_gdd});
  double peak = 0.0;
  for (const auto& a : stretched.samples())
    peak = std::max(peak, std::abs(a));
  return PumpWaveform{stretched.scaled(1.0 / peak), chirp_gdd};
}

namespace {

double lens_output_carrier(const SampledEnvelope& env, const TimeLens& lens) {
  if (lens.input_carrier_nm == kUnlabeledCarrier)
    return env.carrier_nm();
  if (env.carrier_nm() != kUnlabeledCarrier) {
    const double mismatch = std::abs(env.carrier_nm() - lens.input_carrier_nm) / lens.input_carrier_nm;
    if (mismatch > 1e-9)
      fail(ErrorCategory::CarrierMismatch,
           "time lens expects a " + std::to_string(lens.input_carrier_nm) + " nm input, envelope is at " +
               std::to_string(env.carrier_nm()) + " nm");
  }
  return lens.output_carrier_nm();
}

}  // namespace

SampledEnvelope apply_time_lens(const SampledEnvelope& env, const TimeLens& lens,
                                const PumpWaveform& pump) {
  require(pump.envelope.grid() == env.grid(), ErrorCategory::InvalidArgument,
          "pump and signal must share a time grid");
  const double carrier = lens_output_carrier(env, lens);
  const double sign = lens.direction == ConversionDirection::Down ? -1.0 : 1.0;
  constexpr Complex i{0.0, 1.0};

  std::vector<Complex> out(env.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Complex p = pump.envelope[k];
    const double amplitude = std::abs(p);
    if (amplitude == 0.0) {
      out[k] = 0.0;
      continue;
    }
    const double eta = std::sin(0.5 * kPi * std::min(amplitude, 1.0));
    const Complex unit = p / amplitude;
    out[k] = i * eta * (sign > 0.0 ? unit : std::conj(unit)) * env[k];
  }
  return SampledEnvelope(env.grid(), std::move(out), carrier);
}

SampledEnvelope apply_time_lens(const SampledEnvelope& env, const TimeLens& lens) {
  require(lens.focal_gdd != 0.0, ErrorCategory::Degenerate, "time lens focal GDD must be non-zero");
  if (!lens.ideal())
    return apply_time_lens(env, lens, synthesize_pump(env.grid(), *lens.pump_seed_fwhm, lens.focal_gdd));

  const double carrier = lens_output_carrier(env, lens);
  const double sign = lens.direction == ConversionDirection::Down ? -1.0 : 1.0;
  constexpr Complex i{0.0, 1.0};
  std::vector<Complex> out(env.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double phi = ideal_pump_phase(env.grid().time(k), lens.focal_gdd);
    out[k] = i * std::polar(1.0, sign * phi) * env[k];
  }
  return SampledEnvelope(env.grid(), std::move(out), carrier);
}

}  // namespace qti
