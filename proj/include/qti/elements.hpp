#pragma once

// Dispersive propagation and the pumped three-wave-mixing time lens.

#include "qti/envelope.hpp"

#include <optional>
#include <string_view>

namespace qti {

// Spectrum multiplied by transmission * exp(i gdd w^2 / 2 + i tod w^3 / 6).
struct DispersiveElement {
  double gdd = 0.0;           // ps^2, beta2 * L
  double tod = 0.0;           // ps^3, beta3 * L
  double transmission = 1.0;  // amplitude factor in (0, 1]
};

enum class ConversionDirection { Down, Up };

std::string_view direction_name(ConversionDirection direction) noexcept;

// Sum-frequency (Up: 1/l_out = 1/l_in + 1/l_pump) or difference-frequency
// (Down: 1/l_out = 1/l_in - 1/l_pump) carrier of the generated wave, nm.
double converted_carrier(double input_nm, double pump_nm, ConversionDirection direction);

struct TimeLens {
  ConversionDirection direction = ConversionDirection::Down;
  double focal_gdd = 0.0;                 // ps^2, the pump's chirp
  std::optional<double> pump_seed_fwhm;   // ps; empty means an ideal lens
  double input_carrier_nm = kUnlabeledCarrier;
  double pump_carrier_nm = kUnlabeledCarrier;

  bool ideal() const noexcept { return !pump_seed_fwhm.has_value(); }
  double output_carrier_nm() const;
};

// Phase carried by a pump dispersed by focal_gdd in the large-chirp limit.
inline double ideal_pump_phase(double t, double focal_gdd) {
  return -t * t / (2.0 * focal_gdd);
}

struct PumpWaveform {
  SampledEnvelope envelope;  // peak amplitude 1
  double chirp_gdd;
};

SampledEnvelope apply_dispersion(const SampledEnvelope& env, const DispersiveElement& element);

// Gaussian seed of FWHM seed_fwhm dispersed by chirp_gdd, peak-normalised.
PumpWaveform synthesize_pump(const TimeGrid& grid, double seed_fwhm, double chirp_gdd);

// output(t) = i eta(t) exp(-+ i phi_p(t)) input(t); minus sign for down-conversion.
// Ideal lenses use phi_p = ideal_pump_phase and eta = 1; pumped lenses take the
// phase of the pump and eta = sin(pi/2 |A_p| / max|A_p|).
SampledEnvelope apply_time_lens(const SampledEnvelope& env, const TimeLens& lens,
                                const PumpWaveform& pump);

// Synthesises the pump on the envelope's grid when the lens is not ideal.
SampledEnvelope apply_time_lens(const SampledEnvelope& env, const TimeLens& lens);

}  // namespace qti
