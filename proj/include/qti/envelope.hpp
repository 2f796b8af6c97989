#pragma once

// Sampled complex envelopes on a uniform time grid, the spectral dual, pulse
// constructors and waveform metrics.
//
// Units throughout: time in ps, angular frequency offset in rad/ps, GDD in ps^2.
// Envelopes live in the co-moving frame of their own carrier; the carrier
// wavelength is a metadata label only.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace qti {

using Complex = std::complex<double>;

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kPi = std::numbers::pi;

// Boundary samples must stay below this fraction of the peak amplitude.
inline constexpr double kBoundaryLeakage = 1e-8;

// Carrier label meaning "not tracked"; matches any lens input carrier.
inline constexpr double kUnlabeledCarrier = 0.0;

class TimeGrid {
public:
  // n_samples must be a power of two, dt > 0.
  TimeGrid(std::size_t n_samples, double dt, double t0);

  // Window of the given length centred on t = 0 (t0 = -n/2 * dt).
  static TimeGrid centered(std::size_t n_samples, double window);

  std::size_t size() const noexcept { return n_; }
  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  double window() const noexcept { return static_cast<double>(n_) * dt_; }
  double t_last() const noexcept { return t0_ + static_cast<double>(n_ - 1) * dt_; }
  double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }

  // Conjugate axis, centred: omega(j) = (j - n/2) * d_omega.
  double d_omega() const noexcept;
  double omega(std::size_t j) const noexcept;

  std::vector<double> times() const;
  std::vector<double> omegas() const;

  bool operator==(const TimeGrid&) const = default;

private:
  std::size_t n_;
  double dt_;
  double t0_;
};

class SampledEnvelope {
public:
  SampledEnvelope(TimeGrid grid, std::vector<Complex> samples,
                  double carrier_nm = kUnlabeledCarrier);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> samples() const noexcept { return samples_; }
  const Complex& operator[](std::size_t k) const noexcept { return samples_[k]; }
  std::size_t size() const noexcept { return samples_.size(); }
  double carrier_nm() const noexcept { return carrier_nm_; }

  std::vector<double> intensity() const;

  // Same grid, new samples/carrier.
  SampledEnvelope with_samples(std::vector<Complex> samples) const;
  SampledEnvelope with_carrier(double carrier_nm) const;

  SampledEnvelope scaled(Complex factor) const;

private:
  TimeGrid grid_;
  std::vector<Complex> samples_;
  double carrier_nm_;
};

// Samples ordered along TimeGrid::omega(j). Normalised so that
// sum |A_j|^2 d_omega == sum |a_k|^2 dt, and A approximates the continuous
// transform A(w) = (2 pi)^{-1/2} * integral a(t) exp(-i w t) dt.
class SpectralEnvelope {
public:
  SpectralEnvelope(TimeGrid grid, std::vector<Complex> samples, double carrier_nm);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> samples() const noexcept { return samples_; }
  std::vector<Complex>& mutable_samples() noexcept { return samples_; }
  double carrier_nm() const noexcept { return carrier_nm_; }
  double omega(std::size_t j) const noexcept { return grid_.omega(j); }

private:
  TimeGrid grid_;
  std::vector<Complex> samples_;
  double carrier_nm_;
};

SpectralEnvelope to_frequency(const SampledEnvelope& env);
SampledEnvelope to_time(const SpectralEnvelope& spec);

// Analytic pulse shapes; sampled by the constructors below and reused as
// magnified-image oracles.
struct GaussianShape {
  double t_fwhm;
  double center = 0.0;
  Complex amplitude = 1.0;

  Complex operator()(double t) const;
};

// Two Gaussian bins of FWHM tau separated by delta_t, late bin carrying exp(i psi).
struct TimeBinShape {
  double tau;
  double delta_t;
  double psi = 0.0;

  Complex operator()(double t) const;
  double total_width() const noexcept { return delta_t + tau; }
};

template <class Shape>
SampledEnvelope sample_shape(const TimeGrid& grid, const Shape& shape,
                             double carrier_nm = kUnlabeledCarrier) {
  std::vector<Complex> samples(grid.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    samples[k] = shape(grid.time(k));
  return SampledEnvelope(grid, std::move(samples), carrier_nm);
}

// (1/sqrt|M|) * shape(t / M): the ideal image with magnification M.
template <class Shape>
SampledEnvelope sample_magnified(const TimeGrid& grid, const Shape& shape, double magnification,
                                 double carrier_nm = kUnlabeledCarrier) {
  const double norm = 1.0 / std::sqrt(std::abs(magnification));
  std::vector<Complex> samples(grid.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    samples[k] = norm * shape(grid.time(k) / magnification);
  return SampledEnvelope(grid, std::move(samples), carrier_nm);
}

// amplitude * exp(-2 ln2 ((t - center)/t_fwhm)^2). Throws GridOverflow when
// [center - 2 t_fwhm, center + 2 t_fwhm] leaves the window.
SampledEnvelope gaussian_pulse(const TimeGrid& grid, double t_fwhm, double center = 0.0,
                               Complex amplitude = 1.0, double carrier_nm = kUnlabeledCarrier);

SampledEnvelope time_bin_pulse(const TimeGrid& grid, double tau, double delta_t, double psi,
                               double carrier_nm = kUnlabeledCarrier);

// Metrics.
double energy(const SampledEnvelope& env);
double fwhm(const SampledEnvelope& env);
double centroid(const SampledEnvelope& env);
Complex overlap(const SampledEnvelope& a, const SampledEnvelope& b);

// Overlap of two intensity profiles treated as real waveforms.
double intensity_overlap(const SampledEnvelope& a, const SampledEnvelope& b);

// Energy beyond |t - centroid| > half_width relative to the energy inside.
double wing_energy_ratio(const SampledEnvelope& env, double half_width);

// Largest |a| in the outer edge band relative to max |a|.
double boundary_leakage(const SampledEnvelope& env);
void check_boundary(const SampledEnvelope& env, const char* context);

struct PhaseFit {
  double curvature;     // c2, rad/ps^2
  double rms_residual;  // rad, about the fitted quadratic
  double flat_rms;      // rad, about the mean phase (deviation from flat)
  double window_start;  // ps
  double window_end;    // ps
  std::size_t samples_used;
};

// Least-squares fit of the unwrapped phase to c0 + c1 t + c2 t^2 over the
// dominant lobe's FWHM extent scaled by window_fraction about its centre.
// Samples below 1% of peak intensity are excluded.
PhaseFit phase_fit_quadratic(const SampledEnvelope& env, double window_fraction = 1.0);

}  // namespace qti
