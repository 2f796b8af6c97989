#include "qti/envelope.hpp"

#include "qti/error.hpp"
#include "qti/fft.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace qti {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::InvalidArgument: return "invalid-argument";
    case ErrorCategory::GridOverflow: return "grid-overflow";
    case ErrorCategory::CarrierMismatch: return "carrier-mismatch";
    case ErrorCategory::Degenerate: return "degenerate";
    case ErrorCategory::InsufficientSupport: return "insufficient-support";
    case ErrorCategory::PeakDetection: return "peak-detection";
    case ErrorCategory::ScenarioSyntax: return "scenario-syntax";
    case ErrorCategory::ScenarioSemantic: return "scenario-semantic";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::size_t n_samples, double dt, double t0)
    : n_(n_samples), dt_(dt), t0_(t0) {
  require(n_ >= 2 && (n_ & (n_ - 1)) == 0, ErrorCategory::InvalidArgument,
          "time grid size must be a power of two >= 2, got " + std::to_string(n_));
  require(dt_ > 0.0 && std::isfinite(dt_), ErrorCategory::InvalidArgument,
          "time grid step must be positive");
  require(std::isfinite(t0_), ErrorCategory::InvalidArgument, "time grid start must be finite");
}

TimeGrid TimeGrid::centered(std::size_t n_samples, double window) {
  require(window > 0.0, ErrorCategory::InvalidArgument, "window length must be positive");
  const double dt = window / static_cast<double>(n_samples);
  return TimeGrid(n_samples, dt, -static_cast<double>(n_samples / 2) * dt);
}

double TimeGrid::d_omega() const noexcept { return 2.0 * kPi / window(); }

double TimeGrid::omega(std::size_t j) const noexcept {
  return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * d_omega();
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(n_);
  for (std::size_t k = 0; k < n_; ++k)
    t[k] = time(k);
  return t;
}

std::vector<double> TimeGrid::omegas() const {
  std::vector<double> w(n_);
  for (std::size_t j = 0; j < n_; ++j)
    w[j] = omega(j);
  return w;
}

// ---------------------------------------------------------------------------
// Envelopes

SampledEnvelope::SampledEnvelope(TimeGrid grid, std::vector<Complex> samples, double carrier_nm)
    : grid_(grid), samples_(std::move(samples)), carrier_nm_(carrier_nm) {
  require(samples_.size() == grid_.size(), ErrorCategory::InvalidArgument,
          "sample count does not match the time grid");
}

std::vector<double> SampledEnvelope::intensity() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Complex& a) { return std::norm(a); });
  return out;
}

SampledEnvelope SampledEnvelope::with_samples(std::vector<Complex> samples) const {
  return SampledEnvelope(grid_, std::move(samples), carrier_nm_);
}

SampledEnvelope SampledEnvelope::with_carrier(double carrier_nm) const {
  return SampledEnvelope(grid_, samples_, carrier_nm);
}

SampledEnvelope SampledEnvelope::scaled(Complex factor) const {
  std::vector<Complex> out(samples_);
  for (auto& a : out)
    a *= factor;
  return with_samples(std::move(out));
}

SpectralEnvelope::SpectralEnvelope(TimeGrid grid, std::vector<Complex> samples, double carrier_nm)
    : grid_(grid), samples_(std::move(samples)), carrier_nm_(carrier_nm) {
  require(samples_.size() == grid_.size(), ErrorCategory::InvalidArgument,
          "spectral sample count does not match the grid");
}

// ---------------------------------------------------------------------------
// Transforms
//
// With omega_j = (j - n/2) d_omega and t_k = t0 + k dt,
//   exp(-i omega_j t_k) = exp(-i omega_j t0) (-1)^k exp(-2 pi i j k / n),
// so the centred transform is a plain DFT of (-1)^k a_k followed by a
// per-bin phase for the window start.

namespace {

Complex start_phase(const TimeGrid& grid, std::size_t j) {
  return std::polar(1.0, -grid.omega(j) * grid.t0());
}

}  // namespace

SpectralEnvelope to_frequency(const SampledEnvelope& env) {
  const TimeGrid& grid = env.grid();
  const std::size_t n = grid.size();
  std::vector<Complex> data(env.samples().begin(), env.samples().end());
  for (std::size_t k = 1; k < n; k += 2)
    data[k] = -data[k];
  fft::forward(data);
  const double scale = grid.dt() / std::sqrt(2.0 * kPi);
  for (std::size_t j = 0; j < n; ++j)
    data[j] *= scale * start_phase(grid, j);
  return SpectralEnvelope(grid, std::move(data), env.carrier_nm());
}

SampledEnvelope to_time(const SpectralEnvelope& spec) {
  const TimeGrid& grid = spec.grid();
  const std::size_t n = grid.size();
  std::vector<Complex> data(spec.samples().begin(), spec.samples().end());
  for (std::size_t j = 0; j < n; ++j)
    data[j] *= std::conj(start_phase(grid, j));
  fft::backward(data);
  const double scale = grid.d_omega() / std::sqrt(2.0 * kPi);
  for (std::size_t k = 0; k < n; ++k)
    data[k] *= (k % 2 == 0) ? scale : -scale;
  return SampledEnvelope(grid, std::move(data), spec.carrier_nm());
}

// ---------------------------------------------------------------------------
// Pulse constructors

Complex GaussianShape::operator()(double t) const {
  const double x = (t - center) / t_fwhm;
  return amplitude * std::exp(-2.0 * kLn2 * x * x);
}

Complex TimeBinShape::operator()(double t) const {
  const double early = (t + 0.5 * delta_t) / tau;
  const double late = (t - 0.5 * delta_t) / tau;
  return 0.5 * std::exp(-2.0 * kLn2 * early * early) +
         0.5 * std::polar(1.0, psi) * std::exp(-2.0 * kLn2 * late * late);
}

namespace {

void check_support(const TimeGrid& grid, double lo, double hi, const char* what) {
  if (lo < grid.t0() || hi > grid.t_last())
    fail(ErrorCategory::GridOverflow,
         std::string(what) + " support [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "] ps exceeds the time window [" + std::to_string(grid.t0()) + ", " +
             std::to_string(grid.t_last()) + "] ps");
}

}  // namespace

SampledEnvelope gaussian_pulse(const TimeGrid& grid, double t_fwhm, double center,
                               Complex amplitude, double carrier_nm) {
  require(t_fwhm > 0.0, ErrorCategory::InvalidArgument, "pulse FWHM must be positive");
  check_support(grid, center - 2.0 * t_fwhm, center + 2.0 * t_fwhm, "gaussian pulse");
  return sample_shape(grid, GaussianShape{t_fwhm, center, amplitude}, carrier_nm);
}

SampledEnvelope time_bin_pulse(const TimeGrid& grid, double tau, double delta_t, double psi,
                               double carrier_nm) {
  require(tau > 0.0, ErrorCategory::InvalidArgument, "time-bin width tau must be positive");
  require(delta_t >= 0.0, ErrorCategory::InvalidArgument,
          "time-bin separation must be non-negative");
  const double half = 0.5 * delta_t + 2.0 * tau;
  check_support(grid, -half, half, "time-bin pulse");
  return sample_shape(grid, TimeBinShape{tau, delta_t, psi}, carrier_nm);
}

// ---------------------------------------------------------------------------
// Metrics

double energy(const SampledEnvelope& env) {
  double sum = 0.0;
  for (const auto& a : env.samples())
    sum += std::norm(a);
  return sum * env.grid().dt();
}

namespace {

struct Lobe {
  std::size_t peak;
  double peak_intensity;
  double left;   // interpolated half-maximum crossing, ps
  double right;
};

// Dominant lobe around the global intensity maximum.
Lobe dominant_lobe(const SampledEnvelope& env) {
  const auto intensity = env.intensity();
  const auto it = std::max_element(intensity.begin(), intensity.end());
  require(*it > 0.0, ErrorCategory::Degenerate, "envelope is identically zero");
  const std::size_t peak = static_cast<std::size_t>(it - intensity.begin());
  const double half = 0.5 * *it;
  const TimeGrid& grid = env.grid();

  std::size_t k = peak;
  while (k > 0 && intensity[k - 1] >= half)
    --k;
  require(k > 0, ErrorCategory::Degenerate, "intensity does not drop to half maximum before window start");
  // crossing between k-1 (below) and k (above)
  double frac = (half - intensity[k - 1]) / (intensity[k] - intensity[k - 1]);
  const double left = grid.time(k - 1) + frac * grid.dt();

  std::size_t m = peak;
  while (m + 1 < intensity.size() && intensity[m + 1] >= half)
    ++m;
  require(m + 1 < intensity.size(), ErrorCategory::Degenerate,
          "intensity does not drop to half maximum before window end");
  frac = (intensity[m] - half) / (intensity[m] - intensity[m + 1]);
  const double right = grid.time(m) + frac * grid.dt();

  return {peak, *it, left, right};
}

}  // namespace

double fwhm(const SampledEnvelope& env) {
  const Lobe lobe = dominant_lobe(env);
  return lobe.right - lobe.left;
}

double centroid(const SampledEnvelope& env) {
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double w = std::norm(env[k]);
    weighted += w * env.grid().time(k);
    total += w;
  }
  require(total > 0.0, ErrorCategory::Degenerate, "centroid of a zero envelope");
  return weighted / total;
}

Complex overlap(const SampledEnvelope& a, const SampledEnvelope& b) {
  require(a.grid() == b.grid(), ErrorCategory::InvalidArgument, "overlap of envelopes on different grids");
  const double ea = energy(a);
  const double eb = energy(b);
  require(ea > 0.0 && eb > 0.0, ErrorCategory::Degenerate, "overlap with a zero envelope");
  Complex sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    sum += std::conj(a[k]) * b[k];
  return sum * a.grid().dt() / std::sqrt(ea * eb);
}

double intensity_overlap(const SampledEnvelope& a, const SampledEnvelope& b) {
  require(a.grid() == b.grid(), ErrorCategory::InvalidArgument, "overlap of envelopes on different grids");
  double cross = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ia = std::norm(a[k]);
    const double ib = std::norm(b[k]);
    cross += ia * ib;
    aa += ia * ia;
    bb += ib * ib;
  }
  require(aa > 0.0 && bb > 0.0, ErrorCategory::Degenerate, "overlap with a zero envelope");
  return cross / std::sqrt(aa * bb);
}

double wing_energy_ratio(const SampledEnvelope& env, double half_width) {
  require(half_width > 0.0, ErrorCategory::InvalidArgument, "wing half-width must be positive");
  const double c = centroid(env);
  double inner = 0.0, outer = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double w = std::norm(env[k]);
    if (std::abs(env.grid().time(k) - c) <= half_width)
      inner += w;
    else
      outer += w;
  }
  require(inner > 0.0, ErrorCategory::Degenerate, "no energy inside the central region");
  return outer / inner;
}

double boundary_leakage(const SampledEnvelope& env) {
  const std::size_t n = env.size();
  const std::size_t band = std::max<std::size_t>(1, n / 256);
  double peak = 0.0;
  for (const auto& a : env.samples())
    peak = std::max(peak, std::abs(a));
  if (peak == 0.0)
    return 0.0;
  double edge = 0.0;
  for (std::size_t k = 0; k < band; ++k)
    edge = std::max({edge, std::abs(env[k]), std::abs(env[n - 1 - k])});
  return edge / peak;
}

void check_boundary(const SampledEnvelope& env, const char* context) {
  const double leak = boundary_leakage(env);
  if (leak >= kBoundaryLeakage)
    fail(ErrorCategory::GridOverflow,
         std::string(context) + ": waveform reaches the window boundary (edge/peak amplitude " +
             std::to_string(leak) + "); enlarge the time window");
}

PhaseFit phase_fit_quadratic(const SampledEnvelope& env, double window_fraction) {
  require(window_fraction > 0.0, ErrorCategory::InvalidArgument, "fit window fraction must be positive");
  const Lobe lobe = dominant_lobe(env);
  const double center = 0.5 * (lobe.left + lobe.right);
  const double half_width = 0.5 * (lobe.right - lobe.left) * window_fraction;
  const double floor = 0.01 * lobe.peak_intensity;
  const TimeGrid& grid = env.grid();

  std::vector<double> s;
  std::vector<double> phase;
  double previous = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double t = grid.time(k);
    if (std::abs(t - center) > half_width || std::norm(env[k]) < floor)
      continue;
    double raw = std::arg(env[k]);
    if (!phase.empty()) {
      double step = raw - previous;
      step -= 2.0 * kPi * std::round(step / (2.0 * kPi));
      raw = phase.back() + step;
    }
    previous = std::arg(env[k]);
    phase.push_back(raw);
    s.push_back((t - center) / half_width);
  }
  require(phase.size() >= 8, ErrorCategory::InsufficientSupport,
          "phase fit needs at least 8 samples above the intensity floor, got " +
              std::to_string(phase.size()));

  const auto rows = static_cast<Eigen::Index>(phase.size());
  Eigen::MatrixXd design(rows, 3);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double x = s[static_cast<std::size_t>(r)];
    design(r, 0) = 1.0;
    design(r, 1) = x;
    design(r, 2) = x * x;
    rhs(r) = phase[static_cast<std::size_t>(r)];
  }
  const Eigen::Vector3d coeff = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd residual = design * coeff - rhs;
  const double mean = rhs.mean();

  PhaseFit fit{};
  fit.curvature = coeff(2) / (half_width * half_width);
  fit.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
  fit.flat_rms = std::sqrt((rhs.array() - mean).square().sum() / static_cast<double>(rows));
  fit.window_start = center - half_width;
  fit.window_end = center + half_width;
  fit.samples_used = phase.size();
  return fit;
}

}  // namespace qti
