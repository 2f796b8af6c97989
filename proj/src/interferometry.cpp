#include "qti/interferometry.hpp"

#include "qti/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qti {
namespace {

SampledEnvelope delayed(const SampledEnvelope& env, double delay) {
  if (delay == 0.0)
    return env;
  require(std::abs(delay) < env.grid().window(), ErrorCategory::GridOverflow,
          "interferometer delay exceeds the time window");
  SpectralEnvelope spec = to_frequency(env);
  auto& bins = spec.mutable_samples();
  for (std::size_t j = 0; j < bins.size(); ++j)
    bins[j] *= std::polar(1.0, -spec.omega(j) * delay);
  SampledEnvelope out = to_time(spec);
  check_boundary(out, "interferometer delay line");
  return out;
}

struct CentralWindow {
  double start;
  double end;
};

CentralWindow locate_central_window(const SampledEnvelope& image, const SampledEnvelope& copy, double delay) {
  const std::size_t n = image.size();
  std::vector<double> incoherent(n);
  for (std::size_t k = 0; k < n; ++k)
    incoherent[k] = std::norm(image[k]) + std::norm(copy[k]);
  const double peak = *std::max_element(incoherent.begin(), incoherent.end());
  require(peak > 0.0, ErrorCategory::Degenerate, "interference of a zero envelope");

  const double floor = 0.1 * peak;
  std::vector<std::size_t> maxima;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (incoherent[k] >= floor && incoherent[k] >= incoherent[k - 1] && incoherent[k] > incoherent[k + 1])
      maxima.push_back(k);

  const double d = std::abs(delay);
  if (maxima.size() < 3)
    fail(ErrorCategory::PeakDetection,
         "three-peak structure not found (" + std::to_string(maxima.size()) + " peaks above 10% of maximum)");
  const double first = image.grid().time(maxima.front());
  const double last = image.grid().time(maxima.back());
  const double spread = last - first;
  if (spread < 1.5 * d || spread > 2.5 * d)
    fail(ErrorCategory::PeakDetection, "outer peaks are " + std::to_string(spread) +
                                           " ps apart, expected about twice the analyzer delay " +
                                           std::to_string(d) + " ps");
  const double center = 0.5 * (first + last);
  return {center - 0.5 * d, center + 0.5 * d};
}

struct WindowStats {
  double energy;
  double peak;
};

WindowStats window_stats(const SampledEnvelope& env, const CentralWindow& window) {
  WindowStats stats{0.0, 0.0};
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double t = env.grid().time(k);
    if (t < window.start || t > window.end)
      continue;
    const double i = std::norm(env[k]);
    stats.energy += i;
    stats.peak = std::max(stats.peak, i);
  }
  stats.energy *= env.grid().dt();
  return stats;
}

double contrast(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

SampledEnvelope combine(const SampledEnvelope& env, const SampledEnvelope& copy, double phase) {
  const Complex rotation = std::polar(1.0, phase);
  std::vector<Complex> out(env.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = 0.5 * (env[k] + rotation * copy[k]);
  return env.with_samples(std::move(out));
}

}  // namespace

SampledEnvelope recombine(const SampledEnvelope& env, double delay, double phase) {
  return combine(env, delayed(env, delay), phase);
}

InterferenceResult visibility_experiment(const SampledEnvelope& image, double bin_delay, double psi) {
  require(bin_delay != 0.0, ErrorCategory::InvalidArgument, "analyzer delay must be non-zero");
  const SampledEnvelope copy = delayed(image, bin_delay);
  const CentralWindow window = locate_central_window(image, copy, bin_delay);

  SampledEnvelope constructive = combine(image, copy, psi);
  SampledEnvelope destructive = combine(image, copy, psi + kPi);
  const WindowStats c = window_stats(constructive, window);
  const WindowStats d = window_stats(destructive, window);

  return InterferenceResult{std::move(constructive),
                            std::move(destructive),
                            window.start,
                            window.end,
                            c.energy,
                            d.energy,
                            contrast(c.energy, d.energy),
                            contrast(c.peak, d.peak)};
}

double central_peak_energy(const SampledEnvelope& image, double bin_delay, double phase) {
  require(bin_delay != 0.0, ErrorCategory::InvalidArgument, "analyzer delay must be non-zero");
  const SampledEnvelope copy = delayed(image, bin_delay);
  const CentralWindow window = locate_central_window(image, copy, bin_delay);
  return window_stats(combine(image, copy, phase), window).energy;
}

double asymmetry(const SampledEnvelope& env) {
  const TimeGrid& grid = env.grid();
  double total = 0.0, first = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double w = std::norm(env[k]);
    total += w;
    first += w * grid.time(k);
  }
  require(total > 0.0, ErrorCategory::Degenerate, "asymmetry of a zero-energy envelope");
  const double mean = first / total;
  double second = 0.0, third = 0.0;
  for (std::size_t k = 0; k < env.size(); ++k) {
    const double w = std::norm(env[k]) / total;
    const double x = grid.time(k) - mean;
    second += w * x * x;
    third += w * x * x * x;
  }
  require(second > 0.0, ErrorCategory::Degenerate, "asymmetry of a single-sample profile");
  return third / std::pow(second, 1.5);
}

}  // namespace qti
