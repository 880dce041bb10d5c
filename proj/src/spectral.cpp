#include "corrstates/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "corrstates/errors.hpp"
#include "corrstates/fft.hpp"

namespace corrstates {

namespace {

void require_finite(std::span<const double> series, const char* op) {
  for (double v : series) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite input");
  }
}

/// Mask value at frequency f for one band.
double band_mask(double f, const StopBand& band, FilterMode mode, double taper_fraction) {
  if (f < band.low_edge || f > band.high_edge) return 1.0;
  if (mode == FilterMode::hard_zero || taper_fraction <= 0.0) return 0.0;
  const double ramp = 0.5 * taper_fraction * (band.high_edge - band.low_edge);
  if (f < band.low_edge + ramp) {
    const double t = (f - band.low_edge) / ramp;
    return 0.5 * (1.0 + std::cos(M_PI * t));
  }
  if (f > band.high_edge - ramp) {
    const double t = (band.high_edge - f) / ramp;
    return 0.5 * (1.0 + std::cos(M_PI * t));
  }
  return 0.0;
}

}  // namespace

PowerSpectrum power_spectrum(std::span<const double> series) {
  const std::size_t d = series.size();
  if (d < 4) throw NumericError("power_spectrum: need at least 4 samples");
  require_finite(series, "power_spectrum");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(d);

  std::vector<std::complex<double>> x(d);
  for (std::size_t t = 0; t < d; ++t) x[t] = {series[t] - mean, 0.0};
  const auto spectrum = fft(x);

  PowerSpectrum out;
  const std::size_t half = d / 2;
  out.frequencies.reserve(half + 1);
  out.power.reserve(half + 1);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t k = 0; k <= half; ++k) {
    out.frequencies.push_back(static_cast<double>(k) * inv_d);
    out.power.push_back(std::norm(spectrum[k] * inv_d));
  }
  return out;
}

SpectralFilterSpec weekly_artifact_bands() {
  SpectralFilterSpec spec;
  spec.bands = {
      {0.14299706, 1.0 / 7.6, 1.0 / 6.35},
      {0.28599412, 1.0 / 3.7, 1.0 / 3.29},
      {0.42899119, 1.0 / 2.371, 1.0 / 2.3},
  };
  return spec;
}

void validate_filter_spec(const SpectralFilterSpec& spec) {
  for (const auto& b : spec.bands) {
    if (!(b.low_edge > 0.0 && b.low_edge < b.center && b.center < b.high_edge)) {
      throw SpecError("filter spec: band edges must satisfy 0 < low < center < high");
    }
    if (!(b.high_edge < 0.5)) {
      throw SpecError("filter spec: band extends to or beyond the Nyquist frequency 0.5");
    }
  }
  auto sorted = spec.bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const StopBand& a, const StopBand& b) { return a.center < b.center; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].low_edge <= sorted[i - 1].high_edge) {
      throw SpecError("filter spec: bands overlap");
    }
  }
  if (spec.mode == FilterMode::cosine_taper &&
      !(spec.taper_fraction >= 0.0 && spec.taper_fraction <= 1.0)) {
    throw SpecError("filter spec: taper_fraction must lie in [0, 1]");
  }
}

std::vector<double> band_stop(std::span<const double> series, const SpectralFilterSpec& spec) {
  const std::size_t d = series.size();
  if (d < 4) throw NumericError("band_stop: need at least 4 samples");
  require_finite(series, "band_stop");
  validate_filter_spec(spec);

  std::vector<std::complex<double>> x(d);
  double max_abs = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    x[t] = {series[t], 0.0};
    max_abs = std::max(max_abs, std::abs(series[t]));
  }
  auto spectrum = fft(x);

  // Bin k and bin d-k carry frequency min(k, d-k)/d, so one pass applies the
  // mask symmetrically and the inverse transform stays real.
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t folded = std::min(k, d - k);
    const double f = static_cast<double>(folded) / static_cast<double>(d);
    double mask = 1.0;
    for (const auto& band : spec.bands) {
      mask *= band_mask(f, band, spec.mode, spec.taper_fraction);
    }
    spectrum[k] *= mask;
  }

  const auto back = ifft(spectrum);
  std::vector<double> out(d);
  const double imag_budget = 1e-9 * std::max(1.0, max_abs);
  for (std::size_t t = 0; t < d; ++t) {
    if (std::abs(back[t].imag()) > imag_budget) {
      throw NumericError("band_stop: imaginary residue above tolerance");
    }
    out[t] = back[t].real();
  }
  return out;
}

TimeSeriesPanel filter_panel(const TimeSeriesPanel& panel, const SpectralFilterSpec& spec) {
  validate_panel(panel, /*require_nonnegative=*/false);
  TimeSeriesPanel out;
  out.regions = panel.regions;
  out.dates = panel.dates;
  out.values.resize(panel.n_regions(), panel.n_days());
  const auto d = static_cast<std::size_t>(panel.n_days());
  std::vector<double> row(d);
  for (Eigen::Index i = 0; i < panel.n_regions(); ++i) {
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) row[static_cast<std::size_t>(t)] = panel.values(i, t);
    const auto filtered = band_stop(row, spec);
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) out.values(i, t) = filtered[static_cast<std::size_t>(t)];
  }
  return out;
}

}  // namespace corrstates
