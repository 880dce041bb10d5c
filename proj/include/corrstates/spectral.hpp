#pragma once

#include <span>
#include <vector>

#include "corrstates/panel.hpp"

namespace corrstates {

/// One stop-band in cycles/day. Frequencies satisfy
/// 0 < low_edge < center < high_edge < 0.5 (Nyquist for daily sampling).
struct StopBand {
  double center = 0.0;
  double low_edge = 0.0;
  double high_edge = 0.0;
};

enum class FilterMode { hard_zero, cosine_taper };

struct SpectralFilterSpec {
  std::vector<StopBand> bands;
  FilterMode mode = FilterMode::hard_zero;
  /// Fraction of each band width spent ramping 1 -> 0 on each side
  /// (cosine_taper mode only).
  double taper_fraction = 0.1;
};

/// One-sided spectrum; frequencies[k] = k/D cycles/day for k = 0..floor(D/2),
/// power[k] = |DFT_k / D|^2 of the mean-removed series.
struct PowerSpectrum {
  std::vector<double> frequencies;
  std::vector<double> power;
};

PowerSpectrum power_spectrum(std::span<const double> series);

/// Stop-bands for the weekly reporting artifact and its two harmonics:
/// centers 0.14299706, 0.28599412, 0.42899119 cycles/day with edges
/// (1/7.6, 1/6.35), (1/3.7, 1/3.29), (1/2.371, 1/2.3).
SpectralFilterSpec weekly_artifact_bands();

/// Frequency-domain band-stop: DFT of length D (no padding), bins whose
/// frequency falls inside any band are zeroed (hard_zero) or ramped with a
/// raised cosine (cosine_taper), the mask is mirrored onto negative
/// frequencies, and the inverse transform is returned. Zero phase by
/// construction; output preserves out-of-band bins exactly up to rounding.
std::vector<double> band_stop(std::span<const double> series, const SpectralFilterSpec& spec);

/// band_stop applied to each region independently; dates/regions unchanged.
TimeSeriesPanel filter_panel(const TimeSeriesPanel& panel, const SpectralFilterSpec& spec);

/// Throws SpecError unless all bands are valid, below Nyquist, and
/// non-overlapping after sorting by center.
void validate_filter_spec(const SpectralFilterSpec& spec);

}  // namespace corrstates
