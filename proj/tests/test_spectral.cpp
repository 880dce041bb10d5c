#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "corrstates/errors.hpp"
#include "corrstates/fft.hpp"
#include "corrstates/rng.hpp"
#include "corrstates/spectral.hpp"
#include "corrstates/synth.hpp"

using namespace corrstates;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

/// Tone sitting exactly on DFT bin `bin` of a length-d transform.
std::vector<double> bin_tone(std::size_t d, int bin, double amplitude, double offset = 0.0) {
  std::vector<double> x(d);
  for (std::size_t t = 0; t < d; ++t) {
    x[t] = offset + amplitude * std::sin(kTwoPi * bin * static_cast<double>(t) / static_cast<double>(d));
  }
  return x;
}

std::vector<double> white_noise(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(d);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

bool in_any_band(double f, const SpectralFilterSpec& spec) {
  for (const auto& b : spec.bands) {
    if (f >= b.low_edge && f <= b.high_edge) return true;
  }
  return false;
}

double band_power(const PowerSpectrum& s, const SpectralFilterSpec& spec, bool inside) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    if (in_any_band(s.frequencies[i], spec) == inside) sum += s.power[i];
  }
  return sum;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("default stop-bands carry the fixed centers and period-reciprocal edges") {
  const auto spec = weekly_artifact_bands();
  REQUIRE(spec.bands.size() == 3);
  CHECK(spec.bands[0].center == 0.14299706);
  CHECK(spec.bands[1].center == 0.28599412);
  CHECK(spec.bands[2].center == 0.42899119);
  CHECK(spec.bands[0].low_edge == 1.0 / 7.6);
  CHECK(spec.bands[0].high_edge == 1.0 / 6.35);
  CHECK(spec.bands[1].low_edge == 1.0 / 3.7);
  CHECK(spec.bands[1].high_edge == 1.0 / 3.29);
  CHECK(spec.bands[2].low_edge == 1.0 / 2.371);
  CHECK(spec.bands[2].high_edge == 1.0 / 2.3);
  CHECK(spec.bands[0].low_edge == doctest::Approx(0.131578947).epsilon(1e-8));
  CHECK(spec.bands[0].high_edge == doctest::Approx(0.157480315).epsilon(1e-8));
  CHECK(spec.bands[1].low_edge == doctest::Approx(0.270270270).epsilon(1e-8));
  CHECK(spec.bands[1].high_edge == doctest::Approx(0.303951368).epsilon(1e-8));
  CHECK(spec.bands[2].low_edge == doctest::Approx(0.421762969).epsilon(1e-8));
  CHECK(spec.bands[2].high_edge == doctest::Approx(0.434782609).epsilon(1e-8));
  CHECK_NOTHROW(validate_filter_spec(spec));
  // The first center sits on bin 146 of a 1021-length transform.
  CHECK(spec.bands[0].center == doctest::Approx(146.0 / 1021.0).epsilon(1e-7));
}

TEST_CASE("power spectrum of a weekly tone peaks at the bin nearest 1/7") {
  const std::size_t d = 1021;
  std::vector<double> x(d);
  for (std::size_t t = 0; t < d; ++t) x[t] = std::sin(kTwoPi * static_cast<double>(t) / 7.0);
  const auto s = power_spectrum(x);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < s.power.size(); ++i) {
    if (s.power[i] > s.power[argmax]) argmax = i;
  }
  CHECK(std::abs(s.frequencies[argmax] - 1.0 / 7.0) < 0.5 / static_cast<double>(d));
  CHECK(s.frequencies.size() == d / 2 + 1);
  CHECK(s.frequencies.back() <= 0.5);
}

TEST_CASE("constant series has zero power after mean removal") {
  const std::vector<double> x(64, 100.0);
  const auto s = power_spectrum(x);
  for (double p : s.power) CHECK(p == 0.0);
}

TEST_CASE("equal-amplitude tones on bins 1/7 and 2/7 have power ratio 1") {
  // 1022 = 7 * 146, so both periods sit exactly on bins 146 and 292; the
  // closed-form DFT of an on-bin sine of amplitude A puts |X_k| = A*D/2 in
  // its bin, hence power (A/2)^2 with this spectrum's normalization.
  const std::size_t d = 1022;
  std::vector<double> x(d);
  for (std::size_t t = 0; t < d; ++t) {
    const double arg = kTwoPi * static_cast<double>(t) / 7.0;
    x[t] = std::sin(arg) + std::sin(2.0 * arg);
  }
  const auto s = power_spectrum(x);
  const double p1 = s.power[146];
  const double p2 = s.power[292];
  CHECK(p1 == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(p2 / p1 == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t i = 1; i < s.power.size(); ++i) {
    if (i != 146 && i != 292) CHECK(s.power[i] < 1e-12 * p1);
  }
}

TEST_CASE("power spectrum rejects bad input") {
  CHECK_THROWS_AS(power_spectrum(std::vector<double>{1.0, 2.0}), NumericError);
  std::vector<double> x(16, 1.0);
  x[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(power_spectrum(x), NumericError);
}

TEST_CASE("in-band tone over a constant background collapses to the background") {
  const std::size_t d = 1021;
  // Bin 146 of 1021 samples is the first band's center frequency.
  const auto x = bin_tone(d, 146, 5.0, 100.0);
  const auto y = band_stop(x, weekly_artifact_bands());
  double worst = 0.0;
  for (double v : y) worst = std::max(worst, std::abs(v - 100.0));
  CHECK(worst < 1e-6 * 5.0);
}

TEST_CASE("passband tone passes through unchanged") {
  const std::size_t d = 1021;
  // Bin 34 is a period of ~30 days, far below the first band.
  const auto x = bin_tone(d, 34, 2.0);
  const auto y = band_stop(x, weekly_artifact_bands());
  double worst = 0.0;
  for (std::size_t t = 0; t < d; ++t) worst = std::max(worst, std::abs(y[t] - x[t]));
  CHECK(worst < 1e-9 * 2.0);
}

TEST_CASE("white noise: stop-band power vanishes, passband power is untouched") {
  const auto spec = weekly_artifact_bands();
  const auto x = white_noise(1021, 42);
  const auto y = band_stop(x, spec);
  const auto sx = power_spectrum(x);
  const auto sy = power_spectrum(y);
  const double in_before = band_power(sx, spec, true);
  const double in_after = band_power(sy, spec, true);
  const double out_before = band_power(sx, spec, false);
  const double out_after = band_power(sy, spec, false);
  CHECK(in_before > 0.0);
  CHECK(in_after < 1e-12 * in_before);
  CHECK(std::abs(out_after - out_before) < 1e-9 * out_before);
}

TEST_CASE("linearity of the filter") {
  const auto spec = weekly_artifact_bands();
  const auto x = white_noise(513, 7);
  const auto y = white_noise(513, 8);
  std::vector<double> combo(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) combo[t] = 3.0 * x[t] - 0.25 * y[t];
  const auto fx = band_stop(x, spec);
  const auto fy = band_stop(y, spec);
  const auto fc = band_stop(combo, spec);
  double scale = 0.0;
  for (double v : fc) scale = std::max(scale, std::abs(v));
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(std::abs(fc[t] - (3.0 * fx[t] - 0.25 * fy[t])) < 1e-9 * scale);
  }
}

TEST_CASE("hard-zero filtering is idempotent") {
  const auto spec = weekly_artifact_bands();
  const auto x = white_noise(1021, 11);
  const auto once = band_stop(x, spec);
  const auto twice = band_stop(once, spec);
  double scale = 0.0;
  for (double v : once) scale = std::max(scale, std::abs(v));
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(std::abs(twice[t] - once[t]) < 1e-9 * scale);
  }
}

TEST_CASE("zero phase: cross-correlation of input and output peaks at lag 0") {
  const std::size_t d = 511;
  const auto spec = weekly_artifact_bands();
  // Off-bin passband tone; the filter still strips only symmetric content.
  std::vector<double> x(d);
  for (std::size_t t = 0; t < d; ++t) x[t] = std::cos(kTwoPi * static_cast<double>(t) / 11.3);
  const auto y = band_stop(x, spec);
  int best_lag = -1;
  double best = -std::numeric_limits<double>::infinity();
  for (int lag = -40; lag <= 40; ++lag) {
    double sum = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      const std::size_t shifted = (t + static_cast<std::size_t>(lag + static_cast<int>(d))) % d;
      sum += x[t] * y[shifted];
    }
    if (sum > best) {
      best = sum;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("energy bookkeeping: the deficit equals the stop-band energy") {
  const auto spec = weekly_artifact_bands();
  const auto x = white_noise(1021, 23);
  const auto y = band_stop(x, spec);
  double e_in = 0.0, e_out = 0.0;
  for (double v : x) e_in += v * v;
  for (double v : y) e_out += v * v;
  CHECK(e_out <= e_in);

  // Spectral-mass oracle via Parseval on the full (two-sided) transform.
  std::vector<std::complex<double>> cx(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) cx[t] = {x[t], 0.0};
  const auto spectrum = fft(cx);
  const std::size_t d = x.size();
  double masked_mass = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double f = static_cast<double>(std::min(k, d - k)) / static_cast<double>(d);
    if (in_any_band(f, spec)) masked_mass += std::norm(spectrum[k]);
  }
  const double expected_deficit = masked_mass / static_cast<double>(d);
  CHECK(std::abs((e_in - e_out) - expected_deficit) < 1e-6 * e_in);
}

TEST_CASE("cosine taper attenuates the band center and ramps at the edges") {
  auto spec = weekly_artifact_bands();
  spec.mode = FilterMode::cosine_taper;
  spec.taper_fraction = 0.5;
  const std::size_t d = 1021;
  const auto center_tone = bin_tone(d, 146, 1.0);
  const auto filtered = band_stop(center_tone, spec);
  double energy = 0.0;
  for (double v : filtered) energy += v * v;
  CHECK(energy < 1e-12 * d);  // fully inside the flat zero region

  // A tone at the band edge bin is only partially attenuated.
  const int edge_bin = static_cast<int>(std::ceil(spec.bands[0].low_edge * d)) + 1;
  const auto edge_tone = bin_tone(d, edge_bin, 1.0);
  const auto edge_filtered = band_stop(edge_tone, spec);
  double edge_energy = 0.0, input_energy = 0.0;
  for (double v : edge_filtered) edge_energy += v * v;
  for (double v : edge_tone) input_energy += v * v;
  CHECK(edge_energy > 0.01 * input_energy);
  CHECK(edge_energy < 0.999 * input_energy);
}

TEST_CASE("invalid specs are rejected") {
  SpectralFilterSpec beyond;
  beyond.bands = {{0.49, 0.45, 0.55}};
  CHECK_THROWS_AS(validate_filter_spec(beyond), SpecError);
  SpectralFilterSpec inverted;
  inverted.bands = {{0.2, 0.25, 0.3}};
  CHECK_THROWS_AS(validate_filter_spec(inverted), SpecError);
  SpectralFilterSpec overlapping;
  overlapping.bands = {{0.2, 0.15, 0.25}, {0.24, 0.22, 0.3}};
  CHECK_THROWS_AS(validate_filter_spec(overlapping), SpecError);
  const auto x = white_noise(64, 1);
  CHECK_THROWS_AS(band_stop(x, beyond), SpecError);
}

TEST_CASE("filter_panel applies band_stop per region") {
  const auto spec = weekly_artifact_bands();

  TimeSeriesPanel constants;
  constants.regions = {"A", "B"};
  constants.dates = {0, 1, 2, 3, 4, 5, 6, 7};
  constants.values.resize(2, 8);
  constants.values.row(0).setConstant(5.0);
  constants.values.row(1).setConstant(9.0);
  const auto same = filter_panel(constants, spec);
  CHECK((same.values - constants.values).cwiseAbs().maxCoeff() < 1e-12);

  TimeSeriesPanel mixed;
  mixed.regions = {"tone7", "tone30"};
  const std::size_t d = 1021;
  mixed.dates.resize(d);
  for (std::size_t t = 0; t < d; ++t) mixed.dates[t] = static_cast<DayNumber>(t);
  mixed.values.resize(2, static_cast<Eigen::Index>(d));
  const auto weekly = bin_tone(d, 146, 3.0, 50.0);
  const auto monthly = bin_tone(d, 34, 3.0, 50.0);
  for (std::size_t t = 0; t < d; ++t) {
    mixed.values(0, static_cast<Eigen::Index>(t)) = weekly[t];
    mixed.values(1, static_cast<Eigen::Index>(t)) = monthly[t];
  }
  const auto out = filter_panel(mixed, spec);
  double flatten_err = 0.0, preserve_err = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    flatten_err = std::max(flatten_err, std::abs(out.values(0, static_cast<Eigen::Index>(t)) - 50.0));
    preserve_err = std::max(preserve_err, std::abs(out.values(1, static_cast<Eigen::Index>(t)) - monthly[t]));
  }
  CHECK(flatten_err < 1e-6 * 3.0);
  CHECK(preserve_err < 1e-9 * 53.0);

  // Compositional oracle on a full-size synthetic panel.
  SynthConfig config;
  config.seed = 77;
  const auto panel = synth_panel(config);
  const auto filtered = filter_panel(panel, spec);
  for (Eigen::Index i = 0; i < panel.n_regions(); i += 7) {
    std::vector<double> row(static_cast<std::size_t>(panel.n_days()));
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) row[static_cast<std::size_t>(t)] = panel.values(i, t);
    const auto direct = band_stop(row, spec);
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) {
      CHECK(filtered.values(i, t) == direct[static_cast<std::size_t>(t)]);
    }
  }
}

}  // TEST_SUITE
