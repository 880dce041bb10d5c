#include "corrstates/synth.hpp"

#include <algorithm>
#include <cmath>

#include "corrstates/errors.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rng.hpp"

namespace corrstates {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kSqrt3 = 1.7320508075688772935;

}  // namespace

TimeSeriesPanel synth_panel(const SynthConfig& config) {
  if (config.regions < 2 || config.days < 2) {
    throw SpecError("synth_panel: need at least 2 regions and 2 days");
  }
  if (config.regime_levels.empty()) throw SpecError("synth_panel: no regime levels");
  for (double x : config.regime_levels) {
    if (!(x >= 0.0 && x < 1.0)) throw SpecError("synth_panel: regime levels must lie in [0, 1)");
  }
  if (config.regime_block < 1) throw SpecError("synth_panel: regime_block must be >= 1");

  const int n = config.regions;
  const int d = config.days;

  // Map each day to a regime through the epoch geometry, so that epochs of
  // the eventual correlation series mostly sit inside one regime block.
  const int stride = std::max(1, config.window - config.overlap);
  const auto regime_of_day = [&](int day) {
    const int epoch = day / stride;
    const int block = epoch / config.regime_block;
    return static_cast<std::size_t>(block) % config.regime_levels.size();
  };

  Rng rng(derive_seed(config.seed, 0));
  Rng phase_rng(derive_seed(config.seed, 1));
  std::vector<double> phases(static_cast<std::size_t>(n));
  std::vector<double> scales(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    phases[static_cast<std::size_t>(i)] = phase_rng.uniform(0.0, kTwoPi);
    scales[static_cast<std::size_t>(i)] = phase_rng.uniform(120.0, 420.0);
  }

  TimeSeriesPanel panel;
  panel.regions.reserve(static_cast<std::size_t>(n));
  char name[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(name, sizeof(name), "R%02d", i + 1);
    panel.regions.emplace_back(name);
  }
  const DayNumber first = day_from_iso(config.start_date);
  panel.dates.resize(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) panel.dates[static_cast<std::size_t>(t)] = first + t;

  panel.values.resize(n, d);
  for (int t = 0; t < d; ++t) {
    const double level = config.regime_levels[regime_of_day(t)];
    const double common_weight = std::sqrt(level);
    const double own_weight = std::sqrt(1.0 - level);
    // Bounded unit-variance shocks keep counts strictly positive.
    const double common = rng.uniform(-kSqrt3, kSqrt3);
    const double weekly =
        std::sin(kTwoPi * t / 7.0) + 0.5 * std::sin(2.0 * kTwoPi * t / 7.0) +
        0.25 * std::sin(3.0 * kTwoPi * t / 7.0);
    for (int i = 0; i < n; ++i) {
      const double own = rng.uniform(-kSqrt3, kSqrt3);
      const double shock = common_weight * common + own_weight * own;
      const double base =
          scales[static_cast<std::size_t>(i)] *
          (1.0 + 0.8 * std::pow(std::sin(kTwoPi * t / 340.0 + phases[static_cast<std::size_t>(i)]), 2.0));
      const double value = base * (1.0 + config.daily_volatility * shock) *
                           (1.0 + config.weekly_amplitude * weekly);
      panel.values(i, t) = std::max(0.0, std::round(value));
    }
  }
  validate_panel(panel);
  return panel;
}

std::vector<Eigen::MatrixXd> planted_matrices(int count, int n, int k, double noise_amplitude,
                                              std::uint64_t seed,
                                              std::vector<int>* true_labels) {
  if (count < 1 || n < 2) throw SpecError("planted_matrices: invalid shape");
  if (k < 1 || k > count) throw KError("planted_matrices: invalid k");

  // Centroid patterns: constant-correlation plates at well-separated levels,
  // with a two-block structure on odd patterns so shapes differ too.
  std::vector<Eigen::MatrixXd> patterns;
  patterns.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const double level = 0.08 + 0.84 * static_cast<double>(c) / std::max(1, k - 1);
    Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, level);
    if (c % 2 == 1) {
      const int half = n / 2;
      p.topRightCorner(half, n - half).array() *= 0.35;
      p.bottomLeftCorner(n - half, half).array() *= 0.35;
    }
    p.diagonal().setOnes();
    patterns.push_back(std::move(p));
  }

  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(count));
  if (true_labels != nullptr) true_labels->clear();
  Rng rng(derive_seed(seed, 17));
  for (int i = 0; i < count; ++i) {
    const int label = i % k;
    Eigen::MatrixXd m = patterns[static_cast<std::size_t>(label)];
    for (int r = 0; r < n; ++r) {
      for (int c = r + 1; c < n; ++c) {
        const double noisy =
            std::clamp(m(r, c) + rng.uniform(-noise_amplitude, noise_amplitude), -1.0, 1.0);
        m(r, c) = noisy;
        m(c, r) = noisy;
      }
    }
    out.push_back(std::move(m));
    if (true_labels != nullptr) true_labels->push_back(label);
  }
  return out;
}

}  // namespace corrstates
