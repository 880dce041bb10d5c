#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "corrstates/panel.hpp"

namespace corrstates {

/// Synthetic daily-count panel with planted correlation regimes and a
/// weekly reporting artifact (a 1/7 cycles/day tone plus its two
/// harmonics), so the full pipeline can run without external data.
struct SynthConfig {
  int regions = 32;
  int days = 1021;
  std::uint64_t seed = 1;
  int window = 33;   // epoch geometry used to lay out the regime blocks
  int overlap = 17;
  /// Constant-correlation level of each regime; epochs cycle through these
  /// in blocks.
  std::vector<double> regime_levels = {0.05, 0.35, 0.6, 0.85};
  int regime_block = 4;            // epochs per regime block
  double daily_volatility = 0.3;   // relative day-to-day noise scale
  double weekly_amplitude = 0.22;  // relative amplitude of the artifact tone
  std::string start_date = "2020-02-27";
};

TimeSeriesPanel synth_panel(const SynthConfig& config);

/// Correlation-like matrices drawn from k planted centroid patterns plus
/// entrywise symmetric noise; unit diagonal, clamped to [-1, 1]. Used by the
/// clustering tests as a ground-truth partition.
std::vector<Eigen::MatrixXd> planted_matrices(int count, int n, int k, double noise_amplitude,
                                              std::uint64_t seed,
                                              std::vector<int>* true_labels = nullptr);

}  // namespace corrstates
