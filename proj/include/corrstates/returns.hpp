#pragma once

#include <Eigen/Core>
#include <vector>

#include "corrstates/panel.hpp"

namespace corrstates {

struct ReturnsOptions {
  /// Denominator floor: R(t) = (X(t+1) - X(t)) / max(X(t), guard_eps).
  /// Keeps returns finite on days with very low or zero counts.
  double guard_eps = 1e-6;
  /// Compute |R(t)| instead of the signed value (sensitivity checks).
  bool absolute = false;
};

/// Day-over-day relative changes. dates has length D-1; R(t) is stamped
/// with the date of X(t+1).
struct ReturnsPanel {
  std::vector<std::string> regions;
  std::vector<DayNumber> dates;
  Eigen::MatrixXd values;  // N x (D-1)

  Eigen::Index n_regions() const { return values.rows(); }
  Eigen::Index n_days() const { return values.cols(); }
};

ReturnsPanel compute_returns(const TimeSeriesPanel& panel, const ReturnsOptions& options = {});

/// Overlapping-window partition of a series of `length` samples.
struct EpochPlan {
  int window = 0;
  int overlap = 0;
  int stride = 0;  // window - overlap
  std::vector<int> epoch_starts;
  int epoch_count = 0;
};

/// epoch_starts = 0, stride, 2*stride, ... while start + window <= length;
/// epoch_count = floor((length - window) / stride) + 1.
EpochPlan plan_epochs(int length, int window, int overlap);

enum class ZeroVariancePolicy {
  error,      // throw DegenerateSeriesError naming region and epoch
  zero_fill,  // flat region gets 0 off-diagonal, 1 on diagonal
};

/// Pearson matrix over one epoch, with the epoch bookkeeping needed to
/// label it downstream.
struct CorrelationMatrix {
  int epoch_index = 0;
  int epoch_start_day = 0;
  Eigen::MatrixXd entries;  // N x N, symmetric, unit diagonal, in [-1, 1]
};

/// Population-moment Pearson coefficients of an N x W block (rows are
/// series). Upper triangle computed, mirrored; diagonal set to exactly 1;
/// entries clamped to [-1, 1] after a 1e-12 rounding guard.
Eigen::MatrixXd pearson_from_block(const Eigen::Ref<const Eigen::MatrixXd>& block,
                                   ZeroVariancePolicy policy = ZeroVariancePolicy::error,
                                   int epoch_index = 0,
                                   const std::vector<std::string>* region_names = nullptr);

CorrelationMatrix pearson_matrix(const ReturnsPanel& returns, int start, int window,
                                 ZeroVariancePolicy policy = ZeroVariancePolicy::error,
                                 int epoch_index = 0);

/// One matrix per epoch, in epoch order.
std::vector<CorrelationMatrix> correlation_series(
    const ReturnsPanel& returns, const EpochPlan& plan,
    ZeroVariancePolicy policy = ZeroVariancePolicy::error);

/// Type invariants of a correlation matrix (symmetry to 1e-12, unit
/// diagonal, entries in [-1,1], eigenvalues >= -1e-8); throws on violation.
void validate_correlation_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace corrstates
