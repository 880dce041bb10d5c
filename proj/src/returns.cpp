#include "corrstates/returns.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "corrstates/errors.hpp"

namespace corrstates {

ReturnsPanel compute_returns(const TimeSeriesPanel& panel, const ReturnsOptions& options) {
  validate_panel(panel, /*require_nonnegative=*/false);
  if (!(options.guard_eps > 0.0)) throw SpecError("compute_returns: guard_eps must be > 0");
  if (!panel.values.allFinite()) throw NumericError("compute_returns: non-finite input");

  ReturnsPanel out;
  out.regions = panel.regions;
  out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  const Eigen::Index n = panel.n_regions();
  const Eigen::Index d = panel.n_days();
  out.values.resize(n, d - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t + 1 < d; ++t) {
      const double denom = std::max(panel.values(i, t), options.guard_eps);
      double r = (panel.values(i, t + 1) - panel.values(i, t)) / denom;
      if (options.absolute) r = std::abs(r);
      out.values(i, t) = r;
    }
  }
  if (!out.values.allFinite()) throw NumericError("compute_returns: non-finite result");
  return out;
}

EpochPlan plan_epochs(int length, int window, int overlap) {
  if (window < 2) throw PlanError("plan_epochs: window must be >= 2");
  if (overlap < 0 || overlap >= window) {
    throw PlanError("plan_epochs: overlap must satisfy 0 <= overlap < window");
  }
  if (length < window) {
    throw PlanError("plan_epochs: series length " + std::to_string(length) +
                    " shorter than window " + std::to_string(window));
  }
  EpochPlan plan;
  plan.window = window;
  plan.overlap = overlap;
  plan.stride = window - overlap;
  for (int start = 0; start + window <= length; start += plan.stride) {
    plan.epoch_starts.push_back(start);
  }
  plan.epoch_count = static_cast<int>(plan.epoch_starts.size());
  return plan;
}

Eigen::MatrixXd pearson_from_block(const Eigen::Ref<const Eigen::MatrixXd>& block,
                                   ZeroVariancePolicy policy, int epoch_index,
                                   const std::vector<std::string>* region_names) {
  const Eigen::Index n = block.rows();
  const Eigen::Index w = block.cols();
  if (w < 2) throw PlanError("pearson: window must be >= 2");
  if (!block.allFinite()) throw NumericError("pearson: non-finite input");

  // Standardize each row with population moments (1/W), then correlate.
  Eigen::MatrixXd z(n, w);
  std::vector<bool> degenerate(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = block.row(i).mean();
    const double var = (block.row(i).array() - mean).square().sum() / static_cast<double>(w);
    if (var <= 0.0) {
      if (policy == ZeroVariancePolicy::error) {
        const std::string name = region_names != nullptr
                                     ? (*region_names)[static_cast<std::size_t>(i)]
                                     : ("#" + std::to_string(i));
        throw DegenerateSeriesError("pearson: region " + name +
                                    " has zero variance in epoch " +
                                    std::to_string(epoch_index));
      }
      degenerate[static_cast<std::size_t>(i)] = true;
      z.row(i).setZero();
      continue;
    }
    z.row(i) = (block.row(i).array() - mean) / std::sqrt(var);
  }

  Eigen::MatrixXd c(n, n);
  const double inv_w = 1.0 / static_cast<double>(w);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = z.row(i).dot(z.row(j)) * inv_w;
      v = std::clamp(v, -1.0, 1.0);  // rounding guard, at most 1e-12 beyond
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

CorrelationMatrix pearson_matrix(const ReturnsPanel& returns, int start, int window,
                                 ZeroVariancePolicy policy, int epoch_index) {
  if (start < 0 || start + window > returns.n_days()) {
    throw PlanError("pearson_matrix: epoch [" + std::to_string(start) + ", " +
                    std::to_string(start + window) + ") outside returns length " +
                    std::to_string(returns.n_days()));
  }
  CorrelationMatrix out;
  out.epoch_index = epoch_index;
  out.epoch_start_day = start;
  out.entries = pearson_from_block(returns.values.middleCols(start, window), policy,
                                   epoch_index, &returns.regions);
  return out;
}

std::vector<CorrelationMatrix> correlation_series(const ReturnsPanel& returns,
                                                  const EpochPlan& plan,
                                                  ZeroVariancePolicy policy) {
  std::vector<CorrelationMatrix> out;
  out.reserve(plan.epoch_starts.size());
  for (std::size_t e = 0; e < plan.epoch_starts.size(); ++e) {
    out.push_back(pearson_matrix(returns, plan.epoch_starts[e], plan.window, policy,
                                 static_cast<int>(e)));
  }
  return out;
}

void validate_correlation_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) throw ShapeError("correlation matrix: not square");
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) != 1.0) throw ShapeError("correlation matrix: diagonal not exactly 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) {
        throw ShapeError("correlation matrix: asymmetric beyond 1e-12");
      }
      if (m(i, j) < -1.0 || m(i, j) > 1.0) {
        throw ShapeError("correlation matrix: entry outside [-1, 1]");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-8) {
    throw ShapeError("correlation matrix: eigenvalue below -1e-8");
  }
}

}  // namespace corrstates
