#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace corrstates {

/// All N eigenvalues of a symmetric matrix, ascending. Throws ShapeError if
/// the asymmetry exceeds 1e-9; smaller asymmetry is symmetrized away before
/// the self-adjoint solve.
Eigen::VectorXd eigenvalues_sym(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Mean off-diagonal entry: (1 / (N (N-1))) * sum_{i != j} m_ij.
double mean_offdiag(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Marchenko-Pastur parameters for aspect ratio q = T/N (samples per
/// variable) and variance scale sigma2 (1 for correlation matrices).
struct MpParams {
  double q = 1.0;
  double sigma2 = 1.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  /// Point mass at zero, (1 - q) when q < 1, else 0. Reported here, not in
  /// the continuous density.
  double zero_mass = 0.0;

  static MpParams from_ratio(double q, double sigma2 = 1.0);
  static MpParams from_geometry(int samples, int variables, double sigma2 = 1.0);
};

/// Continuous MP density: q / (2 pi sigma2 lambda) * sqrt((l+ - l)(l - l-))
/// inside the support, 0 outside.
double mp_density(double lambda, const MpParams& params);

/// CDF of the continuous part (plus the zero point mass for q < 1),
/// integrated with a smooth endpoint substitution.
double mp_cdf(double lambda, const MpParams& params);

/// Monte Carlo ensemble of sample Pearson correlation matrices of Gaussian
/// data with constant population correlation x_bar.
struct WishartEnsembleSpec {
  int n = 0;               // variables per sample
  int t = 0;               // observations per sample
  double x_bar = 0.0;      // in (-1/(n-1), 1)
  int n_samples = 0;
  std::uint64_t seed = 0;
};

/// Per sample: draw t iid n-dimensional Gaussians with population
/// covariance (1 - x_bar) I + x_bar J via its closed-form square root,
/// form the sample Pearson correlation matrix (population moments, same
/// estimator as the epoch pipeline), and collect its n eigenvalues.
/// The RNG is split per sample from the seed, so the result is identical
/// under any execution order.
std::vector<double> wishart_ensemble_spectrum(const WishartEnsembleSpec& spec);

/// Equally spaced density histogram over [lo, hi]; densities are
/// counts / (total * bin_width) so they integrate to 1 when every value
/// lies inside the domain.
struct Histogram {
  std::vector<double> bin_edges;  // bins + 1
  std::vector<double> densities;  // bins
};

Histogram histogram_density(std::span<const double> values, int bins, double lo, double hi);

/// Everything needed to compare one cluster against the two benchmarks on a
/// shared axis.
struct ClusterSpectrum {
  int cluster_id = 0;
  int member_count = 0;
  std::vector<double> eigenvalues;  // aggregated over member matrices
  Histogram empirical;
  MpParams mp;
  Histogram mp_display;  // analytic density averaged per display bin
  double x_bar = 0.0;    // mean_offdiag of the cluster centroid
  Histogram wishart;
  std::vector<double> wishart_eigenvalues;
};

struct SpectraOptions {
  int bins_empirical = 32;
  int bins_wishart = 24;
  /// Per-cluster display bins for the MP curve; clusters beyond the list
  /// fall back to 8.
  std::vector<int> bins_mp = {17, 8, 8, 5};
  int wishart_samples = 2000;
  std::uint64_t seed = 0;
  /// Aspect ratio override; 0 derives q = window / n_regions.
  double q_override = 0.0;
  double sigma2 = 1.0;
};

/// Per-cluster aggregated spectra versus MP and constant-correlation
/// Wishart benchmarks. `window` is the epoch length T used for q and for
/// the ensemble geometry; centroids supply x_bar per cluster.
std::vector<ClusterSpectrum> cluster_spectra(const std::vector<Eigen::MatrixXd>& matrices,
                                             const std::vector<int>& labels, int window,
                                             const SpectraOptions& options = {});

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and a
/// reference CDF.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf);

}  // namespace corrstates
