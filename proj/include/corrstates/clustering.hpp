#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "corrstates/returns.hpp"

namespace corrstates {

/// Euclidean distance in matrix space: sqrt of the sum over all N^2 entry
/// pairs of squared differences (both triangles and the diagonal).
double frobenius_distance(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::MatrixXd>& b);

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // max centroid Frobenius movement at convergence
};

/// One k-means run. Initialization draws k distinct matrices uniformly
/// without replacement; assignment is argmin distance with ties to the
/// lowest cluster id; centroids are elementwise means; a cluster that
/// empties is reseeded with the matrix farthest from its assigned centroid.
struct KMeansRun {
  int k = 0;
  std::vector<Eigen::MatrixXd> centroids;
  std::vector<int> labels;
  double inertia = 0.0;  // sum of squared distances to own centroid
  int n_iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

KMeansRun kmeans(const std::vector<Eigen::MatrixXd>& matrices, int k, std::uint64_t seed,
                 const KMeansOptions& options = {});

/// Best of n_restarts independent runs (seeds base_seed .. base_seed +
/// n_restarts - 1): minimal inertia, ties broken by lowest restart index.
/// Restarts run concurrently; the reduction is deterministic.
struct ClusteringResult {
  int k = 0;
  std::vector<Eigen::MatrixXd> centroids;
  std::vector<int> labels;  // symbolic dynamics, epoch order
  double inertia = 0.0;
  int n_iterations = 0;
  int restart_index_of_best = 0;
  std::uint64_t seed = 0;  // seed of the winning run
};

ClusteringResult kmeans_multi(const std::vector<Eigen::MatrixXd>& matrices, int k,
                              int n_restarts, std::uint64_t base_seed,
                              const KMeansOptions& options = {}, int n_threads = 0);

struct SilhouetteResult {
  std::vector<double> values;
  double mean = 0.0;
};

/// Standard silhouette with frobenius_distance; singleton clusters and
/// a = b = 0 both score 0 by convention.
SilhouetteResult silhouette(const std::vector<Eigen::MatrixXd>& matrices,
                            const std::vector<int>& labels);

struct KDiagnosticsEntry {
  int k = 0;
  double best_inertia = 0.0;
  double mean_silhouette = 0.0;
  /// Set when best_inertia rose above the previous k, which signals an
  /// insufficient restart budget rather than a property of the data.
  bool non_monotonic_warning = false;
};

std::vector<KDiagnosticsEntry> scan_k(const std::vector<Eigen::MatrixXd>& matrices, int k_min,
                                      int k_max, int n_restarts, std::uint64_t base_seed,
                                      const KMeansOptions& options = {}, int n_threads = 0);

struct SymbolicEntry {
  int epoch_index = 0;
  int epoch_start_day = 0;
  int cluster_id = 0;
};

/// Labels joined with epoch start days, in epoch order.
std::vector<SymbolicEntry> symbolic_dynamics(const ClusteringResult& result,
                                             const EpochPlan& plan);

/// Permutation-invariant agreement between two partitions; 1 means
/// identical up to relabeling.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace corrstates
