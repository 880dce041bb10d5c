#include "corrstates/clustering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "corrstates/errors.hpp"
#include "corrstates/rng.hpp"

namespace corrstates {

namespace {

double squared_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).squaredNorm();
}

void check_shapes(const std::vector<Eigen::MatrixXd>& matrices) {
  if (matrices.empty()) throw ShapeError("kmeans: empty matrix list");
  const Eigen::Index rows = matrices.front().rows();
  const Eigen::Index cols = matrices.front().cols();
  for (const auto& m : matrices) {
    if (m.rows() != rows || m.cols() != cols) {
      throw ShapeError("kmeans: matrices differ in shape");
    }
  }
}

/// Distinct indices drawn uniformly without replacement (partial
/// Fisher-Yates), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t count, std::size_t total,
                                                    Rng& rng) {
  std::vector<std::size_t> pool(total);
  for (std::size_t i = 0; i < total; ++i) pool[i] = i;
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(total - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

double total_inertia(const std::vector<Eigen::MatrixXd>& matrices,
                     const std::vector<Eigen::MatrixXd>& centroids,
                     const std::vector<int>& labels) {
  double inertia = 0.0;
  for (std::size_t l = 0; l < matrices.size(); ++l) {
    inertia += squared_distance(matrices[l], centroids[static_cast<std::size_t>(labels[l])]);
  }
  return inertia;
}

/// Reseed each empty cluster with the matrix farthest from its assigned
/// centroid, then relabel that matrix.
void repair_empty_clusters(const std::vector<Eigen::MatrixXd>& matrices,
                           std::vector<Eigen::MatrixXd>& centroids,
                           std::vector<int>& labels, std::vector<int>& sizes) {
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (sizes[c] != 0) continue;
    double worst = -1.0;
    std::size_t worst_index = 0;
    for (std::size_t l = 0; l < matrices.size(); ++l) {
      // Only steal from clusters that keep at least one member.
      if (sizes[static_cast<std::size_t>(labels[l])] <= 1) continue;
      const double d =
          squared_distance(matrices[l], centroids[static_cast<std::size_t>(labels[l])]);
      if (d > worst) {
        worst = d;
        worst_index = l;
      }
    }
    sizes[static_cast<std::size_t>(labels[worst_index])] -= 1;
    labels[worst_index] = static_cast<int>(c);
    sizes[c] += 1;
    centroids[c] = matrices[worst_index];
  }
}

}  // namespace

double frobenius_distance(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("frobenius_distance: shape mismatch");
  }
  return (a - b).norm();
}

KMeansRun kmeans(const std::vector<Eigen::MatrixXd>& matrices, int k, std::uint64_t seed,
                 const KMeansOptions& options) {
  check_shapes(matrices);
  const std::size_t m = matrices.size();
  if (k <= 0) throw KError("kmeans: k must be positive");
  if (static_cast<std::size_t>(k) > m) {
    throw KError("kmeans: k = " + std::to_string(k) + " exceeds " + std::to_string(m) +
                 " matrices");
  }

  if (options.max_iter < 1) throw KError("kmeans: max_iter must be >= 1");

  KMeansRun run;
  run.k = k;
  run.seed = seed;

  Rng rng(seed);
  const auto init = sample_without_replacement(static_cast<std::size_t>(k), m, rng);
  run.centroids.reserve(static_cast<std::size_t>(k));
  for (const auto idx : init) run.centroids.push_back(matrices[idx]);

  run.labels.assign(m, 0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    // Assignment: nearest centroid, ties to the lowest cluster id.
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t l = 0; l < m; ++l) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(matrices[l], run.centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      run.labels[l] = best;
      sizes[static_cast<std::size_t>(best)] += 1;
    }
    repair_empty_clusters(matrices, run.centroids, run.labels, sizes);

    // Update: centroids become elementwise means of their members.
    std::vector<Eigen::MatrixXd> updated(static_cast<std::size_t>(k),
                                         Eigen::MatrixXd::Zero(matrices[0].rows(),
                                                               matrices[0].cols()));
    for (std::size_t l = 0; l < m; ++l) {
      updated[static_cast<std::size_t>(run.labels[l])] += matrices[l];
    }
    double movement = 0.0;
    for (int c = 0; c < k; ++c) {
      updated[static_cast<std::size_t>(c)] /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      movement = std::max(movement, frobenius_distance(updated[static_cast<std::size_t>(c)],
                                                       run.centroids[static_cast<std::size_t>(c)]));
    }
    run.centroids = std::move(updated);
    run.n_iterations = iter + 1;

    const double inertia = total_inertia(matrices, run.centroids, run.labels);
    if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12) {
      throw Error("kmeans: inertia increased between iterations");
    }
    prev_inertia = inertia;

    if (movement <= options.tol) {
      run.converged = true;
      break;
    }
  }

  run.inertia = prev_inertia;
  return run;
}

ClusteringResult kmeans_multi(const std::vector<Eigen::MatrixXd>& matrices, int k,
                              int n_restarts, std::uint64_t base_seed,
                              const KMeansOptions& options, int n_threads) {
  if (n_restarts < 1) throw KError("kmeans_multi: n_restarts must be >= 1");
  check_shapes(matrices);

  std::vector<KMeansRun> runs(static_cast<std::size_t>(n_restarts));
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, n_restarts);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= n_restarts) return;
      try {
        runs[static_cast<std::size_t>(r)] =
            kmeans(matrices, k, base_seed + static_cast<std::uint64_t>(r), options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Deterministic reduction: minimal inertia, ties to the lowest index.
  int best = 0;
  for (int r = 1; r < n_restarts; ++r) {
    if (runs[static_cast<std::size_t>(r)].inertia < runs[static_cast<std::size_t>(best)].inertia) {
      best = r;
    }
  }
  auto& win = runs[static_cast<std::size_t>(best)];
  ClusteringResult result;
  result.k = k;
  result.centroids = std::move(win.centroids);
  result.labels = std::move(win.labels);
  result.inertia = win.inertia;
  result.n_iterations = win.n_iterations;
  result.restart_index_of_best = best;
  result.seed = win.seed;
  return result;
}

SilhouetteResult silhouette(const std::vector<Eigen::MatrixXd>& matrices,
                            const std::vector<int>& labels) {
  check_shapes(matrices);
  const std::size_t m = matrices.size();
  if (labels.size() != m) throw ShapeError("silhouette: labels length mismatch");

  std::map<int, int> sizes;
  for (int l : labels) sizes[l] += 1;
  if (sizes.size() < 2) throw DiagnosticsError("silhouette: need at least 2 clusters");

  // Pairwise distances once; M is small (dozens of epochs).
  Eigen::MatrixXd dist(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = frobenius_distance(matrices[i], matrices[j]);
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }

  SilhouetteResult out;
  out.values.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const int own = labels[i];
    if (sizes[own] <= 1) continue;  // singleton: s = 0 by convention
    double intra = 0.0;
    std::map<int, double> inter;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (labels[j] == own) {
        intra += d;
      } else {
        inter[labels[j]] += d;
      }
    }
    const double a = intra / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [cluster, sum] : inter) {
      b = std::min(b, sum / static_cast<double>(sizes[cluster]));
    }
    const double denom = std::max(a, b);
    out.values[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }

  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / static_cast<double>(m);
  return out;
}

std::vector<KDiagnosticsEntry> scan_k(const std::vector<Eigen::MatrixXd>& matrices, int k_min,
                                      int k_max, int n_restarts, std::uint64_t base_seed,
                                      const KMeansOptions& options, int n_threads) {
  if (k_min < 1 || k_min > k_max) throw KError("scan_k: invalid k range");
  std::vector<KDiagnosticsEntry> out;
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const auto result = kmeans_multi(matrices, k, n_restarts, base_seed, options, n_threads);
    KDiagnosticsEntry entry;
    entry.k = k;
    entry.best_inertia = result.inertia;
    std::set<int> distinct(result.labels.begin(), result.labels.end());
    entry.mean_silhouette = distinct.size() >= 2 ? silhouette(matrices, result.labels).mean : 0.0;
    entry.non_monotonic_warning = entry.best_inertia > prev_inertia * (1.0 + 1e-12) + 1e-12;
    prev_inertia = entry.best_inertia;
    out.push_back(entry);
  }
  return out;
}

std::vector<SymbolicEntry> symbolic_dynamics(const ClusteringResult& result,
                                             const EpochPlan& plan) {
  if (result.labels.size() != plan.epoch_starts.size()) {
    throw ShapeError("symbolic_dynamics: " + std::to_string(result.labels.size()) +
                     " labels vs " + std::to_string(plan.epoch_starts.size()) + " epochs");
  }
  std::vector<SymbolicEntry> out;
  out.reserve(result.labels.size());
  for (std::size_t e = 0; e < result.labels.size(); ++e) {
    out.push_back({static_cast<int>(e), plan.epoch_starts[e], result.labels[e]});
  }
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ShapeError("adjusted_rand_index: length mismatch");
  const double n = static_cast<double>(a.size());
  if (a.empty()) throw ShapeError("adjusted_rand_index: empty partitions");

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> row, col;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_row = 0.0, sum_col = 0.0;
  for (const auto& [key, v] : joint) sum_joint += choose2(v);
  for (const auto& [key, v] : row) sum_row += choose2(v);
  for (const auto& [key, v] : col) sum_col += choose2(v);
  const double expected = sum_row * sum_col / choose2(n);
  const double max_index = 0.5 * (sum_row + sum_col);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_joint - expected) / (max_index - expected);
}

}  // namespace corrstates
