#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "corrstates/clustering.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/spectral.hpp"

namespace corrstates {

/// Shortest round-trip decimal form of a double (std::to_chars), so emitted
/// files are locale-independent and parse back to the identical bits.
std::string fmt_double(double v);

/// `frequency,power` rows.
void write_spectrum_csv(const std::filesystem::path& path, const PowerSpectrum& spectrum);

/// One matrix with region names as row/column headers.
void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& names);

/// All epoch matrices as a single JSON array of
/// {epoch_index, epoch_start_day, matrix}.
void write_matrices_json(const std::filesystem::path& path,
                         const std::vector<CorrelationMatrix>& matrices);
std::vector<CorrelationMatrix> read_matrices_json(const std::filesystem::path& path);

/// {k, seed, inertia, centroids, labels, per_epoch} bundle.
void write_clustering_json(const std::filesystem::path& path, const ClusteringResult& result,
                           const std::vector<SymbolicEntry>& symbolic);
ClusteringResult read_clustering_json(const std::filesystem::path& path);

/// Symbolic dynamics in the table shape used for reporting: one row per
/// epoch with its day range and one column per cluster.
void write_symbolic_csv(const std::filesystem::path& path,
                        const std::vector<SymbolicEntry>& symbolic, int k, int stride);

/// Eigenvalue list plus the three histogram estimates for one cluster.
void write_cluster_spectrum_csv(const std::filesystem::path& dir, const ClusterSpectrum& cs);

/// Per-k diagnostics table.
void write_k_diagnostics_csv(const std::filesystem::path& path,
                             const std::vector<KDiagnosticsEntry>& entries);

}  // namespace corrstates
