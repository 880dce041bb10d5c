#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corrstates/clustering.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/spectral.hpp"

namespace corrstates {

/// All charts are static SVG strings with fixed-precision coordinates, so a
/// given input always produces identical bytes.

/// Raw vs filtered series on the left, their power spectra on the right.
std::string svg_filter_figure(const std::string& region, std::span<const double> raw,
                              std::span<const double> filtered);

/// Filtered series with the returns series inset below it.
std::string svg_returns_figure(const std::string& region, std::span<const double> filtered,
                               std::span<const double> returns);

/// Correlation heatmap, blue (-1) through white (0) to red (+1).
std::string svg_heatmap(const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                        const std::string& title);

/// Cluster label per epoch as a colored strip over time, with an optional
/// daily overlay series drawn above it.
std::string svg_strip_chart(const std::vector<SymbolicEntry>& symbolic, int k, int window,
                            const std::optional<std::vector<double>>& overlay);

/// Empirical eigenvalue histogram with the MP curve and Wishart histogram
/// outline on a shared axis.
std::string svg_spectra_overlay(const ClusterSpectrum& cs);

}  // namespace corrstates
