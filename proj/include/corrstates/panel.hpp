#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace corrstates {

/// Days since 1970-01-01 (proleptic Gregorian).
using DayNumber = std::int32_t;

DayNumber day_from_iso(std::string_view iso);
std::string iso_from_day(DayNumber day);

/// Aligned daily counts for N regions over D consecutive days.
/// Row i of `values` is the series for `regions[i]`; every downstream
/// operation preserves this row order, so row/column i of any correlation
/// matrix always refers to regions[i].
struct TimeSeriesPanel {
  std::vector<std::string> regions;  // length N, unique
  std::vector<DayNumber> dates;      // length D, strictly consecutive days
  Eigen::MatrixXd values;            // N x D, finite, >= 0 for raw counts

  Eigen::Index n_regions() const { return values.rows(); }
  Eigen::Index n_days() const { return values.cols(); }
  std::string date_iso(Eigen::Index d) const { return iso_from_day(dates[static_cast<std::size_t>(d)]); }
};

enum class PanelLayout { dates_as_rows, regions_as_rows };

struct LoadOptions {
  /// Metadata columns to drop (matched against header names).
  std::vector<std::string> skip_columns;
  /// Replace negative cells (reporting corrections) with zero instead of
  /// rejecting the file. Off by default.
  bool clip_negative_to_zero = false;
};

/// Parse a CSV export into a canonical panel. The canonical layout has a
/// `date` first column (ISO-8601) and one column per region; the transposed
/// regions-as-rows layout is accepted via `layout`. Throws GapError on
/// nonconsecutive dates, ParseError on malformed cells, and
/// DuplicateRegionError on repeated region names.
TimeSeriesPanel load_panel(const std::filesystem::path& path, PanelLayout layout,
                           const LoadOptions& options = {});

/// Write the canonical CSV layout. load_panel(save_panel(p)) reproduces the
/// panel bit-exactly (dates, region names, every value).
void save_panel(const std::filesystem::path& path, const TimeSeriesPanel& panel);

/// Sub-panel over [start, end], both inclusive and inside the panel range.
TimeSeriesPanel slice_panel(const TimeSeriesPanel& panel, DayNumber start, DayNumber end);
TimeSeriesPanel slice_panel(const TimeSeriesPanel& panel, std::string_view start_iso,
                            std::string_view end_iso);

/// Check every TimeSeriesPanel invariant; throws on violation.
/// `require_nonnegative` is dropped for filtered panels, which may dip
/// below zero near sharp ramps.
void validate_panel(const TimeSeriesPanel& panel, bool require_nonnegative = true);

}  // namespace corrstates
