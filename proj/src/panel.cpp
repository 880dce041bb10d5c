#include "corrstates/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "corrstates/errors.hpp"
#include "corrstates/io.hpp"

namespace corrstates {

namespace {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool looks_like_date(std::string_view s) {
  return s.size() == 10 && s[4] == '-' && s[7] == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.emplace_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) {
    throw ParseError("load_panel: missing value at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || p != cell.data() + cell.size()) {
    throw ParseError("load_panel: non-numeric cell '" + cell + "' at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  }
  return v;
}

void check_dates_consecutive(const std::vector<DayNumber>& dates) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (dates[i] != dates[i - 1] + 1) {
      throw GapError("load_panel: dates not consecutive between " +
                     iso_from_day(dates[i - 1]) + " and " + iso_from_day(dates[i]));
    }
  }
}

void check_regions_unique(const std::vector<std::string>& regions) {
  std::set<std::string> seen;
  for (const auto& r : regions) {
    if (!seen.insert(r).second) {
      throw DuplicateRegionError("load_panel: duplicate region '" + r + "'");
    }
  }
}

double finalize_cell(double v, bool clip_negative, std::size_t row, std::size_t col) {
  if (!std::isfinite(v)) {
    throw ParseError("load_panel: non-finite value at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  }
  if (v < 0.0) {
    if (clip_negative) return 0.0;
    throw ParseError("load_panel: negative count " + fmt_double(v) + " at row " +
                     std::to_string(row) + ", column " + std::to_string(col) +
                     " (use clip_negative_to_zero to accept corrections)");
  }
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("load_panel: cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!lines.empty() || !line.empty()) lines.push_back(line);
  }
  // Strip a UTF-8 BOM if present.
  if (!lines.empty() && lines[0].size() >= 3 &&
      static_cast<unsigned char>(lines[0][0]) == 0xEF &&
      static_cast<unsigned char>(lines[0][1]) == 0xBB &&
      static_cast<unsigned char>(lines[0][2]) == 0xBF) {
    lines[0].erase(0, 3);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

DayNumber day_from_iso(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  if (!looks_like_date(iso) || !parse_int(iso.substr(0, 4), y) ||
      !parse_int(iso.substr(5, 2), m) || !parse_int(iso.substr(8, 2), d) ||
      m < 1 || m > 12 || d < 1 || d > 31) {
    throw ParseError("invalid ISO-8601 date '" + std::string(iso) + "'");
  }
  return static_cast<DayNumber>(days_from_civil(y, static_cast<unsigned>(m),
                                                static_cast<unsigned>(d)));
}

std::string iso_from_day(DayNumber day) {
  int y;
  unsigned m, d;
  civil_from_days(day, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

TimeSeriesPanel load_panel(const std::filesystem::path& path, PanelLayout layout,
                           const LoadOptions& options) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw ParseError("load_panel: file has no data rows");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2) throw ParseError("load_panel: header needs at least two columns");

  const auto skipped = [&](const std::string& name) {
    return std::find(options.skip_columns.begin(), options.skip_columns.end(), name) !=
           options.skip_columns.end();
  };

  TimeSeriesPanel panel;
  if (layout == PanelLayout::dates_as_rows) {
    // header: date, region, region, ...
    std::vector<std::size_t> region_cols;
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (skipped(header[c])) continue;
      region_cols.push_back(c);
      panel.regions.push_back(header[c]);
    }
    if (region_cols.empty()) throw ParseError("load_panel: no region columns");
    const std::size_t n_rows = lines.size() - 1;
    panel.values.resize(static_cast<Eigen::Index>(region_cols.size()),
                        static_cast<Eigen::Index>(n_rows));
    panel.dates.reserve(n_rows);
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto fields = split_csv_line(lines[r]);
      if (fields.size() != header.size()) {
        throw ParseError("load_panel: row " + std::to_string(r) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
      }
      panel.dates.push_back(day_from_iso(fields[0]));
      for (std::size_t i = 0; i < region_cols.size(); ++i) {
        const double v = parse_cell(fields[region_cols[i]], r, region_cols[i]);
        panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r - 1)) =
            finalize_cell(v, options.clip_negative_to_zero, r, region_cols[i]);
      }
    }
  } else {
    // header: <id column>, date, date, ... with possible metadata columns.
    std::vector<std::size_t> date_cols;
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (skipped(header[c])) continue;
      if (!looks_like_date(header[c])) {
        throw ParseError("load_panel: header column '" + header[c] +
                         "' is neither a date nor a listed metadata column");
      }
      date_cols.push_back(c);
      panel.dates.push_back(day_from_iso(header[c]));
    }
    if (date_cols.empty()) throw ParseError("load_panel: no date columns");
    const std::size_t n_regions = lines.size() - 1;
    panel.values.resize(static_cast<Eigen::Index>(n_regions),
                        static_cast<Eigen::Index>(date_cols.size()));
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto fields = split_csv_line(lines[r]);
      if (fields.size() != header.size()) {
        throw ParseError("load_panel: row " + std::to_string(r) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
      }
      panel.regions.push_back(fields[0]);
      for (std::size_t i = 0; i < date_cols.size(); ++i) {
        const double v = parse_cell(fields[date_cols[i]], r, date_cols[i]);
        panel.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(i)) =
            finalize_cell(v, options.clip_negative_to_zero, r, date_cols[i]);
      }
    }
  }

  check_regions_unique(panel.regions);
  check_dates_consecutive(panel.dates);
  validate_panel(panel);
  return panel;
}

void save_panel(const std::filesystem::path& path, const TimeSeriesPanel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("save_panel: cannot write '" + path.string() + "'");
  out << "date";
  for (const auto& r : panel.regions) out << ',' << r;
  out << '\n';
  for (Eigen::Index d = 0; d < panel.n_days(); ++d) {
    out << panel.date_iso(d);
    for (Eigen::Index i = 0; i < panel.n_regions(); ++i) {
      out << ',' << fmt_double(panel.values(i, d));
    }
    out << '\n';
  }
}

TimeSeriesPanel slice_panel(const TimeSeriesPanel& panel, DayNumber start, DayNumber end) {
  if (panel.dates.empty()) throw RangeError("slice_panel: empty panel");
  const DayNumber first = panel.dates.front();
  const DayNumber last = panel.dates.back();
  if (start > end) throw RangeError("slice_panel: start after end");
  if (start < first || end > last) {
    throw RangeError("slice_panel: [" + iso_from_day(start) + ", " + iso_from_day(end) +
                     "] outside panel range [" + iso_from_day(first) + ", " +
                     iso_from_day(last) + "]");
  }
  const Eigen::Index offset = start - first;
  const Eigen::Index width = end - start + 1;
  TimeSeriesPanel out;
  out.regions = panel.regions;
  out.dates.assign(panel.dates.begin() + offset, panel.dates.begin() + offset + width);
  out.values = panel.values.middleCols(offset, width);
  return out;
}

TimeSeriesPanel slice_panel(const TimeSeriesPanel& panel, std::string_view start_iso,
                            std::string_view end_iso) {
  return slice_panel(panel, day_from_iso(start_iso), day_from_iso(end_iso));
}

void validate_panel(const TimeSeriesPanel& panel, bool require_nonnegative) {
  const auto n = static_cast<std::size_t>(panel.n_regions());
  const auto d = static_cast<std::size_t>(panel.n_days());
  if (panel.regions.size() != n) throw ShapeError("panel: region list does not match rows");
  if (panel.dates.size() != d) throw ShapeError("panel: date list does not match columns");
  if (n < 2) throw ParseError("panel: need at least 2 regions");
  if (d < 2) throw ParseError("panel: need at least 2 days");
  check_regions_unique(panel.regions);
  check_dates_consecutive(panel.dates);
  if (!panel.values.allFinite()) throw NumericError("panel: non-finite values");
  if (require_nonnegative && (panel.values.array() < 0.0).any()) {
    throw ParseError("panel: negative values");
  }
}

}  // namespace corrstates
