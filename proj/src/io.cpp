#include "corrstates/io.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "corrstates/errors.hpp"

namespace corrstates {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

ordered_json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& rows) {
  const auto n_rows = rows.size();
  if (n_rows == 0) throw ParseError("matrix json: empty");
  const auto n_cols = rows[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (rows[i].size() != n_cols) throw ParseError("matrix json: ragged rows");
    for (std::size_t j = 0; j < n_cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

void write_histogram_rows(std::ofstream& out, const char* label, const Histogram& h) {
  for (std::size_t i = 0; i < h.densities.size(); ++i) {
    out << label << ',' << fmt_double(h.bin_edges[i]) << ',' << fmt_double(h.bin_edges[i + 1])
        << ',' << fmt_double(h.densities[i]) << '\n';
  }
}

}  // namespace

std::string fmt_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw NumericError("fmt_double: conversion failed");
  return std::string(buf, p);
}

void write_spectrum_csv(const std::filesystem::path& path, const PowerSpectrum& spectrum) {
  auto out = open_out(path);
  out << "frequency,power\n";
  for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
    out << fmt_double(spectrum.frequencies[i]) << ',' << fmt_double(spectrum.power[i]) << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                      const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != matrix.rows()) {
    throw ShapeError("write_matrix_csv: name count mismatch");
  }
  auto out = open_out(path);
  out << "region";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << ',' << fmt_double(matrix(i, j));
    out << '\n';
  }
}

void write_matrices_json(const std::filesystem::path& path,
                         const std::vector<CorrelationMatrix>& matrices) {
  ordered_json arr = ordered_json::array();
  for (const auto& m : matrices) {
    ordered_json item;
    item["epoch_index"] = m.epoch_index;
    item["epoch_start_day"] = m.epoch_start_day;
    item["matrix"] = matrix_to_json(m.entries);
    arr.push_back(std::move(item));
  }
  auto out = open_out(path);
  out << arr.dump(1) << '\n';
}

std::vector<CorrelationMatrix> read_matrices_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("read_matrices_json: cannot open '" + path.string() + "'");
  ordered_json arr;
  try {
    in >> arr;
  } catch (const std::exception& e) {
    throw ParseError("read_matrices_json: " + std::string(e.what()));
  }
  std::vector<CorrelationMatrix> out;
  for (const auto& item : arr) {
    CorrelationMatrix m;
    m.epoch_index = item.at("epoch_index").get<int>();
    m.epoch_start_day = item.at("epoch_start_day").get<int>();
    m.entries = matrix_from_json(item.at("matrix"));
    out.push_back(std::move(m));
  }
  return out;
}

void write_clustering_json(const std::filesystem::path& path, const ClusteringResult& result,
                           const std::vector<SymbolicEntry>& symbolic) {
  ordered_json j;
  j["k"] = result.k;
  j["seed"] = result.seed;
  j["inertia"] = result.inertia;
  j["n_iterations"] = result.n_iterations;
  j["restart_index_of_best"] = result.restart_index_of_best;
  ordered_json cents = ordered_json::array();
  for (const auto& c : result.centroids) cents.push_back(matrix_to_json(c));
  j["centroids"] = std::move(cents);
  j["labels"] = result.labels;
  ordered_json per_epoch = ordered_json::array();
  for (const auto& s : symbolic) {
    per_epoch.push_back({{"epoch_index", s.epoch_index},
                         {"start_day", s.epoch_start_day},
                         {"cluster", s.cluster_id}});
  }
  j["per_epoch"] = std::move(per_epoch);
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

ClusteringResult read_clustering_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("read_clustering_json: cannot open '" + path.string() + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("read_clustering_json: " + std::string(e.what()));
  }
  ClusteringResult result;
  result.k = j.at("k").get<int>();
  result.seed = j.at("seed").get<std::uint64_t>();
  result.inertia = j.at("inertia").get<double>();
  result.n_iterations = j.value("n_iterations", 0);
  result.restart_index_of_best = j.value("restart_index_of_best", 0);
  for (const auto& c : j.at("centroids")) result.centroids.push_back(matrix_from_json(c));
  result.labels = j.at("labels").get<std::vector<int>>();
  return result;
}

void write_symbolic_csv(const std::filesystem::path& path,
                        const std::vector<SymbolicEntry>& symbolic, int k, int stride) {
  auto out = open_out(path);
  out << "epoch,day_range";
  for (int c = 0; c < k; ++c) out << ",cluster_" << (c + 1);
  out << '\n';
  for (const auto& s : symbolic) {
    out << s.epoch_index << ",t=" << s.epoch_start_day << '-'
        << (s.epoch_start_day + stride - 1);
    for (int c = 0; c < k; ++c) {
      out << ',';
      if (s.cluster_id == c) out << "C(" << s.epoch_index << ')';
    }
    out << '\n';
  }
}

void write_cluster_spectrum_csv(const std::filesystem::path& dir, const ClusterSpectrum& cs) {
  const std::string tag = std::to_string(cs.cluster_id + 1);
  {
    auto out = open_out(dir / ("eigenvalues_cluster_" + tag + ".csv"));
    out << "eigenvalue\n";
    for (double v : cs.eigenvalues) out << fmt_double(v) << '\n';
  }
  {
    auto out = open_out(dir / ("spectrum_cluster_" + tag + ".csv"));
    out << "series,bin_low,bin_high,density\n";
    write_histogram_rows(out, "empirical", cs.empirical);
    write_histogram_rows(out, "marchenko_pastur", cs.mp_display);
    write_histogram_rows(out, "wishart", cs.wishart);
  }
}

void write_k_diagnostics_csv(const std::filesystem::path& path,
                             const std::vector<KDiagnosticsEntry>& entries) {
  auto out = open_out(path);
  out << "k,best_inertia,mean_silhouette,non_monotonic_warning\n";
  for (const auto& e : entries) {
    out << e.k << ',' << fmt_double(e.best_inertia) << ',' << fmt_double(e.mean_silhouette)
        << ',' << (e.non_monotonic_warning ? 1 : 0) << '\n';
  }
}

}  // namespace corrstates
