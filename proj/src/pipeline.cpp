#include "corrstates/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "corrstates/clustering.hpp"
#include "corrstates/errors.hpp"
#include "corrstates/io.hpp"
#include "corrstates/panel.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/rng.hpp"
#include "corrstates/spectral.hpp"
#include "corrstates/svg.hpp"

namespace corrstates {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("config: bad number '" + s + "' for " + key);
  }
  return v;
}

long long parse_int(const std::string& s, const std::string& key) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("config: bad integer '" + s + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ParseError("config: bad boolean '" + s + "' for " + key);
}

SpectralFilterSpec spec_from_config(const PipelineConfig& config) {
  SpectralFilterSpec spec;
  if (config.bands == "default") {
    spec = weekly_artifact_bands();
  } else {
    for (const auto& triple : split(config.bands, ';')) {
      const auto parts = split(triple, ':');
      if (parts.size() != 3) {
        throw ParseError("config: band '" + triple + "' must be low:center:high");
      }
      spec.bands.push_back({parse_double(parts[1], "bands"), parse_double(parts[0], "bands"),
                            parse_double(parts[2], "bands")});
    }
  }
  if (config.filter_mode == "hard_zero") {
    spec.mode = FilterMode::hard_zero;
  } else if (config.filter_mode == "cosine_taper") {
    spec.mode = FilterMode::cosine_taper;
  } else {
    throw ParseError("config: filter_mode must be hard_zero or cosine_taper");
  }
  spec.taper_fraction = config.taper_fraction;
  validate_filter_spec(spec);
  return spec;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    out.push_back(static_cast<int>(parse_int(item, key)));
  }
  return out;
}

std::vector<double> read_overlay_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("overlay: cannot open '" + path.string() + "'");
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || p != line.data() + line.size()) {
      if (first) {  // tolerate a header line
        first = false;
        continue;
      }
      throw ParseError("overlay: non-numeric line '" + line + "'");
    }
    first = false;
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("overlay: no values in '" + path.string() + "'");
  return out;
}

std::vector<int> read_reference_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("reference labels: cannot open '" + path.string() + "'");
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // accept either "label" or "epoch,label" rows; skip a non-numeric header
    const auto fields = split(line, ',');
    const std::string& cell = fields.size() >= 2 ? fields[1] : fields[0];
    long long v = 0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size()) {
      if (labels.empty()) continue;
      throw ParseError("reference labels: bad line '" + line + "'");
    }
    labels.push_back(static_cast<int>(v));
  }
  if (labels.empty()) throw ParseError("reference labels: no labels found");
  return labels;
}

ordered_json config_echo(const PipelineConfig& c) {
  ordered_json j;
  j["input"] = c.input;
  j["layout"] = c.layout;
  j["skip_columns"] = c.skip_columns;
  j["clip_negative_to_zero"] = c.clip_negative_to_zero;
  j["bands"] = c.bands;
  j["filter_mode"] = c.filter_mode;
  j["taper_fraction"] = c.taper_fraction;
  j["guard_eps"] = c.guard_eps;
  j["absolute_returns"] = c.absolute_returns;
  j["window"] = c.window;
  j["overlap"] = c.overlap;
  j["k"] = c.k;
  j["n_restarts"] = c.n_restarts;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["zero_variance_policy"] = c.zero_variance_policy;
  j["scan_k_min"] = c.scan_k_min;
  j["scan_k_max"] = c.scan_k_max;
  j["bins_empirical"] = c.bins_empirical;
  j["bins_wishart"] = c.bins_wishart;
  j["bins_mp"] = c.bins_mp;
  j["wishart_samples"] = c.wishart_samples;
  j["mp_q"] = c.mp_q;
  j["mp_sigma2"] = c.mp_sigma2;
  j["out"] = c.out;
  j["overlay"] = c.overlay;
  j["reference_labels"] = c.reference_labels;
  j["figures"] = c.figures;
  j["figure_regions"] = c.figure_regions;
  return j;
}

class StageRunner {
 public:
  StageRunner(RunManifest& manifest, const std::filesystem::path& out_dir)
      : manifest_(manifest), out_dir_(out_dir) {}

  void run(const std::string& name, const std::string& version,
           const std::function<void(StageRecord&)>& body) {
    StageRecord record;
    record.name = name;
    record.version = version;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(record);
    } catch (const std::exception& e) {
      throw Error("stage " + name + ": " + e.what());
    }
    const auto end = std::chrono::steady_clock::now();
    record.wall_ms = std::chrono::duration<double, std::milli>(end - start).count();
    manifest_.stages.push_back(std::move(record));
  }

  const std::filesystem::path& dir() const { return out_dir_; }

 private:
  RunManifest& manifest_;
  std::filesystem::path out_dir_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string epoch_tag(int index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%03d", index);
  return buf;
}

}  // namespace

std::uint64_t stage_seed_synth(std::uint64_t root) { return derive_seed(root, 101); }
std::uint64_t stage_seed_clustering(std::uint64_t root) { return derive_seed(root, 102); }
std::uint64_t stage_seed_spectra(std::uint64_t root) { return derive_seed(root, 103); }

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path.string() + "'");
  PipelineConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t") != std::string::npos) {
        throw ParseError("config: line " + std::to_string(line_no) + " is not key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config: empty key at line " + std::to_string(line_no));
    config.set(key, value);
  }
  return config;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "input") input = value;
  else if (key == "layout") layout = value;
  else if (key == "skip_columns") skip_columns = value;
  else if (key == "clip_negative_to_zero") clip_negative_to_zero = parse_bool(value, key);
  else if (key == "bands") bands = value;
  else if (key == "filter_mode") filter_mode = value;
  else if (key == "taper_fraction") taper_fraction = parse_double(value, key);
  else if (key == "guard_eps") guard_eps = parse_double(value, key);
  else if (key == "absolute_returns") absolute_returns = parse_bool(value, key);
  else if (key == "window") window = static_cast<int>(parse_int(value, key));
  else if (key == "overlap") overlap = static_cast<int>(parse_int(value, key));
  else if (key == "k") k = static_cast<int>(parse_int(value, key));
  else if (key == "n_restarts") n_restarts = static_cast<int>(parse_int(value, key));
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "tol") tol = parse_double(value, key);
  else if (key == "max_iter") max_iter = static_cast<int>(parse_int(value, key));
  else if (key == "zero_variance_policy") zero_variance_policy = value;
  else if (key == "scan_k_min") scan_k_min = static_cast<int>(parse_int(value, key));
  else if (key == "scan_k_max") scan_k_max = static_cast<int>(parse_int(value, key));
  else if (key == "bins_empirical") bins_empirical = static_cast<int>(parse_int(value, key));
  else if (key == "bins_wishart") bins_wishart = static_cast<int>(parse_int(value, key));
  else if (key == "bins_mp") bins_mp = value;
  else if (key == "wishart_samples") wishart_samples = static_cast<int>(parse_int(value, key));
  else if (key == "mp_q") mp_q = parse_double(value, key);
  else if (key == "mp_sigma2") mp_sigma2 = parse_double(value, key);
  else if (key == "out") out = value;
  else if (key == "overlay") overlay = value;
  else if (key == "reference_labels") reference_labels = value;
  else if (key == "figures") figures = parse_bool(value, key);
  else if (key == "figure_regions") figure_regions = static_cast<int>(parse_int(value, key));
  else throw ParseError("config: unknown key '" + key + "'");
}

RunManifest run_pipeline(const PipelineConfig& config) {
  if (config.input.empty()) throw ParseError("config: input is required");
  const std::filesystem::path out_dir(config.out);
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / ".partial", "run in progress\n");

  RunManifest manifest;
  manifest.config = config;
  manifest.seed = config.seed;
  StageRunner stages(manifest, out_dir);

  const ZeroVariancePolicy policy = [&] {
    if (config.zero_variance_policy == "error") return ZeroVariancePolicy::error;
    if (config.zero_variance_policy == "zero_fill") return ZeroVariancePolicy::zero_fill;
    throw ParseError("config: zero_variance_policy must be error or zero_fill");
  }();

  TimeSeriesPanel panel;
  stages.run("ingest", "1", [&](StageRecord& record) {
    LoadOptions options;
    for (auto& col : split(config.skip_columns, ',')) options.skip_columns.push_back(col);
    options.clip_negative_to_zero = config.clip_negative_to_zero;
    const PanelLayout layout = [&] {
      if (config.layout == "dates_as_rows") return PanelLayout::dates_as_rows;
      if (config.layout == "regions_as_rows") return PanelLayout::regions_as_rows;
      throw ParseError("config: layout must be dates_as_rows or regions_as_rows");
    }();
    panel = load_panel(config.input, layout, options);
    save_panel(out_dir / "panel_canonical.csv", panel);
    record.outputs.push_back("panel_canonical.csv");
  });

  const SpectralFilterSpec filter_spec = spec_from_config(config);
  TimeSeriesPanel filtered;
  stages.run("filter", "1", [&](StageRecord& record) {
    filtered = filter_panel(panel, filter_spec);
    save_panel(out_dir / "filtered_panel.csv", filtered);
    record.outputs.push_back("filtered_panel.csv");
    const int n_fig = std::min<int>(config.figure_regions, static_cast<int>(panel.n_regions()));
    for (int i = 0; i < n_fig; ++i) {
      const auto raw_row = std::vector<double>(panel.values.row(i).begin(), panel.values.row(i).end());
      const auto flt_row = std::vector<double>(filtered.values.row(i).begin(), filtered.values.row(i).end());
      const std::string stem = "spectrum_" + panel.regions[static_cast<std::size_t>(i)];
      write_spectrum_csv(out_dir / (stem + "_raw.csv"), power_spectrum(raw_row));
      write_spectrum_csv(out_dir / (stem + "_filtered.csv"), power_spectrum(flt_row));
      record.outputs.push_back(stem + "_raw.csv");
      record.outputs.push_back(stem + "_filtered.csv");
    }
  });

  ReturnsPanel returns;
  stages.run("returns", "1", [&](StageRecord& record) {
    ReturnsOptions options;
    options.guard_eps = config.guard_eps;
    options.absolute = config.absolute_returns;
    returns = compute_returns(filtered, options);
    TimeSeriesPanel as_panel;
    as_panel.regions = returns.regions;
    as_panel.dates = returns.dates;
    as_panel.values = returns.values;
    save_panel(out_dir / "returns.csv", as_panel);
    record.outputs.push_back("returns.csv");
  });

  EpochPlan plan;
  std::vector<CorrelationMatrix> matrices;
  stages.run("epochs", "1", [&](StageRecord& record) {
    plan = plan_epochs(static_cast<int>(returns.n_days()), config.window, config.overlap);
    matrices = correlation_series(returns, plan, policy);
    write_matrices_json(out_dir / "correlations.json", matrices);
    record.outputs.push_back("correlations.json");
    const auto mat_dir = out_dir / "correlations";
    std::filesystem::create_directories(mat_dir);
    for (const auto& m : matrices) {
      const std::string name = "epoch_" + epoch_tag(m.epoch_index) + ".csv";
      write_matrix_csv(mat_dir / name, m.entries, returns.regions);
      record.outputs.push_back("correlations/" + name);
    }
  });

  ClusteringResult clustering;
  std::vector<SymbolicEntry> symbolic;
  std::vector<Eigen::MatrixXd> plain;
  stages.run("clustering", "1", [&](StageRecord& record) {
    plain.reserve(matrices.size());
    for (const auto& m : matrices) plain.push_back(m.entries);
    KMeansOptions options;
    options.tol = config.tol;
    options.max_iter = config.max_iter;
    clustering =
        kmeans_multi(plain, config.k, config.n_restarts, stage_seed_clustering(config.seed), options);
    symbolic = symbolic_dynamics(clustering, plan);
    write_clustering_json(out_dir / "clustering.json", clustering, symbolic);
    record.outputs.push_back("clustering.json");
    write_symbolic_csv(out_dir / "symbolic_dynamics.csv", symbolic, clustering.k, plan.stride);
    record.outputs.push_back("symbolic_dynamics.csv");

    if (config.scan_k_min >= 1 && config.scan_k_max >= config.scan_k_min) {
      const auto diagnostics = scan_k(plain, config.scan_k_min, config.scan_k_max,
                                      config.n_restarts, stage_seed_clustering(config.seed), options);
      write_k_diagnostics_csv(out_dir / "k_diagnostics.csv", diagnostics);
      record.outputs.push_back("k_diagnostics.csv");
    }
    if (!config.reference_labels.empty()) {
      const auto reference = read_reference_labels(config.reference_labels);
      if (reference.size() != clustering.labels.size()) {
        throw ShapeError("reference labels: " + std::to_string(reference.size()) +
                         " labels for " + std::to_string(clustering.labels.size()) + " epochs");
      }
      const double ari = adjusted_rand_index(clustering.labels, reference);
      ordered_json j;
      j["n_epochs"] = clustering.labels.size();
      j["ari"] = ari;
      write_text(out_dir / "ari_report.json", j.dump(1) + "\n");
      record.outputs.push_back("ari_report.json");
      std::cout << "reference agreement: ARI = " << fmt_double(ari) << "\n";
    }
  });

  std::vector<ClusterSpectrum> spectra;
  stages.run("spectra", "1", [&](StageRecord& record) {
    SpectraOptions options;
    options.bins_empirical = config.bins_empirical;
    options.bins_wishart = config.bins_wishart;
    options.bins_mp = parse_int_list(config.bins_mp, "bins_mp");
    options.wishart_samples = config.wishart_samples;
    options.seed = stage_seed_spectra(config.seed);
    options.q_override = config.mp_q;
    options.sigma2 = config.mp_sigma2;
    spectra = cluster_spectra(plain, clustering.labels, config.window, options);
    for (const auto& cs : spectra) {
      write_cluster_spectrum_csv(out_dir, cs);
      const std::string tag = std::to_string(cs.cluster_id + 1);
      record.outputs.push_back("eigenvalues_cluster_" + tag + ".csv");
      record.outputs.push_back("spectrum_cluster_" + tag + ".csv");
    }
  });

  if (config.figures) {
    stages.run("figures", "1", [&](StageRecord& record) {
      auto emit = [&](const std::string& name, const std::function<std::string()>& render) {
        try {
          write_text(out_dir / name, render());
          record.outputs.push_back(name);
        } catch (const std::exception& e) {
          std::cerr << "warning: figure " << name << " failed: " << e.what() << "\n";
        }
      };
      const int n_fig = std::min<int>(config.figure_regions, static_cast<int>(panel.n_regions()));
      for (int i = 0; i < n_fig; ++i) {
        const auto raw_row = std::vector<double>(panel.values.row(i).begin(), panel.values.row(i).end());
        const auto flt_row = std::vector<double>(filtered.values.row(i).begin(), filtered.values.row(i).end());
        const auto ret_row = std::vector<double>(returns.values.row(i).begin(), returns.values.row(i).end());
        const std::string& region = panel.regions[static_cast<std::size_t>(i)];
        emit("fig_filter_" + region + ".svg", [&] { return svg_filter_figure(region, raw_row, flt_row); });
        emit("fig_returns_" + region + ".svg", [&] { return svg_returns_figure(region, flt_row, ret_row); });
      }
      for (const auto& m : matrices) {
        emit("fig_epoch_" + epoch_tag(m.epoch_index) + ".svg", [&] {
          return svg_heatmap(m.entries, "epoch " + std::to_string(m.epoch_index) + " (day " +
                                            std::to_string(m.epoch_start_day) + ")");
        });
      }
      for (int c = 0; c < clustering.k; ++c) {
        emit("fig_centroid_" + std::to_string(c + 1) + ".svg", [&] {
          return svg_heatmap(clustering.centroids[static_cast<std::size_t>(c)],
                             "centroid, cluster " + std::to_string(c + 1));
        });
      }
      emit("fig_symbolic_dynamics.svg", [&] {
        std::optional<std::vector<double>> overlay;
        if (!config.overlay.empty()) overlay = read_overlay_series(config.overlay);
        return svg_strip_chart(symbolic, clustering.k, plan.window, overlay);
      });
      for (const auto& cs : spectra) {
        emit("fig_spectrum_cluster_" + std::to_string(cs.cluster_id + 1) + ".svg",
             [&] { return svg_spectra_overlay(cs); });
      }
    });
  }

  // Manifest, then timings (the only file that varies between identical runs).
  ordered_json mj;
  mj["tool"] = "corrstates";
  mj["version"] = "0.1.0";
  mj["seed"] = manifest.seed;
  mj["config"] = config_echo(config);
  ordered_json stage_list = ordered_json::array();
  for (const auto& s : manifest.stages) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["version"] = s.version;
    sj["outputs"] = s.outputs;
    stage_list.push_back(std::move(sj));
  }
  mj["stages"] = std::move(stage_list);
  write_text(out_dir / "manifest.json", mj.dump(1) + "\n");

  ordered_json tj = ordered_json::array();
  for (const auto& s : manifest.stages) {
    tj.push_back({{"name", s.name}, {"wall_ms", s.wall_ms}});
  }
  write_text(out_dir / "timings.json", tj.dump(1) + "\n");

  std::filesystem::remove(out_dir / ".partial");
  return manifest;
}

}  // namespace corrstates
