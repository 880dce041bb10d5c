#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "corrstates/clustering.hpp"
#include "corrstates/errors.hpp"
#include "corrstates/io.hpp"
#include "corrstates/panel.hpp"
#include "corrstates/pipeline.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/svg.hpp"
#include "corrstates/synth.hpp"

namespace {

using corrstates::PipelineConfig;

/// Every config key is exposed as a flag; flags that were actually passed
/// override the config file.
void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& overrides) {
  static const char* keys[] = {
      "input",          "layout",        "skip_columns",  "clip_negative_to_zero",
      "bands",          "filter_mode",   "taper_fraction", "guard_eps",
      "absolute_returns", "window",      "overlap",       "k",
      "n_restarts",     "seed",          "tol",           "max_iter",
      "zero_variance_policy", "scan_k_min", "scan_k_max", "bins_empirical",
      "bins_wishart",   "bins_mp",       "wishart_samples", "mp_q",
      "mp_sigma2",      "out",           "overlay",       "reference_labels",
      "figures",        "figure_regions"};
  for (const char* key : keys) {
    std::string flag = "--";
    for (const char* p = key; *p != '\0'; ++p) flag += (*p == '_') ? '-' : *p;
    cmd->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
        std::string("override config key ") + key);
  }
}

int run_analyze(const std::string& config_path,
                const std::map<std::string, std::string>& overrides) {
  PipelineConfig config;
  if (!config_path.empty()) config = PipelineConfig::from_file(config_path);
  for (const auto& [key, value] : overrides) config.set(key, value);
  const auto manifest = corrstates::run_pipeline(config);
  std::cout << "wrote " << manifest.stages.size() << " stages to " << config.out << "\n";
  return 0;
}

int run_synth(std::uint64_t seed, const std::string& out, int regions, int days) {
  corrstates::SynthConfig config;
  config.seed = seed;
  config.regions = regions;
  config.days = days;
  const auto panel = corrstates::synth_panel(config);
  corrstates::save_panel(out, panel);
  std::cout << "wrote " << panel.n_regions() << "x" << panel.n_days() << " panel to " << out
            << "\n";
  return 0;
}

int run_spectra(const std::string& from, const std::string& labels_path, int window,
                std::uint64_t seed, const std::string& out_dir, int bins_empirical,
                int bins_wishart, const std::string& bins_mp, int wishart_samples,
                double mp_q, double mp_sigma2) {
  const auto matrices = corrstates::read_matrices_json(from);
  if (matrices.empty()) throw corrstates::ParseError("spectra: no matrices in " + from);

  std::vector<Eigen::MatrixXd> plain;
  plain.reserve(matrices.size());
  for (const auto& m : matrices) plain.push_back(m.entries);

  std::vector<int> labels(matrices.size(), 0);
  if (!labels_path.empty()) {
    labels = corrstates::read_clustering_json(labels_path).labels;
    if (labels.size() != matrices.size()) {
      throw corrstates::ShapeError("spectra: clustering labels do not match matrices");
    }
  }

  corrstates::SpectraOptions options;
  options.bins_empirical = bins_empirical;
  options.bins_wishart = bins_wishart;
  options.bins_mp.clear();
  std::istringstream bins_in(bins_mp);
  std::string part;
  while (std::getline(bins_in, part, ',')) {
    if (!part.empty()) options.bins_mp.push_back(std::stoi(part));
  }
  options.wishart_samples = wishart_samples;
  options.seed = corrstates::stage_seed_spectra(seed);
  options.q_override = mp_q;
  options.sigma2 = mp_sigma2;

  std::filesystem::create_directories(out_dir);
  const auto spectra = corrstates::cluster_spectra(plain, labels, window, options);
  for (const auto& cs : spectra) {
    corrstates::write_cluster_spectrum_csv(out_dir, cs);
    std::ofstream fig(std::filesystem::path(out_dir) /
                      ("fig_spectrum_cluster_" + std::to_string(cs.cluster_id + 1) + ".svg"));
    fig << corrstates::svg_spectra_overlay(cs);
  }
  std::cout << "wrote spectra for " << spectra.size() << " clusters to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlation-regime analysis of regional daily-count panels"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "run the full pipeline from a config");
  std::string config_path;
  analyze->add_option("--config", config_path, "key = value config file");
  std::map<std::string, std::string> overrides;
  add_config_flags(analyze, overrides);

  auto* synth = app.add_subcommand("synth", "generate a synthetic panel CSV");
  std::uint64_t synth_seed = 1;
  std::string synth_out = "synthetic_panel.csv";
  int synth_regions = 32;
  int synth_days = 1021;
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV path");
  synth->add_option("--regions", synth_regions, "number of regions");
  synth->add_option("--days", synth_days, "number of days");

  auto* spectra = app.add_subcommand("spectra", "recompute RMT spectra from saved matrices");
  std::string from, labels_path, spectra_out = "spectra_out", bins_mp = "17,8,8,5";
  int window = 33, bins_empirical = 32, bins_wishart = 24, wishart_samples = 2000;
  std::uint64_t spectra_seed = 12345;
  double mp_q = 0.0, mp_sigma2 = 1.0;
  spectra->add_option("--from", from, "correlations.json produced by analyze")->required();
  spectra->add_option("--labels", labels_path, "clustering.json with labels (optional)");
  spectra->add_option("--window", window, "epoch window length T");
  spectra->add_option("--seed", spectra_seed, "root seed (matches analyze)");
  spectra->add_option("--out", spectra_out, "output directory");
  spectra->add_option("--bins-empirical", bins_empirical, "empirical histogram bins");
  spectra->add_option("--bins-wishart", bins_wishart, "ensemble histogram bins");
  spectra->add_option("--bins-mp", bins_mp, "per-cluster MP display bins");
  spectra->add_option("--wishart-samples", wishart_samples, "ensemble size");
  spectra->add_option("--mp-q", mp_q, "aspect ratio override (0 = window/N)");
  spectra->add_option("--mp-sigma2", mp_sigma2, "MP variance scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(config_path, overrides);
    if (synth->parsed()) return run_synth(synth_seed, synth_out, synth_regions, synth_days);
    if (spectra->parsed()) {
      return run_spectra(from, labels_path, window, spectra_seed, spectra_out, bins_empirical,
                         bins_wishart, bins_mp, wishart_samples, mp_q, mp_sigma2);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
