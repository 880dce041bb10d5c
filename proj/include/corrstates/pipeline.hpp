#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace corrstates {

/// One flat bag of keys: everything the run depends on, so the manifest's
/// config echo pins every output byte. Parsed from `key = value` lines, with
/// CLI flags overriding file values.
struct PipelineConfig {
  std::string input;
  std::string layout = "dates_as_rows";
  std::string skip_columns;  // comma-separated metadata column names
  bool clip_negative_to_zero = false;

  std::string bands = "default";  // or "low:center:high" triples, ';'-separated
  std::string filter_mode = "hard_zero";
  double taper_fraction = 0.1;

  double guard_eps = 1e-6;
  bool absolute_returns = false;

  int window = 33;
  int overlap = 17;

  int k = 4;
  int n_restarts = 1000;
  std::uint64_t seed = 12345;
  double tol = 1e-6;
  int max_iter = 300;
  std::string zero_variance_policy = "error";
  int scan_k_min = 0;  // 0 disables the k scan
  int scan_k_max = 0;

  int bins_empirical = 32;
  int bins_wishart = 24;
  std::string bins_mp = "17,8,8,5";
  int wishart_samples = 2000;
  double mp_q = 0.0;  // 0 derives window / n_regions
  double mp_sigma2 = 1.0;

  std::string out = "out";
  std::string overlay;            // optional daily series for the strip chart
  std::string reference_labels;   // optional labels to score with ARI
  bool figures = true;
  int figure_regions = 4;

  static PipelineConfig from_file(const std::filesystem::path& path);
  /// Set a key from its string form; throws ParseError on unknown keys or
  /// unparseable values.
  void set(const std::string& key, const std::string& value);
};

struct StageRecord {
  std::string name;
  std::string version;
  std::vector<std::string> outputs;  // paths relative to the output directory
  double wall_ms = 0.0;
};

struct RunManifest {
  PipelineConfig config;
  std::vector<StageRecord> stages;
  std::uint64_t seed = 0;
};

/// ingest -> filter -> returns -> epochs/correlations -> clustering ->
/// symbolic dynamics -> spectra -> figures. Writes every stage artifact
/// under config.out plus manifest.json; stage timings go to timings.json,
/// which is the one non-reproducible file. A `.partial` marker exists
/// while the run is in flight and stays behind if a stage aborts.
RunManifest run_pipeline(const PipelineConfig& config);

/// Seed streams derived from the root seed, shared between the pipeline and
/// the standalone subcommands so stage reruns reproduce stage outputs.
std::uint64_t stage_seed_synth(std::uint64_t root);
std::uint64_t stage_seed_clustering(std::uint64_t root);
std::uint64_t stage_seed_spectra(std::uint64_t root);

}  // namespace corrstates
