// Acceptance suite: one self-contained check per criterion, one line of
// output each, nonzero exit count on failure.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corrstates/clustering.hpp"
#include "corrstates/io.hpp"
#include "corrstates/panel.hpp"
#include "corrstates/pipeline.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/rng.hpp"
#include "corrstates/spectral.hpp"
#include "corrstates/synth.hpp"

using namespace corrstates;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kPi = 3.14159265358979323846;

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> body;
  double budget_ms = 0.0;  // 0 = no stated budget
};

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool check(bool ok, const std::string& what, std::string& detail) {
  if (!ok && detail.empty()) detail = what;
  return ok;
}

// ---- criterion 1: epoch arithmetic ---------------------------------------

bool epoch_arithmetic(std::string& detail) {
  const auto plan = plan_epochs(1020, 33, 17);
  bool ok = true;
  ok &= check(plan.stride == 16, "stride != 16", detail);
  ok &= check(plan.epoch_count == 62, "epoch count != 62", detail);
  ok &= check(static_cast<int>(plan.epoch_starts.size()) == 62, "starts size", detail);
  for (int e = 0; e < plan.epoch_count && ok; ++e) {
    ok &= check(plan.epoch_starts[static_cast<std::size_t>(e)] == 16 * e, "start grid", detail);
  }
  ok &= check(plan.epoch_starts.back() == 976, "last start != 976", detail);
  return ok;
}

// ---- criterion 2: filter attenuation --------------------------------------

bool filter_attenuation(std::string& detail) {
  const auto spec = weekly_artifact_bands();
  const std::size_t d = 1021;
  // Tones on bins 146/292/438 sit inside the three bands (the first is the
  // band-center bin itself); bins 34 and 200 provide out-of-band power.
  std::vector<double> x(d);
  Rng rng(2);
  for (std::size_t t = 0; t < d; ++t) {
    const double phase = kTwoPi * static_cast<double>(t) / static_cast<double>(d);
    x[t] = 50.0 + 4.0 * std::sin(146.0 * phase) + 4.0 * std::sin(292.0 * phase) +
           4.0 * std::sin(438.0 * phase) + 2.0 * std::sin(34.0 * phase) +
           2.0 * std::sin(200.0 * phase) + 0.01 * rng.uniform(-1.0, 1.0);
  }
  const auto y = band_stop(x, spec);
  const auto before = power_spectrum(x);
  const auto after = power_spectrum(y);
  const auto in_band = [&](double f) {
    for (const auto& b : spec.bands) {
      if (f >= b.low_edge && f <= b.high_edge) return true;
    }
    return false;
  };
  double in_before = 0.0, in_after = 0.0, out_before = 0.0, out_after = 0.0;
  for (std::size_t i = 0; i < before.frequencies.size(); ++i) {
    if (in_band(before.frequencies[i])) {
      in_before += before.power[i];
      in_after += after.power[i];
    } else {
      out_before += before.power[i];
      out_after += after.power[i];
    }
  }
  bool ok = true;
  ok &= check(in_before > 0.0, "no in-band power", detail);
  ok &= check(in_after <= 1e-6 * in_before, "in-band attenuation below 60 dB", detail);
  ok &= check(std::abs(out_after - out_before) < 1e-3 * out_before,
              "out-of-band power moved more than 0.1%", detail);
  return ok;
}

// ---- criterion 3: correlation invariants ----------------------------------

Eigen::MatrixXd two_pass_pearson_oracle(const Eigen::MatrixXd& block) {
  const Eigen::Index n = block.rows();
  const Eigen::Index w = block.cols();
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean(i) = block.row(i).mean();
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index t = 0; t < w; ++t) {
        sum += (block(i, t) - mean(i)) * (block(j, t) - mean(j));
      }
      cov(i, j) = sum / static_cast<double>(w);
    }
  }
  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      corr(i, j) = i == j ? 1.0 : cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    }
  }
  return corr;
}

bool correlation_invariants(std::string& detail) {
  const Eigen::Index n = 32, w = 33;
  Rng rng(31337);
  Eigen::MatrixXd block(n, w);
  for (int epoch = 0; epoch < 10000; ++epoch) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index t = 0; t < w; ++t) block(i, t) = rng.normal();
    }
    const Eigen::MatrixXd c = pearson_from_block(block);
    if (!check((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "asymmetry", detail)) return false;
    if (!check((c.diagonal().array() == 1.0).all(), "diagonal", detail)) return false;
    if (!check(c.maxCoeff() <= 1.0 && c.minCoeff() >= -1.0, "range", detail)) return false;
    const Eigen::MatrixXd oracle = two_pass_pearson_oracle(block);
    if (!check((c - oracle).cwiseAbs().maxCoeff() < 1e-12, "oracle mismatch", detail)) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    if (!check(std::abs(solver.eigenvalues().sum() - 32.0) < 1e-8, "eigenvalue sum", detail)) {
      return false;
    }
  }
  return true;
}

// ---- criterion 4: degeneracy regime ---------------------------------------

bool degeneracy_regime(std::string& detail) {
  const Eigen::Index n = 32;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 20 && ok; ++seed) {
    Rng rng(7000 + seed);
    Eigen::MatrixXd narrow(n, 16);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index t = 0; t < 16; ++t) narrow(i, t) = rng.normal();
    }
    const auto c = pearson_from_block(narrow);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    int rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (solver.eigenvalues()(i) > 1e-8 * static_cast<double>(n)) ++rank;
    }
    ok &= check(rank <= 15, "rank above W-1 at W=16", detail);
  }
  for (std::uint64_t seed = 0; seed < 20 && ok; ++seed) {
    Rng rng(8000 + seed);
    Eigen::MatrixXd wide(n, 33);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index t = 0; t < 33; ++t) wide(i, t) = rng.normal();
    }
    const auto c = pearson_from_block(wide);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    ok &= check(solver.eigenvalues()(0) > 1e-9, "singular at W=33", detail);
  }
  return ok;
}

// ---- criterion 5: planted-cluster recovery ---------------------------------

bool planted_recovery(std::string& detail) {
  std::vector<int> truth;
  const auto matrices = planted_matrices(62, 32, 4, 0.02, 20200227, &truth);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto result = kmeans_multi(matrices, 4, 100, seed * 7919, {300, 1e-6});
    if (!check(adjusted_rand_index(result.labels, truth) == 1.0,
               "seed " + std::to_string(seed) + " missed the planted partition", detail)) {
      return false;
    }
    if (!check(result.n_iterations <= 300, "no convergence within 300 iterations", detail)) {
      return false;
    }
  }
  return true;
}

// ---- criterion 6: k selection ----------------------------------------------

bool k_selection(std::string& detail) {
  std::vector<int> truth;
  const auto matrices = planted_matrices(62, 32, 4, 0.02, 5150, &truth);
  const auto diagnostics = scan_k(matrices, 2, 8, 60, 11);
  int best_k = 0;
  double best = -2.0;
  for (const auto& d : diagnostics) {
    if (d.mean_silhouette > best) {
      best = d.mean_silhouette;
      best_k = d.k;
    }
  }
  return check(best_k == 4, "silhouette peak at k=" + std::to_string(best_k), detail);
}

// ---- criterion 7: MP closed form -------------------------------------------

bool mp_closed_form(std::string& detail) {
  const auto p = MpParams::from_geometry(33, 32);
  const double root = 1.0 / std::sqrt(33.0 / 32.0);
  bool ok = true;
  ok &= check(std::abs(p.lambda_plus - (1.0 + root) * (1.0 + root)) < 1e-12, "l+ formula", detail);
  ok &= check(std::abs(p.lambda_minus - (1.0 - root) * (1.0 - root)) < 1e-12, "l- formula", detail);
  ok &= check(std::abs(p.lambda_plus - 3.93916) < 1e-4, "l+ value", detail);
  ok &= check(std::abs(p.lambda_minus - 2.33e-4) < 1e-5, "l- value", detail);

  // Quadrature oracle with the endpoint substitution l = l- + span sin^2.
  const double span = p.lambda_plus - p.lambda_minus;
  const int steps = 4000;
  const double h = (kPi / 2.0) / steps;
  double integral = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double theta = h * i;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double g = mp_density(p.lambda_minus + span * s * s, p) * 2.0 * span * s * c;
    integral += g * h * ((i == 0 || i == steps) ? 1.0 / 3.0 : (i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0));
  }
  ok &= check(std::abs(integral - 1.0) < 1e-6, "density integral != 1", detail);
  return ok;
}

// ---- criterion 8: Wishart/MP consistency -----------------------------------

bool wishart_mp_consistency(std::string& detail) {
  const auto p = MpParams::from_geometry(33, 32);
  WishartEnsembleSpec null_spec{32, 33, 0.0, 2000, 97};
  const auto null_eigs = wishart_ensemble_spectrum(null_spec);
  const double ks = ks_distance(null_eigs, [&](double x) { return mp_cdf(x, p); });
  bool ok = check(ks < 0.05, "KS distance " + std::to_string(ks), detail);

  WishartEnsembleSpec corr_spec{32, 33, 0.5, 2000, 98};
  const auto corr_eigs = wishart_ensemble_spectrum(corr_spec);
  double mean_largest = 0.0;
  for (int s = 0; s < corr_spec.n_samples; ++s) {
    mean_largest += corr_eigs[static_cast<std::size_t>(s) * 32 + 31];
  }
  mean_largest /= corr_spec.n_samples;
  ok &= check(std::abs(mean_largest - 16.5) <= 0.15 * 16.5,
              "mean largest eigenvalue " + std::to_string(mean_largest), detail);

  // Mean off-diagonal of the sample correlation, via an independent
  // Cholesky-based reconstruction of the same population.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(32, 32, 0.5);
  sigma.diagonal().setOnes();
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  Rng rng(12012);
  double offdiag_mean = 0.0;
  for (int s = 0; s < 2000; ++s) {
    Eigen::MatrixXd draws(32, 33);
    for (Eigen::Index c = 0; c < 33; ++c) {
      for (Eigen::Index r = 0; r < 32; ++r) draws(r, c) = rng.normal();
    }
    offdiag_mean += mean_offdiag(pearson_from_block(chol * draws));
  }
  offdiag_mean /= 2000.0;
  ok &= check(std::abs(offdiag_mean - 0.5) < 0.02,
              "mean off-diagonal " + std::to_string(offdiag_mean), detail);
  return ok;
}

// ---- criterion 9: collective-mode signature ---------------------------------

bool collective_mode(std::string& detail) {
  const auto p = MpParams::from_geometry(33, 32);
  WishartEnsembleSpec strong{32, 33, 0.3, 500, 14};
  const auto strong_eigs = wishart_ensemble_spectrum(strong);
  const double top = *std::max_element(strong_eigs.begin(), strong_eigs.end());
  bool ok = check(top > p.lambda_plus, "no eigenvalue above the MP edge", detail);

  WishartEnsembleSpec weak{32, 33, 0.0, 500, 15};
  const auto weak_eigs = wishart_ensemble_spectrum(weak);
  int outside = 0;
  for (double v : weak_eigs) {
    if (v < p.lambda_minus - 0.1 || v > p.lambda_plus + 0.1) ++outside;
  }
  ok &= check(static_cast<double>(outside) / static_cast<double>(weak_eigs.size()) < 0.01,
              "support leakage above 1%", detail);
  return ok;
}

// ---- criterion 10: end-to-end determinism -----------------------------------

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    out[fs::relative(entry.path(), root).string()] = read_bytes(entry.path());
  }
  return out;
}

bool end_to_end_determinism(std::string& detail) {
  const auto dir = fs::temp_directory_path() / "corrstates_acceptance";
  fs::remove_all(dir);
  const auto sandbox_a = dir / "sandbox_a";
  const auto sandbox_b = dir / "sandbox_b";
  fs::create_directories(sandbox_a);
  fs::create_directories(sandbox_b);

  SynthConfig synth;  // bundled generator, default geometry
  const auto panel = synth_panel(synth);
  save_panel(sandbox_a / "panel.csv", panel);
  fs::copy_file(sandbox_a / "panel.csv", sandbox_b / "panel.csv");

  // Identical config bytes, run from two working directories.
  PipelineConfig config;  // default analysis settings
  config.input = "panel.csv";
  config.out = "out";
  const auto cwd = fs::current_path();
  fs::current_path(sandbox_a);
  const auto manifest = run_pipeline(config);
  fs::current_path(sandbox_b);
  run_pipeline(config);
  fs::current_path(cwd);

  bool ok = true;
  const auto matrices = read_matrices_json(sandbox_a / "out" / "correlations.json");
  ok &= check(matrices.size() == 62, "not 62 correlation matrices", detail);
  const auto clustering = read_clustering_json(sandbox_a / "out" / "clustering.json");
  ok &= check(clustering.k == 4, "not a 4-cluster result", detail);
  std::set<int> populated(clustering.labels.begin(), clustering.labels.end());
  ok &= check(populated.size() == 4, "empty cluster in the result", detail);
  for (int c = 1; c <= 4; ++c) {
    ok &= check(
        fs::exists(sandbox_a / "out" / ("spectrum_cluster_" + std::to_string(c) + ".csv")),
        "missing spectra bundle", detail);
  }
  ok &= check(manifest.stages.size() == 7, "stage count", detail);

  int heatmaps = 0, centroids = 0;
  for (const auto& entry : fs::directory_iterator(sandbox_a / "out")) {
    const auto name = entry.path().filename().string();
    if (name.rfind("fig_epoch_", 0) == 0) ++heatmaps;
    if (name.rfind("fig_centroid_", 0) == 0) ++centroids;
  }
  ok &= check(heatmaps == 62, "not 62 epoch heatmaps", detail);
  ok &= check(centroids == 4, "not 4 centroid heatmaps", detail);

  const auto tree_a = tree_bytes(sandbox_a / "out");
  const auto tree_b = tree_bytes(sandbox_b / "out");
  ok &= check(tree_a.size() == tree_b.size(), "output trees differ in file count", detail);
  for (const auto& [name, bytes] : tree_a) {
    if (name == "timings.json") continue;  // wall-clock record, not an artifact
    const auto it = tree_b.find(name);
    if (!check(it != tree_b.end(), "missing file " + name, detail)) return false;
    if (!check(it->second == bytes, "bytes differ in " + name, detail)) return false;
  }
  return ok;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"1. epoch arithmetic (1020/33/17 -> 62 epochs, stride 16, starts 0..976)",
       epoch_arithmetic, 1.0},
      {"2. filter attenuation (>= 60 dB in-band, < 0.1% out-of-band)", filter_attenuation,
       1000.0},
      {"3. correlation invariants on 10,000 random epochs", correlation_invariants, 30000.0},
      {"4. degeneracy regime (rank <= 15 at W=16, positive definite at W=33)",
       degeneracy_regime, 0.0},
      {"5. planted-cluster recovery (ARI = 1 on 100/100 seeds)", planted_recovery, 60000.0},
      {"6. k selection (silhouette peak at k = 4)", k_selection, 0.0},
      {"7. MP closed form (support and unit mass)", mp_closed_form, 0.0},
      {"8. Wishart/MP consistency (KS < 0.05; population statistics)",
       wishart_mp_consistency, 60000.0},
      {"9. collective-mode signature (eigenvalue above the MP edge)", collective_mode, 0.0},
      {"10. end-to-end determinism (byte-identical output trees)", end_to_end_determinism,
       60000.0},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    std::string detail;
    const double start = now_ms();
    bool ok = false;
    try {
      ok = criterion.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed = now_ms() - start;
    if (ok && criterion.budget_ms > 0.0 && elapsed > criterion.budget_ms) {
      ok = false;
      detail = "runtime " + std::to_string(elapsed) + " ms over budget";
    }
    std::printf("[%s] %s (%.1f ms)%s%s\n", ok ? "PASS" : "FAIL", criterion.name.c_str(),
                elapsed, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  return failures;
}
