#include "corrstates/rmt.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "corrstates/errors.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rng.hpp"

namespace corrstates {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Integrate the continuous MP density from lambda_minus to `upper` with the
/// substitution lambda = l- + (l+ - l-) sin^2(theta), which removes both
/// endpoint square-root singularities; composite Simpson on the smooth
/// integrand.
double mp_mass_below(double upper, const MpParams& p) {
  if (upper <= p.lambda_minus) return 0.0;
  const double span = p.lambda_plus - p.lambda_minus;
  const double clipped = std::min(upper, p.lambda_plus);
  const double theta_max = std::asin(std::sqrt((clipped - p.lambda_minus) / span));
  const auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double lambda = p.lambda_minus + span * s * s;
    if (lambda <= 0.0) return 0.0;
    // density(lambda) * dlambda/dtheta, with sqrt((l+ - l)(l - l-)) = span*s*c
    return p.q / (2.0 * kPi * p.sigma2 * lambda) * (span * s * c) * (2.0 * span * s * c);
  };
  const int steps = 2048;  // even
  const double h = theta_max / steps;
  double sum = integrand(0.0) + integrand(theta_max);
  for (int i = 1; i < steps; ++i) {
    sum += integrand(h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

Eigen::VectorXd eigenvalues_sym(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigenvalues: matrix not square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) throw ShapeError("eigenvalues: asymmetry beyond 1e-9");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalues: solver failed");
  return solver.eigenvalues();  // ascending
}

double mean_offdiag(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) throw ShapeError("mean_offdiag: matrix not square");
  const Eigen::Index n = m.rows();
  if (n < 2) throw ShapeError("mean_offdiag: need at least 2 rows");
  const double total = m.sum() - m.trace();
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

MpParams MpParams::from_ratio(double q, double sigma2) {
  if (!(q > 0.0) || !(sigma2 > 0.0)) throw SpecError("mp params: q and sigma2 must be > 0");
  MpParams p;
  p.q = q;
  p.sigma2 = sigma2;
  const double root = 1.0 / std::sqrt(q);
  p.lambda_minus = sigma2 * (1.0 - root) * (1.0 - root);
  p.lambda_plus = sigma2 * (1.0 + root) * (1.0 + root);
  p.zero_mass = q < 1.0 ? 1.0 - q : 0.0;
  return p;
}

MpParams MpParams::from_geometry(int samples, int variables, double sigma2) {
  if (samples < 1 || variables < 1) throw SpecError("mp params: invalid geometry");
  return from_ratio(static_cast<double>(samples) / static_cast<double>(variables), sigma2);
}

double mp_density(double lambda, const MpParams& params) {
  if (lambda <= params.lambda_minus || lambda >= params.lambda_plus) return 0.0;
  if (lambda <= 0.0) return 0.0;
  const double radicand = (params.lambda_plus - lambda) * (lambda - params.lambda_minus);
  return params.q / (2.0 * kPi * params.sigma2 * lambda) * std::sqrt(radicand);
}

double mp_cdf(double lambda, const MpParams& params) {
  if (lambda < 0.0) return 0.0;
  const double continuous = mp_mass_below(lambda, params);
  return std::min(1.0, params.zero_mass + continuous);
}

std::vector<double> wishart_ensemble_spectrum(const WishartEnsembleSpec& spec) {
  if (spec.n < 2 || spec.t < 2) throw SpecError("wishart ensemble: need n >= 2 and t >= 2");
  if (spec.n_samples < 1) throw SpecError("wishart ensemble: n_samples must be >= 1");
  const double lower = -1.0 / static_cast<double>(spec.n - 1);
  if (!(spec.x_bar > lower && spec.x_bar < 1.0)) {
    throw SpecError("wishart ensemble: x_bar must lie in (-1/(n-1), 1)");
  }

  // (1 - x) I + x J = (1 - x) P_perp + (1 + (n-1) x) P_mean with
  // P_mean = J/n, so the square root is a + (b - a)/n * J with
  // a = sqrt(1 - x), b = sqrt(1 + (n-1) x).
  const double a = std::sqrt(1.0 - spec.x_bar);
  const double b = std::sqrt(1.0 + (spec.n - 1) * spec.x_bar);
  const double mix = (b - a) / static_cast<double>(spec.n);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec.n_samples) * static_cast<std::size_t>(spec.n));
  Eigen::MatrixXd draws(spec.n, spec.t);
  Eigen::MatrixXd data(spec.n, spec.t);
  for (int s = 0; s < spec.n_samples; ++s) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(s)));
    for (Eigen::Index c = 0; c < spec.t; ++c) {
      for (Eigen::Index r = 0; r < spec.n; ++r) draws(r, c) = rng.normal();
    }
    // Apply sqrt(Sigma) to each t-column of iid draws.
    const Eigen::RowVectorXd column_sums = draws.colwise().sum();
    data = a * draws + mix * Eigen::VectorXd::Ones(spec.n) * column_sums;

    const Eigen::MatrixXd corr = pearson_from_block(data);
    const Eigen::VectorXd eig = eigenvalues_sym(corr);
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
      // Sample correlation matrices are PSD; tiny negatives are rounding.
      out.push_back(eig(i) < 0.0 && eig(i) > -1e-8 ? 0.0 : eig(i));
    }
  }
  return out;
}

Histogram histogram_density(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw SpecError("histogram: need at least 1 bin");
  if (!(hi > lo)) throw SpecError("histogram: empty domain");
  if (values.empty()) throw DiagnosticsError("histogram: no values");

  Histogram h;
  const double width = (hi - lo) / bins;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.bin_edges.back() = hi;

  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    int idx = static_cast<int>((v - lo) / width);
    if (idx >= bins) idx = bins - 1;  // inclusive upper edge on the last bin
    counts[static_cast<std::size_t>(idx)] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  h.densities.resize(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    h.densities[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)] / (total * width);
  }
  return h;
}

std::vector<ClusterSpectrum> cluster_spectra(const std::vector<Eigen::MatrixXd>& matrices,
                                             const std::vector<int>& labels, int window,
                                             const SpectraOptions& options) {
  if (matrices.size() != labels.size()) throw ShapeError("cluster_spectra: labels mismatch");
  if (matrices.empty()) throw DiagnosticsError("cluster_spectra: no matrices");
  const Eigen::Index n = matrices.front().rows();

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [cluster, idx] : members) {
    if (idx.empty()) throw DiagnosticsError("cluster_spectra: empty cluster");
  }

  const double q = options.q_override > 0.0
                       ? options.q_override
                       : static_cast<double>(window) / static_cast<double>(n);
  const MpParams mp = MpParams::from_ratio(q, options.sigma2);

  std::vector<ClusterSpectrum> out;
  for (const auto& [cluster, idx] : members) {
    ClusterSpectrum cs;
    cs.cluster_id = cluster;
    cs.member_count = static_cast<int>(idx.size());
    cs.mp = mp;

    Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(n, n);
    for (const auto i : idx) {
      const Eigen::VectorXd eig = eigenvalues_sym(matrices[i]);
      const double trace_gap = std::abs(eig.sum() - static_cast<double>(n));
      if (trace_gap > 1e-8) {
        throw NumericError("cluster_spectra: eigenvalue sum deviates from N by " +
                           std::to_string(trace_gap));
      }
      for (Eigen::Index e = 0; e < eig.size(); ++e) {
        double v = eig(e);
        if (v < 0.0) {
          if (v < -1e-8) throw NumericError("cluster_spectra: eigenvalue below -1e-8");
          v = 0.0;
        }
        cs.eigenvalues.push_back(v);
      }
      centroid += matrices[i];
    }
    centroid /= static_cast<double>(idx.size());
    cs.x_bar = mean_offdiag(centroid);

    WishartEnsembleSpec wspec;
    wspec.n = static_cast<int>(n);
    wspec.t = window;
    // A centroid of perfectly (anti)correlated matrices sits on the open
    // bound of the ensemble; benchmark against the nearest valid level.
    const double lower = -1.0 / static_cast<double>(n - 1);
    wspec.x_bar = std::clamp(cs.x_bar, lower + 1e-9, 1.0 - 1e-9);
    wspec.n_samples = options.wishart_samples;
    wspec.seed = derive_seed(options.seed, static_cast<std::uint64_t>(cluster));
    cs.wishart_eigenvalues = wishart_ensemble_spectrum(wspec);

    // Shared axis per cluster: [0, max over empirical, ensemble, and MP edge].
    double hi = mp.lambda_plus;
    for (double v : cs.eigenvalues) hi = std::max(hi, v);
    for (double v : cs.wishart_eigenvalues) hi = std::max(hi, v);

    const int mp_bins =
        static_cast<std::size_t>(cluster) < options.bins_mp.size() && cluster >= 0
            ? options.bins_mp[static_cast<std::size_t>(cluster)]
            : 8;

    cs.empirical = histogram_density(cs.eigenvalues, options.bins_empirical, 0.0, hi);
    cs.wishart = histogram_density(cs.wishart_eigenvalues, options.bins_wishart, 0.0, hi);
    cs.mp_display.bin_edges.resize(static_cast<std::size_t>(mp_bins) + 1);
    cs.mp_display.densities.resize(static_cast<std::size_t>(mp_bins));
    const double width = hi / mp_bins;
    for (int i = 0; i <= mp_bins; ++i) {
      cs.mp_display.bin_edges[static_cast<std::size_t>(i)] = width * i;
    }
    for (int i = 0; i < mp_bins; ++i) {
      const double mass = mp_cdf(width * (i + 1), mp) - mp_cdf(width * i, mp);
      cs.mp_display.densities[static_cast<std::size_t>(i)] = mass / width;
    }
    out.push_back(std::move(cs));
  }
  return out;
}

double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw DiagnosticsError("ks_distance: no samples");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return ks;
}

}  // namespace corrstates
