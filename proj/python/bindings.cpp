#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "corrstates/clustering.hpp"
#include "corrstates/errors.hpp"
#include "corrstates/io.hpp"
#include "corrstates/panel.hpp"
#include "corrstates/pipeline.hpp"
#include "corrstates/returns.hpp"
#include "corrstates/rmt.hpp"
#include "corrstates/spectral.hpp"
#include "corrstates/svg.hpp"
#include "corrstates/synth.hpp"

namespace py = pybind11;
using namespace corrstates;

namespace {

std::vector<std::string> iso_dates(const std::vector<DayNumber>& days) {
  std::vector<std::string> out;
  out.reserve(days.size());
  for (const auto d : days) out.push_back(iso_from_day(d));
  return out;
}

PanelLayout layout_from_string(const std::string& name) {
  if (name == "dates_as_rows") return PanelLayout::dates_as_rows;
  if (name == "regions_as_rows") return PanelLayout::regions_as_rows;
  throw ParseError("layout must be dates_as_rows or regions_as_rows");
}

ZeroVariancePolicy policy_from_string(const std::string& name) {
  if (name == "error") return ZeroVariancePolicy::error;
  if (name == "zero_fill") return ZeroVariancePolicy::zero_fill;
  throw ParseError("zero_variance_policy must be error or zero_fill");
}

FilterMode mode_from_string(const std::string& name) {
  if (name == "hard_zero") return FilterMode::hard_zero;
  if (name == "cosine_taper") return FilterMode::cosine_taper;
  throw ParseError("filter mode must be hard_zero or cosine_taper");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "correlation-regime analysis of regional daily-count panels";

  py::register_exception<Error>(m, "CorrstatesError", PyExc_RuntimeError);

  py::class_<TimeSeriesPanel>(m, "Panel")
      .def(py::init([](std::vector<std::string> regions, std::vector<std::string> dates,
                       Eigen::MatrixXd values) {
             TimeSeriesPanel p;
             p.regions = std::move(regions);
             for (const auto& d : dates) p.dates.push_back(day_from_iso(d));
             p.values = std::move(values);
             validate_panel(p, /*require_nonnegative=*/false);
             return p;
           }),
           py::arg("regions"), py::arg("dates"), py::arg("values"))
      .def_readonly("regions", &TimeSeriesPanel::regions)
      .def_property_readonly("dates",
                             [](const TimeSeriesPanel& p) { return iso_dates(p.dates); })
      .def_readonly("values", &TimeSeriesPanel::values)
      .def_property_readonly("n_regions", &TimeSeriesPanel::n_regions)
      .def_property_readonly("n_days", &TimeSeriesPanel::n_days);

  py::class_<ReturnsPanel>(m, "ReturnsPanel")
      .def_readonly("regions", &ReturnsPanel::regions)
      .def_property_readonly("dates",
                             [](const ReturnsPanel& p) { return iso_dates(p.dates); })
      .def_readonly("values", &ReturnsPanel::values);

  m.def(
      "load_panel",
      [](const std::string& path, const std::string& layout,
         std::vector<std::string> skip_columns, bool clip_negative_to_zero) {
        LoadOptions options;
        options.skip_columns = std::move(skip_columns);
        options.clip_negative_to_zero = clip_negative_to_zero;
        return load_panel(path, layout_from_string(layout), options);
      },
      py::arg("path"), py::arg("layout") = "dates_as_rows",
      py::arg("skip_columns") = std::vector<std::string>{},
      py::arg("clip_negative_to_zero") = false);
  m.def("save_panel",
        [](const std::string& path, const TimeSeriesPanel& p) { save_panel(path, p); });
  m.def(
      "slice_panel",
      [](const TimeSeriesPanel& p, const std::string& start, const std::string& end) {
        return slice_panel(p, start, end);
      },
      py::arg("panel"), py::arg("start"), py::arg("end"));

  m.def("power_spectrum", [](const std::vector<double>& series) {
    const auto s = power_spectrum(series);
    return py::make_tuple(s.frequencies, s.power);
  });

  py::class_<StopBand>(m, "StopBand")
      .def(py::init([](double low, double center, double high) {
             return StopBand{center, low, high};
           }),
           py::arg("low"), py::arg("center"), py::arg("high"))
      .def_readonly("center", &StopBand::center)
      .def_readonly("low", &StopBand::low_edge)
      .def_readonly("high", &StopBand::high_edge);

  py::class_<SpectralFilterSpec>(m, "FilterSpec")
      .def(py::init([](std::vector<StopBand> bands, const std::string& mode,
                       double taper_fraction) {
             SpectralFilterSpec spec;
             spec.bands = std::move(bands);
             spec.mode = mode_from_string(mode);
             spec.taper_fraction = taper_fraction;
             validate_filter_spec(spec);
             return spec;
           }),
           py::arg("bands"), py::arg("mode") = "hard_zero", py::arg("taper_fraction") = 0.1)
      .def_readonly("bands", &SpectralFilterSpec::bands);

  m.def("weekly_artifact_bands", &weekly_artifact_bands);
  m.def(
      "band_stop",
      [](const std::vector<double>& series, const SpectralFilterSpec& spec) {
        return band_stop(series, spec);
      },
      py::arg("series"), py::arg("spec"));
  m.def("filter_panel", &filter_panel, py::arg("panel"), py::arg("spec"));

  m.def(
      "compute_returns",
      [](const TimeSeriesPanel& panel, double guard_eps, bool absolute) {
        return compute_returns(panel, {guard_eps, absolute});
      },
      py::arg("panel"), py::arg("guard_eps") = 1e-6, py::arg("absolute") = false);

  py::class_<EpochPlan>(m, "EpochPlan")
      .def_readonly("window", &EpochPlan::window)
      .def_readonly("overlap", &EpochPlan::overlap)
      .def_readonly("stride", &EpochPlan::stride)
      .def_readonly("epoch_starts", &EpochPlan::epoch_starts)
      .def_readonly("epoch_count", &EpochPlan::epoch_count);
  m.def("plan_epochs", &plan_epochs, py::arg("length"), py::arg("window"), py::arg("overlap"));

  m.def(
      "pearson_matrix",
      [](const Eigen::MatrixXd& block, const std::string& policy) {
        return pearson_from_block(block, policy_from_string(policy));
      },
      py::arg("block"), py::arg("zero_variance_policy") = "error",
      "Pearson correlation matrix of an N x W block (rows are series)");
  m.def(
      "correlation_series",
      [](const ReturnsPanel& returns, const EpochPlan& plan, const std::string& policy) {
        const auto series = correlation_series(returns, plan, policy_from_string(policy));
        std::vector<Eigen::MatrixXd> matrices;
        std::vector<int> starts;
        for (const auto& c : series) {
          matrices.push_back(c.entries);
          starts.push_back(c.epoch_start_day);
        }
        return py::make_tuple(matrices, starts);
      },
      py::arg("returns"), py::arg("plan"), py::arg("zero_variance_policy") = "error");

  m.def("frobenius_distance", &frobenius_distance);

  py::class_<ClusteringResult>(m, "ClusteringResult")
      .def_readonly("k", &ClusteringResult::k)
      .def_readonly("centroids", &ClusteringResult::centroids)
      .def_readonly("labels", &ClusteringResult::labels)
      .def_readonly("inertia", &ClusteringResult::inertia)
      .def_readonly("n_iterations", &ClusteringResult::n_iterations)
      .def_readonly("restart_index_of_best", &ClusteringResult::restart_index_of_best)
      .def_readonly("seed", &ClusteringResult::seed);

  m.def(
      "kmeans",
      [](const std::vector<Eigen::MatrixXd>& matrices, int k, std::uint64_t seed, double tol,
         int max_iter) {
        const auto run = kmeans(matrices, k, seed, {max_iter, tol});
        py::dict out;
        out["labels"] = run.labels;
        out["centroids"] = run.centroids;
        out["inertia"] = run.inertia;
        out["n_iterations"] = run.n_iterations;
        out["converged"] = run.converged;
        return out;
      },
      py::arg("matrices"), py::arg("k"), py::arg("seed"), py::arg("tol") = 1e-6,
      py::arg("max_iter") = 300);
  m.def(
      "kmeans_multi",
      [](const std::vector<Eigen::MatrixXd>& matrices, int k, int n_restarts,
         std::uint64_t base_seed, double tol, int max_iter, int n_threads) {
        return kmeans_multi(matrices, k, n_restarts, base_seed, {max_iter, tol}, n_threads);
      },
      py::arg("matrices"), py::arg("k"), py::arg("n_restarts"), py::arg("base_seed"),
      py::arg("tol") = 1e-6, py::arg("max_iter") = 300, py::arg("n_threads") = 0);

  m.def("silhouette", [](const std::vector<Eigen::MatrixXd>& matrices,
                         const std::vector<int>& labels) {
    const auto s = silhouette(matrices, labels);
    return py::make_tuple(s.values, s.mean);
  });
  m.def(
      "scan_k",
      [](const std::vector<Eigen::MatrixXd>& matrices, int k_min, int k_max, int n_restarts,
         std::uint64_t base_seed) {
        py::list out;
        for (const auto& e : scan_k(matrices, k_min, k_max, n_restarts, base_seed)) {
          py::dict d;
          d["k"] = e.k;
          d["best_inertia"] = e.best_inertia;
          d["mean_silhouette"] = e.mean_silhouette;
          d["non_monotonic_warning"] = e.non_monotonic_warning;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("matrices"), py::arg("k_min"), py::arg("k_max"), py::arg("n_restarts"),
      py::arg("base_seed"));
  m.def("adjusted_rand_index", &adjusted_rand_index);

  m.def("eigenvalues", &eigenvalues_sym, "eigenvalues of a symmetric matrix, ascending");
  m.def("mean_offdiag", &mean_offdiag);

  py::class_<MpParams>(m, "MpParams")
      .def_static("from_ratio", &MpParams::from_ratio, py::arg("q"), py::arg("sigma2") = 1.0)
      .def_static("from_geometry", &MpParams::from_geometry, py::arg("samples"),
                  py::arg("variables"), py::arg("sigma2") = 1.0)
      .def_readonly("q", &MpParams::q)
      .def_readonly("sigma2", &MpParams::sigma2)
      .def_readonly("lambda_minus", &MpParams::lambda_minus)
      .def_readonly("lambda_plus", &MpParams::lambda_plus)
      .def_readonly("zero_mass", &MpParams::zero_mass);
  m.def("mp_density", &mp_density, py::arg("lam"), py::arg("params"));
  m.def("mp_cdf", &mp_cdf, py::arg("lam"), py::arg("params"));

  m.def(
      "wishart_ensemble_spectrum",
      [](int n, int t, double x_bar, int n_samples, std::uint64_t seed) {
        return wishart_ensemble_spectrum({n, t, x_bar, n_samples, seed});
      },
      py::arg("n"), py::arg("t"), py::arg("x_bar"), py::arg("n_samples"), py::arg("seed"));

  py::class_<Histogram>(m, "Histogram")
      .def_readonly("bin_edges", &Histogram::bin_edges)
      .def_readonly("densities", &Histogram::densities);
  py::class_<ClusterSpectrum>(m, "ClusterSpectrum")
      .def_readonly("cluster_id", &ClusterSpectrum::cluster_id)
      .def_readonly("member_count", &ClusterSpectrum::member_count)
      .def_readonly("eigenvalues", &ClusterSpectrum::eigenvalues)
      .def_readonly("empirical", &ClusterSpectrum::empirical)
      .def_readonly("mp", &ClusterSpectrum::mp)
      .def_readonly("mp_display", &ClusterSpectrum::mp_display)
      .def_readonly("x_bar", &ClusterSpectrum::x_bar)
      .def_readonly("wishart", &ClusterSpectrum::wishart);
  m.def(
      "cluster_spectra",
      [](const std::vector<Eigen::MatrixXd>& matrices, const std::vector<int>& labels,
         int window, int bins_empirical, int bins_wishart, std::vector<int> bins_mp,
         int wishart_samples, std::uint64_t seed, double q_override, double sigma2) {
        SpectraOptions options;
        options.bins_empirical = bins_empirical;
        options.bins_wishart = bins_wishart;
        options.bins_mp = std::move(bins_mp);
        options.wishart_samples = wishart_samples;
        options.seed = seed;
        options.q_override = q_override;
        options.sigma2 = sigma2;
        return cluster_spectra(matrices, labels, window, options);
      },
      py::arg("matrices"), py::arg("labels"), py::arg("window"),
      py::arg("bins_empirical") = 32, py::arg("bins_wishart") = 24,
      py::arg("bins_mp") = std::vector<int>{17, 8, 8, 5}, py::arg("wishart_samples") = 2000,
      py::arg("seed") = 0, py::arg("q_override") = 0.0, py::arg("sigma2") = 1.0);

  m.def(
      "synth_panel",
      [](int regions, int days, std::uint64_t seed) {
        SynthConfig config;
        config.regions = regions;
        config.days = days;
        config.seed = seed;
        return synth_panel(config);
      },
      py::arg("regions") = 32, py::arg("days") = 1021, py::arg("seed") = 1);

  m.def(
      "run_pipeline",
      [](const py::dict& config_dict, const std::string& config_file) {
        PipelineConfig config;
        if (!config_file.empty()) config = PipelineConfig::from_file(config_file);
        for (const auto& item : config_dict) {
          config.set(py::cast<std::string>(item.first), py::cast<std::string>(py::str(item.second)));
        }
        const auto manifest = run_pipeline(config);
        py::dict out;
        out["out"] = manifest.config.out;
        out["seed"] = manifest.seed;
        py::list stage_names;
        for (const auto& s : manifest.stages) stage_names.append(s.name);
        out["stages"] = std::move(stage_names);
        return out;
      },
      py::arg("config") = py::dict(), py::arg("config_file") = "");
}
