"""Correlation-regime analysis of regional daily-count panels.

The compiled extension carries the full pipeline: spectral artifact removal,
returns, overlapping-epoch Pearson correlation matrices, k-means over
matrices, and random-matrix-theory benchmarks.
"""

from ._core import (
    ClusteringResult,
    ClusterSpectrum,
    CorrstatesError,
    EpochPlan,
    FilterSpec,
    Histogram,
    MpParams,
    Panel,
    ReturnsPanel,
    StopBand,
    adjusted_rand_index,
    band_stop,
    cluster_spectra,
    compute_returns,
    correlation_series,
    eigenvalues,
    filter_panel,
    frobenius_distance,
    kmeans,
    kmeans_multi,
    load_panel,
    mean_offdiag,
    mp_cdf,
    mp_density,
    pearson_matrix,
    plan_epochs,
    power_spectrum,
    run_pipeline,
    save_panel,
    scan_k,
    silhouette,
    slice_panel,
    synth_panel,
    weekly_artifact_bands,
    wishart_ensemble_spectrum,
)

__all__ = [
    "ClusteringResult",
    "ClusterSpectrum",
    "CorrstatesError",
    "EpochPlan",
    "FilterSpec",
    "Histogram",
    "MpParams",
    "Panel",
    "ReturnsPanel",
    "StopBand",
    "adjusted_rand_index",
    "band_stop",
    "cluster_spectra",
    "compute_returns",
    "correlation_series",
    "eigenvalues",
    "filter_panel",
    "frobenius_distance",
    "kmeans",
    "kmeans_multi",
    "load_panel",
    "mean_offdiag",
    "mp_cdf",
    "mp_density",
    "pearson_matrix",
    "plan_epochs",
    "power_spectrum",
    "run_pipeline",
    "save_panel",
    "scan_k",
    "silhouette",
    "slice_panel",
    "synth_panel",
    "weekly_artifact_bands",
    "wishart_ensemble_spectrum",
]

__version__ = "0.1.0"
