"""Air-quality forecasting: wavelet denoising, feature ranking, bucket SVM."""

from .aqi import (
    AqiConfig,
    BucketLabel,
    bucket_of_score,
    compute_aqi,
    normalize_aqi,
)
from .errors import AqicastError
from .evaluate import (
    EvalReport,
    accuracy,
    build_report,
    confusion_matrix,
    error_rate,
    forecast_time,
    measure_per_sample_ms,
)
from .feature_select import (
    CorrelationFeatureSelector,
    FeatureRanking,
    GradientLinearRegression,
    RegressionFit,
    SelectConfig,
    correlation_scores,
    fit_linear_regression,
    rank_features,
    regression_gradient,
    select_features,
)
from .ingest import (
    ImputePolicy,
    Reading,
    SeriesFrame,
    SinusoidSpec,
    generate_synthetic,
    impute,
    parse_csv,
    parse_csv_report,
)
from .pipeline import PipelineConfig, run_pipeline, run_stage, split_counts
from .preprocess import WaveletDenoiser, WindowSet, make_windows, preprocess_frame
from .svm import (
    MulticlassLinearSvm,
    SvmHyper,
    SvmModel,
    load_model,
    predict,
    predict_batch,
    save_model,
    train_svm,
)
from .wavelet import (
    CoeffPyramid,
    DenoiseConfig,
    denoise_series,
    dwt_decompose,
    dwt_reconstruct,
    max_decomposition_levels,
    threshold_coeffs,
)

__version__ = "0.1.0"

__all__ = [
    "AqiConfig",
    "AqicastError",
    "BucketLabel",
    "CoeffPyramid",
    "CorrelationFeatureSelector",
    "DenoiseConfig",
    "EvalReport",
    "FeatureRanking",
    "GradientLinearRegression",
    "ImputePolicy",
    "MulticlassLinearSvm",
    "PipelineConfig",
    "Reading",
    "RegressionFit",
    "SelectConfig",
    "SeriesFrame",
    "SinusoidSpec",
    "SvmHyper",
    "SvmModel",
    "WaveletDenoiser",
    "WindowSet",
    "accuracy",
    "bucket_of_score",
    "build_report",
    "compute_aqi",
    "confusion_matrix",
    "correlation_scores",
    "denoise_series",
    "dwt_decompose",
    "dwt_reconstruct",
    "error_rate",
    "fit_linear_regression",
    "forecast_time",
    "generate_synthetic",
    "impute",
    "load_model",
    "make_windows",
    "max_decomposition_levels",
    "measure_per_sample_ms",
    "normalize_aqi",
    "parse_csv",
    "parse_csv_report",
    "predict",
    "predict_batch",
    "preprocess_frame",
    "rank_features",
    "regression_gradient",
    "run_pipeline",
    "run_stage",
    "save_model",
    "select_features",
    "split_counts",
    "threshold_coeffs",
    "train_svm",
]
