from .ecg import RrSeries, detect_rpeaks, filter_artifacts
from .features import (
    HrvFeatures,
    NormalizationParams,
    compute_features,
    fit_baseline,
    normalize,
)
from .svm import SvmModel, load_model, save_model, svm_predict, svm_train

__all__ = [
    "RrSeries",
    "detect_rpeaks",
    "filter_artifacts",
    "HrvFeatures",
    "NormalizationParams",
    "compute_features",
    "fit_baseline",
    "normalize",
    "SvmModel",
    "svm_predict",
    "svm_train",
    "load_model",
    "save_model",
]
