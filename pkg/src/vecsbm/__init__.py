"""Community detection with vector-valued edge covariates."""

from .errors import ConfigError, InputError, NumericError, PartitionError, VecSbmError
from .metrics import misclustering_rate, nmi, snr_delta2
from .model import CovGraph, ModelParams, Partition, RunTrace, VecSbmConfig, check_assumptions, sample_vecsbm
from .refine import RefineOptions, estimate_params, ir_vec, map_score, map_scores, refine_step
from .spectral import kmeans, spectral_init, top_k_eigenpairs

__all__ = [
    "ConfigError",
    "CovGraph",
    "InputError",
    "ModelParams",
    "NumericError",
    "Partition",
    "PartitionError",
    "RefineOptions",
    "RunTrace",
    "VecSbmConfig",
    "VecSbmError",
    "check_assumptions",
    "estimate_params",
    "ir_vec",
    "kmeans",
    "map_score",
    "map_scores",
    "misclustering_rate",
    "nmi",
    "refine_step",
    "sample_vecsbm",
    "snr_delta2",
    "spectral_init",
    "top_k_eigenpairs",
]
