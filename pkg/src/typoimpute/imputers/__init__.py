"""Imputation systems for filling unknown feature values."""

from .base import (
    Imputer,
    ImputerQuery,
    NoPredictionError,
    Prediction,
    fill_dataset,
    mode_with_confidence,
)
from .config import KNOWN_KEYS, METHODS, build_imputer
from .correlation import CorrelationImputer
from .ensemble import POLICIES, EnsembleImputer
from .frequency import (
    GenusFamilyBackoffImputer,
    GeoBackoffImputer,
    GlobalFrequencyImputer,
)
from .knn import NearestNeighborImputer, load_language_vectors
from .ridge import (
    ALL_BLOCKS,
    PriorFeatureSpace,
    RidgePriorImputer,
    build_prior_features,
    solve_ridge,
)

__all__ = [
    "Imputer",
    "ImputerQuery",
    "NoPredictionError",
    "Prediction",
    "fill_dataset",
    "mode_with_confidence",
    "KNOWN_KEYS",
    "METHODS",
    "build_imputer",
    "CorrelationImputer",
    "POLICIES",
    "EnsembleImputer",
    "GenusFamilyBackoffImputer",
    "GeoBackoffImputer",
    "GlobalFrequencyImputer",
    "NearestNeighborImputer",
    "load_language_vectors",
    "ALL_BLOCKS",
    "PriorFeatureSpace",
    "RidgePriorImputer",
    "build_prior_features",
    "solve_ridge",
]
