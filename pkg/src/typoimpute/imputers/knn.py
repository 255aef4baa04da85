"""Nearest-neighbor imputation over language representations.

With a vector file (one language per line, ``code<TAB>v1<TAB>...``),
neighbors are ranked by cosine distance between vectors.  Without one,
languages are compared by agreement over their shared observed features
(1 - matching/shared); languages sharing no features rank last, and
geographic distance breaks ties.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Mapping

import numpy as np

from ..geo import GeoPoint, haversine_km
from ..kb import Dataset, DatasetError
from .base import Imputer, ImputerQuery, NoPredictionError, Prediction, mode_with_confidence

__all__ = ["NearestNeighborImputer", "load_language_vectors"]


def load_language_vectors(path: str | Path) -> dict[str, np.ndarray]:
    """Read a tab-separated language-vector file.

    Every line is a code followed by the vector components; all vectors
    in one file must share a dimension.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise DatasetError(f"vector file line {lineno}: expected code and components")
        code = fields[0].strip()
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=float)
        except ValueError:
            raise DatasetError(f"vector file line {lineno}: non-numeric component") from None
        if dim is None:
            dim = vec.size
        elif vec.size != dim:
            raise DatasetError(
                f"vector file line {lineno}: dimension {vec.size} != {dim}"
            )
        if code in vectors:
            raise DatasetError(f"vector file line {lineno}: duplicate code {code!r}")
        vectors[code] = vec
    return vectors


def _cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 2.0  # maximal cosine distance; degenerate vector
    return 1.0 - float(np.dot(a, b)) / (na * nb)


class NearestNeighborImputer(Imputer):
    """k-nearest-neighbor vote among training languages with the target."""

    name = "knn"

    def __init__(self, k: int = 1, vectors: Mapping[str, np.ndarray] | None = None):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.vectors = dict(vectors) if vectors else None
        self._languages = []
        self._observed: dict[str, dict[str, str]] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "NearestNeighborImputer":
        self._languages = list(train.languages)
        self._observed = {lang.code: train.observed_of(lang.code) for lang in train.languages}
        return self

    def _vector_key(self, query: ImputerQuery, candidate) -> tuple:
        qvec = self.vectors[query.language.code]
        cvec = self.vectors.get(candidate.code)
        if cvec is None:
            return (1, 0.0, candidate.code)  # no vector: after all ranked ones
        return (0, _cosine_distance(qvec, cvec), candidate.code)

    def _agreement_key(self, query: ImputerQuery, candidate) -> tuple:
        observed = self._observed[candidate.code]
        shared = [f for f in query.observed if f in observed]
        geo = haversine_km(
            GeoPoint(query.language.latitude, query.language.longitude),
            GeoPoint(candidate.latitude, candidate.longitude),
        )
        if not shared:
            return (1, 0.0, geo, candidate.code)
        matching = sum(1 for f in shared if query.observed[f] == observed[f])
        return (0, 1.0 - matching / len(shared), geo, candidate.code)

    def predict(self, query: ImputerQuery) -> Prediction:
        candidates = [
            lang
            for lang in self._languages
            if lang.code != query.language.code
            and query.target in self._observed[lang.code]
        ]
        if not candidates:
            raise NoPredictionError(f"no training language observes {query.target!r}")

        use_vectors = self.vectors is not None and query.language.code in self.vectors
        if use_vectors:
            candidates.sort(key=lambda c: self._vector_key(query, c))
            source = "knn-vector"
        else:
            candidates.sort(key=lambda c: self._agreement_key(query, c))
            source = "knn-agreement"

        taken = candidates[: self.k]
        votes = Counter(self._observed[c.code][query.target] for c in taken)
        value, share = mode_with_confidence(votes)
        return Prediction(value, share, source=source)
