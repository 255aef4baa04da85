"""One-vs-rest ridge regression over genetic, areal, and implicational
prior distributions.

For a target feature, every candidate value gets a +/-1 ridge regressor
whose inputs are sparse blocks of empirical probabilities: the target's
value distribution within the language's genus and family, within a
geographic radius, and conditional on each of the language's observed
feature values, plus plain indicator one-hots of those observed values.
Training rows exclude the row language's own target observation from
every distribution (leave-one-out), so a language never predicts itself
from itself.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..geo import GeoPoint, haversine_km
from ..kb import Dataset, Language
from .base import Imputer, ImputerQuery, NoPredictionError, Prediction

__all__ = [
    "solve_ridge",
    "PriorFeatureSpace",
    "build_prior_features",
    "RidgePriorImputer",
    "ALL_BLOCKS",
]

ALL_BLOCKS = ("genetic", "areal", "implicational", "indicators")


def solve_ridge(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    fit_intercept: bool = True,
) -> tuple[np.ndarray, float]:
    """Minimize ||Xw + b - y||^2 + lam*||w||^2 with an unpenalized bias.

    Solved exactly via the centered normal equations; when the feature
    dimension exceeds the row count the equivalent dual system is used
    instead.  Returns (w, b); b is 0.0 when fit_intercept is false.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("need at least one row and one column")
    if lam <= 0:
        raise ValueError("lam must be positive")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in ridge inputs")

    n, d = X.shape
    if fit_intercept:
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc = X - x_mean
        yc = y - y_mean
    else:
        x_mean = np.zeros(d)
        y_mean = 0.0
        Xc = X
        yc = y

    if d <= n:
        gram = Xc.T @ Xc
        gram[np.diag_indices_from(gram)] += lam
        w = np.linalg.solve(gram, Xc.T @ yc)
    else:
        outer = Xc @ Xc.T
        outer[np.diag_indices_from(outer)] += lam
        w = Xc.T @ np.linalg.solve(outer, yc)

    b = y_mean - float(x_mean @ w) if fit_intercept else 0.0
    return w, b


@dataclass
class _PriorStats:
    """Counting tables over the statistics languages (train, optionally
    plus the observed cells of an evaluation set)."""

    languages: list[Language]
    observed: dict[str, dict[str, str]]  # code -> feature -> value
    genus: dict[tuple[str, str], Counter]  # (genus, feature) -> value counts
    family: dict[tuple[str, str], Counter]
    joint: dict[tuple[str, str], Counter]  # (A, B) -> (a, b) counts
    support: Counter  # (A, B) -> co-observing language count
    neighbors: dict[str, set[str]]  # code -> codes within areal_km (self excluded)
    areal_km: float


def _build_stats(sources: Sequence[Dataset], areal_km: float) -> _PriorStats:
    languages: list[Language] = []
    observed: dict[str, dict[str, str]] = {}
    for d in sources:
        for lang in d.languages:
            if lang.code in observed:
                continue
            languages.append(lang)
            observed[lang.code] = d.observed_of(lang.code)

    genus: dict[tuple[str, str], Counter] = {}
    family: dict[tuple[str, str], Counter] = {}
    joint: dict[tuple[str, str], Counter] = {}
    support: Counter = Counter()
    for lang in languages:
        obs = observed[lang.code]
        for feature, value in obs.items():
            genus.setdefault((lang.genus, feature), Counter())[value] += 1
            family.setdefault((lang.family, feature), Counter())[value] += 1
        feats = sorted(obs)
        for fa in feats:
            for fb in feats:
                if fa != fb:
                    joint.setdefault((fa, fb), Counter())[(obs[fa], obs[fb])] += 1
                    support[(fa, fb)] += 1

    neighbors = _neighbor_sets(languages, areal_km)
    return _PriorStats(languages, observed, genus, family, joint, support, neighbors, areal_km)


def _neighbor_sets(languages: Sequence[Language], radius_km: float) -> dict[str, set[str]]:
    """Pairwise radius membership, vectorized; self is never a neighbor."""
    n = len(languages)
    out: dict[str, set[str]] = {lang.code: set() for lang in languages}
    if n < 2:
        return out
    lat = np.radians(np.array([lang.latitude for lang in languages]))
    lon = np.radians(np.array([lang.longitude for lang in languages]))
    sin_dlat = np.sin((lat[:, None] - lat[None, :]) / 2.0)
    sin_dlon = np.sin((lon[:, None] - lon[None, :]) / 2.0)
    h = sin_dlat**2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * sin_dlon**2
    dist = 2.0 * 6371.0088 * np.arcsin(np.sqrt(np.minimum(1.0, h)))
    within = dist <= radius_km
    codes = [lang.code for lang in languages]
    for i in range(n):
        for j in range(n):
            if i != j and within[i, j]:
                out[codes[i]].add(codes[j])
    return out


class PriorFeatureSpace:
    """Deterministic index space of the prior blocks for one target.

    Keys are tuples: ("genus", v), ("family", v), ("areal", v),
    ("impl", A, a, v), and ("obs", A, a); their order fixes the column
    order of the design matrix.
    """

    def __init__(
        self,
        stats: _PriorStats,
        target: str,
        inventory: Sequence[str],
        inventories: Mapping[str, Sequence[str]],
        min_support: int = 5,
        blocks: Sequence[str] = ALL_BLOCKS,
    ):
        self.stats = stats
        self.target = target
        self.inventory = tuple(inventory)
        self.min_support = min_support
        self.blocks = tuple(blocks)

        keys: list[tuple] = []
        if "genetic" in self.blocks:
            keys += [("genus", v) for v in self.inventory]
            keys += [("family", v) for v in self.inventory]
        if "areal" in self.blocks:
            keys += [("areal", v) for v in self.inventory]
        others = sorted(f for f in inventories if f != target)
        if "implicational" in self.blocks:
            for feat in others:
                if stats.support[(feat, target)] >= min_support:
                    for a in inventories[feat]:
                        keys += [("impl", feat, a, v) for v in self.inventory]
        if "indicators" in self.blocks:
            for feat in others:
                keys += [("obs", feat, a) for a in inventories[feat]]
        self.keys = tuple(keys)
        self._index = {key: i for i, key in enumerate(keys)}

    def __len__(self) -> int:
        return len(self.keys)

    def _conditional(
        self, counts: Optional[Counter], exclude_value: Optional[str]
    ) -> Optional[dict[str, float]]:
        """Distribution from a count table, optionally dropping one
        observation (leave-one-out); None when nothing remains."""
        if not counts:
            return None
        if exclude_value is not None:
            counts = Counter(counts)
            counts[exclude_value] -= 1
        total = sum(counts.values())
        if total <= 0:
            return None
        return {v: counts[v] / total for v in self.inventory if counts[v] > 0}

    def sparse(
        self,
        language: Language,
        observed: Mapping[str, str],
        own_value: Optional[str] = None,
    ) -> dict[tuple, float]:
        """Sparse prior vector for one language.

        ``own_value`` is the language's own target observation to leave
        out of every distribution (training rows); pass None for
        queries.  Blocks that have no supporting data are simply absent.
        """
        stats = self.stats
        out: dict[tuple, float] = {}

        def put(prefix: tuple, dist: Optional[dict[str, float]]):
            if dist:
                for v, p in dist.items():
                    key = prefix + (v,)
                    if key in self._index:
                        out[key] = p

        if "genetic" in self.blocks:
            put(("genus",), self._conditional(
                stats.genus.get((language.genus, self.target)), own_value))
            put(("family",), self._conditional(
                stats.family.get((language.family, self.target)), own_value))

        if "areal" in self.blocks:
            neighbor_codes = stats.neighbors.get(language.code)
            if neighbor_codes is None:
                neighbor_codes = self._query_neighbors(language)
            counts = Counter()
            for code in neighbor_codes:
                value = stats.observed[code].get(self.target)
                if value is not None:
                    counts[value] += 1
            put(("areal",), self._conditional(counts, None))

        if "implicational" in self.blocks:
            for feat, a in sorted(observed.items()):
                if stats.support[(feat, self.target)] < self.min_support:
                    continue
                joint = stats.joint.get((feat, self.target), Counter())
                counts = Counter()
                for (ja, jb), n in joint.items():
                    if ja == a:
                        counts[jb] += n
                dist = self._conditional(counts, own_value if counts else None)
                if dist:
                    for v, p in dist.items():
                        key = ("impl", feat, a, v)
                        if key in self._index:
                            out[key] = p

        if "indicators" in self.blocks:
            for feat, a in observed.items():
                key = ("obs", feat, a)
                if key in self._index:
                    out[key] = 1.0

        return out

    def _query_neighbors(self, language: Language) -> set[str]:
        here = GeoPoint(language.latitude, language.longitude)
        result = set()
        for lang in self.stats.languages:
            if lang.code == language.code:
                continue
            there = GeoPoint(lang.latitude, lang.longitude)
            if haversine_km(here, there) <= self.stats.areal_km:
                result.add(lang.code)
        return result

    def dense(
        self,
        language: Language,
        observed: Mapping[str, str],
        own_value: Optional[str] = None,
    ) -> np.ndarray:
        vec = np.zeros(len(self.keys))
        for key, value in self.sparse(language, observed, own_value).items():
            vec[self._index[key]] = value
        return vec


def build_prior_features(
    train: Dataset,
    language: Language,
    observed: Mapping[str, str],
    target: str,
    areal_km: float = 2500.0,
    min_support: int = 5,
    blocks: Sequence[str] = ALL_BLOCKS,
) -> dict[tuple, float]:
    """Sparse prior vector for one query against a training dataset.

    Convenience wrapper that builds the counting tables and index space
    for a single call; fit a RidgePriorImputer to reuse them.
    """
    stats = _build_stats([train], areal_km)
    inventories = {f: train.catalog.values(f) for f in train.catalog.features()}
    space = PriorFeatureSpace(
        stats, target, inventories.get(target, ()), inventories, min_support, blocks
    )
    return space.sparse(language, observed)


@dataclass
class _FittedFeature:
    space: PriorFeatureSpace
    values: tuple[str, ...]
    weights: np.ndarray  # one row per value
    biases: np.ndarray


class RidgePriorImputer(Imputer):
    """One-vs-rest ridge over the prior feature blocks.

    ``use_context=True`` folds the observed cells of the evaluation set
    passed as ``context`` into the counting tables (the regressors are
    still trained on training rows only).  ``blocks`` restricts which
    prior blocks are used; indicators-only approximates a plain
    per-feature linear classifier over observed values.
    """

    name = "ridge"

    def __init__(
        self,
        lam: float = 1.0,
        areal_km: float = 2500.0,
        min_support: int = 5,
        blocks: Sequence[str] = ALL_BLOCKS,
        use_context: bool = False,
    ):
        unknown = set(blocks) - set(ALL_BLOCKS)
        if unknown:
            raise ValueError(f"unknown prior blocks: {sorted(unknown)}")
        self.lam = lam
        self.areal_km = areal_km
        self.min_support = min_support
        self.blocks = tuple(blocks)
        self.use_context = use_context
        self._fitted: dict[str, _FittedFeature] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "RidgePriorImputer":
        sources = [train]
        if self.use_context and context is not None:
            sources.append(context)
        stats = _build_stats(sources, self.areal_km)
        inventories = {f: train.catalog.values(f) for f in train.catalog.features()}

        self._fitted = {}
        for target, inventory in inventories.items():
            if not inventory:
                continue
            space = PriorFeatureSpace(
                stats, target, inventory, inventories, self.min_support, self.blocks
            )
            rows = [
                lang
                for lang in train.languages
                if target in stats.observed[lang.code]
            ]
            values = tuple(inventory)
            if len(values) == 1 or len(space) == 0:
                weights = np.zeros((len(values), len(space)))
                biases = np.zeros(len(values))
                self._fitted[target] = _FittedFeature(space, values, weights, biases)
                continue
            X = np.vstack(
                [
                    space.dense(
                        lang,
                        {
                            f: v
                            for f, v in stats.observed[lang.code].items()
                            if f != target
                        },
                        own_value=stats.observed[lang.code][target],
                    )
                    for lang in rows
                ]
            )
            weights = np.zeros((len(values), len(space)))
            biases = np.zeros(len(values))
            for i, value in enumerate(values):
                y = np.array(
                    [1.0 if stats.observed[lang.code][target] == value else -1.0 for lang in rows]
                )
                w, b = solve_ridge(X, y, self.lam)
                weights[i] = w
                biases[i] = b
            self._fitted[target] = _FittedFeature(space, values, weights, biases)
        return self

    def scores(self, query: ImputerQuery) -> dict[str, float] | None:
        fitted = self._fitted.get(query.target)
        if fitted is None:
            return None
        x = fitted.space.dense(query.language, query.observed)
        raw = fitted.weights @ x + fitted.biases
        return dict(zip(fitted.values, raw.tolist()))

    def predict(self, query: ImputerQuery) -> Prediction:
        scores = self.scores(query)
        if scores is None:
            raise NoPredictionError(f"unknown feature {query.target!r}")
        value = min(scores, key=lambda v: (-scores[v], v))
        raw = np.array([scores[v] for v in sorted(scores)])
        shifted = np.exp(raw - raw.max())
        confidence = float(shifted[sorted(scores).index(value)] / shifted.sum())
        source = "ridge" if len(scores) > 1 else "ridge-constant"
        return Prediction(value, confidence, source=source)
