"""Imputation from cross-feature correlations within languages.

Typological features are heavily inter-dependent (verb-object order
predicts adposition order, and so on), so an unobserved feature can be
voted on by every feature the language does have.  Each observed
feature A=a contributes its smoothed conditional distribution over the
target's values, weighted by how informative A is about the target
(normalized mutual information over co-observing languages).  Pairs
with too few co-observations are ignored.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..kb import OBSERVED, Dataset
from .base import Imputer, ImputerQuery, NoPredictionError, Prediction

__all__ = ["CorrelationImputer"]


@dataclass
class _PairStats:
    """Counts over languages observing both features of an ordered pair."""

    joint: Counter  # (a, b) -> count
    marginal_a: Counter  # a -> count
    support: int  # number of co-observing languages
    weight: float  # normalized mutual information in [0, 1]


def _entropy(counts: Counter, total: int) -> float:
    h = 0.0
    for n in counts.values():
        if n > 0:
            p = n / total
            h -= p * math.log(p)
    return h


def _normalized_mi(joint: Counter, total: int) -> float:
    """Mutual information normalized by the geometric mean of the
    marginal entropies; zero when either feature is constant."""
    marg_a = Counter()
    marg_b = Counter()
    for (a, b), n in joint.items():
        marg_a[a] += n
        marg_b[b] += n
    ha = _entropy(marg_a, total)
    hb = _entropy(marg_b, total)
    if ha <= 0.0 or hb <= 0.0:
        return 0.0
    mi = 0.0
    for (a, b), n in joint.items():
        if n > 0:
            p = n / total
            mi += p * math.log(p * total * total / (marg_a[a] * marg_b[b]))
    mi = max(0.0, mi)  # clamp float noise
    return min(1.0, mi / math.sqrt(ha * hb))


class CorrelationImputer(Imputer):
    """Weighted conditional-probability vote over observed features."""

    name = "correlation"

    def __init__(self, alpha: float = 1.0, min_support: int = 5):
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        self.alpha = alpha
        self.min_support = min_support
        self._pairs: dict[tuple[str, str], _PairStats] = {}
        self._inventory: dict[str, tuple[str, ...]] = {}

    def fit(self, train: Dataset, context: Dataset | None = None) -> "CorrelationImputer":
        self._inventory = {f: train.catalog.values(f) for f in train.catalog.features()}

        joint: dict[tuple[str, str], Counter] = {}
        support: Counter = Counter()
        for lang in train.languages:
            observed = train.observed_of(lang.code)
            feats = sorted(observed)
            for fa in feats:
                for fb in feats:
                    if fa == fb:
                        continue
                    joint.setdefault((fa, fb), Counter())[(observed[fa], observed[fb])] += 1
                    support[(fa, fb)] += 1

        self._pairs = {}
        for pair, j in joint.items():
            total = support[pair]
            marg = Counter()
            for (a, _), n in j.items():
                marg[a] += n
            self._pairs[pair] = _PairStats(
                joint=j,
                marginal_a=marg,
                support=total,
                weight=_normalized_mi(j, total),
            )
        return self

    def scores(self, query: ImputerQuery) -> dict[str, float] | None:
        """Per-value vote totals for the target, or None when no observed
        feature has enough co-observation support."""
        inventory = self._inventory.get(query.target)
        if not inventory:
            return None
        any_support = False
        totals = {b: 0.0 for b in inventory}
        for fa, a in sorted(query.observed.items()):
            stats = self._pairs.get((fa, query.target))
            if stats is None or stats.support < self.min_support:
                continue
            any_support = True
            denom = stats.marginal_a[a] + self.alpha * len(inventory)
            if denom <= 0:
                continue
            for b in inventory:
                p = (stats.joint[(a, b)] + self.alpha) / denom
                totals[b] += stats.weight * p
        if not any_support:
            return None
        return totals

    def predict(self, query: ImputerQuery) -> Prediction:
        totals = self.scores(query)
        if totals is None:
            raise NoPredictionError(
                f"no observed feature supports predicting {query.target!r}"
            )
        value = min(totals, key=lambda b: (-totals[b], b))
        total_mass = sum(totals.values())
        if total_mass > 0:
            confidence = totals[value] / total_mass
        else:
            confidence = 1.0 / len(totals)
        return Prediction(value, confidence, source="correlation")
