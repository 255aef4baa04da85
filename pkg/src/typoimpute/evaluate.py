"""Scoring imputation systems against gold values.

The headline number is genus-macro accuracy: per-language accuracy over
hidden cells, averaged within each genus, then averaged across genera.
This keeps large families from dominating the score.  Hidden cells a
system failed to fill count as wrong unless scoring is asked to exclude
them.  Statistical comparisons between systems use a paired permutation
test on per-language accuracies weighted the same way.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import t as student_t

from .imputers.base import Prediction
from .kb import OBSERVED, Dataset

__all__ = [
    "EvaluationError",
    "UndefinedCorrelationError",
    "SystemOutput",
    "EvalReport",
    "PermutationResult",
    "CorrelationResult",
    "output_from_predictions",
    "output_from_dataset",
    "score",
    "genus_weights",
    "paired_permutation_test",
    "pearson",
    "blanking_ratio_correlation",
    "meta_correlation",
    "feature_accuracy_table",
    "genus_breakdown",
]

log = logging.getLogger(__name__)


class EvaluationError(ValueError):
    """Raised when inputs cannot be scored."""


class UndefinedCorrelationError(EvaluationError):
    """Raised when a correlation has no defined value (constant axis or
    too few points)."""


@dataclass(frozen=True)
class SystemOutput:
    """A named set of predicted values keyed by (language code, feature)."""

    name: str
    predictions: Mapping[tuple[str, str], str]


def output_from_predictions(
    name: str, predictions: Mapping[tuple[str, str], Prediction]
) -> SystemOutput:
    return SystemOutput(name, {key: pred.value for key, pred in predictions.items()})


def output_from_dataset(name: str, filled: Dataset, reference: Dataset) -> SystemOutput:
    """Read predictions out of a filled copy of ``reference``.

    A prediction is any cell observed in ``filled`` whose counterpart in
    ``reference`` is hidden (blanked or unknown).  Cells the filled copy
    left unknown stay missing.
    """
    predictions: dict[tuple[str, str], str] = {}
    for (code, feature), cell in filled.cells.items():
        if cell.state != OBSERVED:
            continue
        ref = reference.cells.get((code, feature))
        if ref is not None and ref.state != OBSERVED:
            predictions[(code, feature)] = cell.value
    return SystemOutput(name, predictions)


@dataclass
class EvalReport:
    """Per-system scores over one gold dataset."""

    system: str
    per_language: dict[str, float]
    language_genus: dict[str, str]
    language_ratio: dict[str, float]
    per_genus: dict[str, float]
    macro_accuracy: float
    micro_accuracy: float
    per_feature: dict[str, tuple[int, int]]  # feature -> (correct, scored)
    n_blanked: int
    n_missing: int
    n_correct: int
    exclude_missing: bool = False

    def feature_accuracy(self, feature: str) -> float:
        correct, total = self.per_feature[feature]
        return correct / total


def _gold_cells(gold: Dataset) -> dict[str, dict[str, str]]:
    by_language: dict[str, dict[str, str]] = {}
    for lang in gold.languages:
        blanked = gold.blanked_of(lang.code)
        if blanked:
            by_language[lang.code] = blanked
    return by_language


def score(gold: Dataset, output: SystemOutput, exclude_missing: bool = False) -> EvalReport:
    """Score one system against the blanked cells of ``gold``.

    Hidden cells without a prediction count as wrong; with
    ``exclude_missing`` they are dropped from every denominator instead
    (a language whose hidden cells are all missing is then dropped
    entirely).  Predictions for cells that are not blanked are ignored
    with a warning.
    """
    eval_cells = _gold_cells(gold)
    if not eval_cells:
        raise EvaluationError("gold dataset has no blanked cells to score")
    known = {
        (code, feature) for code, features in eval_cells.items() for feature in features
    }
    extra = sorted(set(output.predictions) - known)
    if extra:
        shown = ", ".join(f"{code}:{feature}" for code, feature in extra[:3])
        more = ", ..." if len(extra) > 3 else ""
        log.warning(
            "system %s predicts %d non-blanked cells (%s%s); ignored",
            output.name,
            len(extra),
            shown,
            more,
        )

    per_language: dict[str, float] = {}
    language_genus: dict[str, str] = {}
    language_ratio: dict[str, float] = {}
    per_feature_counts: dict[str, list[int]] = {}
    n_blanked = n_missing = n_correct = 0

    for lang in gold.languages:
        features = eval_cells.get(lang.code)
        if not features:
            continue
        correct = missing = 0
        for feature in sorted(features):
            n_blanked += 1
            predicted = output.predictions.get((lang.code, feature))
            if predicted is None:
                missing += 1
                n_missing += 1
                if exclude_missing:
                    continue
            counts = per_feature_counts.setdefault(feature, [0, 0])
            counts[1] += 1
            if predicted == features[feature]:
                counts[0] += 1
                correct += 1
                n_correct += 1
        scored = len(features) - missing if exclude_missing else len(features)
        if scored == 0:
            continue
        per_language[lang.code] = correct / scored
        language_genus[lang.code] = lang.genus
        n_observed = len(gold.observed_of(lang.code))
        language_ratio[lang.code] = len(features) / (len(features) + n_observed)

    if not per_language:
        raise EvaluationError("no language has a scored cell")

    genus_values: dict[str, list[float]] = {}
    for code in sorted(per_language):
        genus_values.setdefault(language_genus[code], []).append(per_language[code])
    per_genus = {
        genus: sum(values) / len(values) for genus, values in sorted(genus_values.items())
    }
    macro = sum(per_genus.values()) / len(per_genus)
    total_scored = sum(total for _, total in per_feature_counts.values())
    micro = n_correct / total_scored

    return EvalReport(
        system=output.name,
        per_language=per_language,
        language_genus=language_genus,
        language_ratio=language_ratio,
        per_genus=per_genus,
        macro_accuracy=macro,
        micro_accuracy=micro,
        per_feature={f: (c, t) for f, (c, t) in sorted(per_feature_counts.items())},
        n_blanked=n_blanked,
        n_missing=n_missing,
        n_correct=n_correct,
        exclude_missing=exclude_missing,
    )


def genus_weights(language_genus: Mapping[str, str]) -> dict[str, float]:
    """Per-language weights that make the weighted sum of language
    accuracies equal the genus-macro average."""
    sizes: dict[str, int] = {}
    for genus in language_genus.values():
        sizes[genus] = sizes.get(genus, 0) + 1
    n_genera = len(sizes)
    return {
        code: 1.0 / (n_genera * sizes[genus])
        for code, genus in sorted(language_genus.items())
    }


@dataclass(frozen=True)
class PermutationResult:
    system_a: str
    system_b: str
    observed_diff: float
    p_value: float
    samples: int
    seed: int
    n_languages: int


def paired_permutation_test(
    a: EvalReport,
    b: EvalReport,
    samples: int = 5000,
    seed: int = 0,
) -> PermutationResult:
    """Two-sided paired permutation test on the genus-macro difference.

    Each sample swaps the two systems' predictions for a language with
    probability one half and recomputes |macro(a) - macro(b)|.  Because
    the macro average is a fixed weighted sum of per-language
    accuracies, a swap is a sign flip of that language's accuracy
    difference.  The p-value uses the add-one estimate
    (1 + hits) / (1 + samples), so it is never zero.
    """
    if samples < 1:
        raise EvaluationError("samples must be positive")
    codes = sorted(set(a.per_language) & set(b.per_language))
    if not codes:
        raise EvaluationError("no common languages to compare")
    weights_map = genus_weights({code: a.language_genus[code] for code in codes})
    weights = np.array([weights_map[code] for code in codes])
    diffs = np.array([a.per_language[code] - b.per_language[code] for code in codes])
    weighted = weights * diffs
    observed = abs(float(weighted.sum()))

    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(samples, len(codes))) * 2 - 1
    stats = np.abs(signs @ weighted)
    # tolerance so sign flips that land exactly on the observed value
    # count as extreme despite float noise
    hits = int((stats >= observed - 1e-12).sum())
    p = (1 + hits) / (1 + samples)
    return PermutationResult(a.system, b.system, observed, p, samples, seed, len(codes))


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int


def _pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    xd = x - x.mean()
    yd = y - y.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise UndefinedCorrelationError("an axis is constant")
    r = float(xd @ yd) / denom
    return max(-1.0, min(1.0, r))


def _t_approx_p(r: float, n: int) -> float:
    if abs(r) == 1.0:
        return 0.0
    tstat = r * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * float(student_t.sf(abs(tstat), n - 2))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    """Pearson correlation with the usual t-approximation p-value."""
    if len(xs) != len(ys):
        raise EvaluationError("correlation inputs differ in length")
    n = len(xs)
    if n < 3:
        raise UndefinedCorrelationError(f"need at least 3 points, got {n}")
    r = _pearson_r(xs, ys)
    return CorrelationResult(r, _t_approx_p(r, n), n)


def blanking_ratio_correlation(report: EvalReport) -> CorrelationResult:
    """Correlation between a language's share of hidden cells and its
    accuracy, for one system."""
    codes = sorted(report.per_language)
    return pearson(
        [report.language_ratio[code] for code in codes],
        [report.per_language[code] for code in codes],
    )


def meta_correlation(points: Sequence[tuple[float, float]]) -> CorrelationResult:
    """Correlation across systems between overall macro accuracy and the
    system's own blanking-ratio correlation coefficient.

    ``points`` holds one (macro_accuracy, blanking_r) pair per system.
    Two points are allowed (the correlation is then +/-1 by
    construction) but get no p-value.
    """
    n = len(points)
    if n < 2:
        raise UndefinedCorrelationError(f"need at least 2 systems, got {n}")
    macros = [p[0] for p in points]
    blanking = [p[1] for p in points]
    r = _pearson_r(macros, blanking)
    p = _t_approx_p(r, n) if n >= 3 else float("nan")
    return CorrelationResult(r, p, n)


@dataclass(frozen=True)
class FeatureRow:
    feature: str
    mean_accuracy: float
    std_accuracy: float
    n_scored: int


def feature_accuracy_table(reports: Sequence[EvalReport]) -> list[FeatureRow]:
    """Per-feature accuracy averaged across systems.

    The spread column is the population standard deviation over systems;
    n_scored counts the gold cells for the feature.  Features skipped by
    some system (possible when missing cells are excluded) are dropped.
    """
    if not reports:
        raise EvaluationError("no reports given")
    common = sorted(set.intersection(*(set(r.per_feature) for r in reports)))
    rows = []
    for feature in common:
        accs = np.array([r.feature_accuracy(feature) for r in reports])
        totals = {r.per_feature[feature][1] for r in reports}
        rows.append(
            FeatureRow(
                feature=feature,
                mean_accuracy=float(accs.mean()),
                std_accuracy=float(accs.std(ddof=0)),
                n_scored=max(totals),
            )
        )
    return rows


@dataclass(frozen=True)
class GenusRow:
    group: str
    accuracy: float
    n_languages: int


def genus_breakdown(
    report: EvalReport, held_out_genera: Iterable[str]
) -> list[GenusRow]:
    """Accuracy per held-out genus plus the remaining languages.

    The remainder is reported twice: pooled (mean over its languages)
    and macro (mean of its genus means), since either convention is a
    reasonable reading of "everything else".
    """
    held = [g for g in held_out_genera if g in report.per_genus]
    rows = []
    for genus in held:
        members = [
            code for code, g in report.language_genus.items() if g == genus
        ]
        rows.append(GenusRow(genus, report.per_genus[genus], len(members)))
    held_set = set(held)
    other_codes = sorted(
        code for code, g in report.language_genus.items() if g not in held_set
    )
    if other_codes:
        pooled = sum(report.per_language[code] for code in other_codes) / len(other_codes)
        other_genera = sorted(
            {report.language_genus[code] for code in other_codes}
        )
        macro = sum(report.per_genus[g] for g in other_genera) / len(other_genera)
        rows.append(GenusRow("other (pooled)", pooled, len(other_codes)))
        rows.append(GenusRow("other (macro)", macro, len(other_codes)))
    rows.append(GenusRow("all (macro)", report.macro_accuracy, len(report.per_language)))
    return rows
