"""Cross-feature correlation imputer: NMI weights, smoothed votes."""

import random

import pytest

from typoimpute.kb import Cell, Dataset
from typoimpute.imputers import (
    CorrelationImputer,
    ImputerQuery,
    NoPredictionError,
    fill_dataset,
)

from oracles import correlation_scores_oracle, nmi_oracle
from synth import make_language, random_dataset


def _query(lang, observed, target):
    return ImputerQuery(language=lang, observed=observed, target=target)


def _implication_dataset(n=9, mapping=None):
    """Languages observing A and B where B is a function of A."""
    mapping = mapping or {"a0": "b2", "a1": "b0", "a2": "b1"}
    keys = sorted(mapping)
    languages = []
    cells = {}
    for i in range(n):
        code = f"l{i:02d}"
        a = keys[i % len(keys)]
        languages.append(make_language(code))
        cells[(code, "A")] = Cell.observed(a)
        cells[(code, "B")] = Cell.observed(mapping[a])
        cells[(code, "C")] = Cell.observed("const")
    return Dataset.build(languages, cells), mapping


def test_deterministic_implication_is_recovered():
    train, mapping = _implication_dataset(n=9)
    imp = CorrelationImputer()
    imp.fit(train)
    for a, b in mapping.items():
        pred = imp.predict(_query(make_language("qqq"), {"A": a}, "B"))
        assert pred.value == b
        assert pred.source == "correlation"
        assert pred.confidence > 0.5


def test_constant_feature_contributes_nothing():
    train, mapping = _implication_dataset(n=9)
    imp = CorrelationImputer()
    imp.fit(train)
    with_const = imp.scores(_query(make_language("q1"), {"A": "a0", "C": "const"}, "B"))
    without = imp.scores(_query(make_language("q2"), {"A": "a0"}, "B"))
    assert with_const == pytest.approx(without)


def test_min_support_gates_pairs():
    train, _ = _implication_dataset(n=4)  # only 4 co-observers
    strict = CorrelationImputer(min_support=5)
    strict.fit(train)
    assert strict.scores(_query(make_language("qqq"), {"A": "a0"}, "B")) is None
    with pytest.raises(NoPredictionError):
        strict.predict(_query(make_language("qqq"), {"A": "a0"}, "B"))
    loose = CorrelationImputer(min_support=4)
    loose.fit(train)
    assert loose.scores(_query(make_language("qqq"), {"A": "a0"}, "B")) is not None


def test_hand_computed_vote():
    # A/T co-observed 6 times: a1 -> t1 t1 t2, a2 -> t2 t2 t2
    pairs = [("a1", "t1"), ("a1", "t1"), ("a1", "t2"),
             ("a2", "t2"), ("a2", "t2"), ("a2", "t2")]
    languages = []
    cells = {}
    for i, (a, t) in enumerate(pairs):
        code = f"l{i:02d}"
        languages.append(make_language(code))
        cells[(code, "A")] = Cell.observed(a)
        cells[(code, "T")] = Cell.observed(t)
    train = Dataset.build(languages, cells)
    imp = CorrelationImputer(alpha=1.0, min_support=5)
    imp.fit(train)

    weight = nmi_oracle(pairs)
    assert weight > 0
    scores = imp.scores(_query(make_language("qqq"), {"A": "a1"}, "T"))
    # smoothed conditionals: (2+1)/(3+2) and (1+1)/(3+2)
    assert scores["t1"] == pytest.approx(weight * 0.6)
    assert scores["t2"] == pytest.approx(weight * 0.4)
    pred = imp.predict(_query(make_language("qqq"), {"A": "a1"}, "T"))
    assert pred.value == "t1"
    assert pred.confidence == pytest.approx(0.6)


def test_informative_feature_outvotes_weak_one():
    # A determines T; B is nearly independent of T
    languages = []
    cells = {}
    rows = [
        ("a1", "b1", "t1"), ("a1", "b2", "t1"), ("a1", "b1", "t1"),
        ("a1", "b2", "t1"), ("a2", "b1", "t2"), ("a2", "b2", "t2"),
        ("a2", "b1", "t2"), ("a2", "b2", "t2"),
    ]
    for i, (a, b, t) in enumerate(rows):
        code = f"l{i:02d}"
        languages.append(make_language(code))
        cells[(code, "A")] = Cell.observed(a)
        cells[(code, "B")] = Cell.observed(b)
        cells[(code, "T")] = Cell.observed(t)
    train = Dataset.build(languages, cells)
    imp = CorrelationImputer()
    imp.fit(train)
    pred = imp.predict(_query(make_language("qqq"), {"A": "a1", "B": "b1"}, "T"))
    assert pred.value == "t1"


def test_no_observed_features_means_no_prediction():
    train, _ = _implication_dataset()
    imp = CorrelationImputer()
    imp.fit(train)
    assert imp.scores(_query(make_language("qqq"), {}, "B")) is None


def test_unknown_target_means_no_prediction():
    train, _ = _implication_dataset()
    imp = CorrelationImputer()
    imp.fit(train)
    assert imp.scores(_query(make_language("qqq"), {"A": "a0"}, "Z")) is None


def test_alpha_validation():
    with pytest.raises(ValueError):
        CorrelationImputer(alpha=-0.5)


def test_scores_match_oracle_on_random_data():
    rng = random.Random(70)
    for trial in range(25):
        train = random_dataset(
            rng,
            n_languages=rng.randint(3, 15),
            n_features=rng.randint(2, 6),
            p_observed=rng.choice([0.5, 0.8, 1.0]),
            min_observed=1,
        )
        alpha = rng.choice([0.5, 1.0])
        min_support = rng.choice([1, 3, 5])
        imp = CorrelationImputer(alpha=alpha, min_support=min_support)
        imp.fit(train)
        for code in train.codes():
            lang = train.language(code)
            full = train.observed_of(code)
            for target in train.catalog.features():
                observed = {f: v for f, v in full.items() if f != target}
                want = correlation_scores_oracle(
                    train, observed, target, alpha=alpha, min_support=min_support
                )
                got = imp.scores(_query(lang, observed, target))
                if want is None:
                    assert got is None
                    continue
                assert got is not None
                assert sorted(got) == sorted(want)
                for value, score in want.items():
                    assert got[value] == pytest.approx(score, rel=1e-9, abs=1e-12)


def test_fill_blanked_cells_end_to_end():
    train, mapping = _implication_dataset(n=12)
    languages = []
    cells = {}
    keys = sorted(mapping)
    for i in range(6):
        code = f"t{i:02d}"
        a = keys[i % len(keys)]
        languages.append(make_language(code))
        cells[(code, "A")] = Cell.observed(a)
        cells[(code, "B")] = Cell.blanked(mapping[a])
    test = Dataset.build(languages, cells)
    imp = CorrelationImputer()
    imp.fit(train)
    predictions = fill_dataset(imp, test)
    assert len(predictions) == 6
    for (code, feature), pred in predictions.items():
        assert feature == "B"
        assert pred.value == test.cells[(code, "B")].value
