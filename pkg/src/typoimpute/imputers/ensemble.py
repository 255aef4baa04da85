"""Combining several imputers into one."""

from __future__ import annotations

from typing import Sequence

from ..kb import Dataset
from .base import Imputer, ImputerQuery, NoPredictionError, Prediction

__all__ = ["EnsembleImputer", "POLICIES"]

POLICIES = ("max_confidence", "first_success")


class EnsembleImputer(Imputer):
    """Delegates each query to member imputers.

    ``max_confidence`` asks every member and keeps the most confident
    answer (earlier member wins ties); ``first_success`` returns the
    first member's answer, falling through on NoPredictionError only.
    Member predictions are returned unchanged, so an ensemble of one
    behaves exactly like its member.
    """

    name = "ensemble"

    def __init__(self, members: Sequence[Imputer], policy: str = "max_confidence"):
        if not members:
            raise ValueError("ensemble needs at least one member")
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
        self.members = list(members)
        self.policy = policy

    def fit(self, train: Dataset, context: Dataset | None = None) -> "EnsembleImputer":
        for member in self.members:
            member.fit(train, context)
        return self

    def predict(self, query: ImputerQuery) -> Prediction:
        if self.policy == "first_success":
            for member in self.members:
                try:
                    return member.predict(query)
                except NoPredictionError:
                    continue
            raise NoPredictionError("no member produced a prediction")

        best: Prediction | None = None
        for member in self.members:
            try:
                candidate = member.predict(query)
            except NoPredictionError:
                continue
            if best is None or candidate.confidence > best.confidence:
                best = candidate
        if best is None:
            raise NoPredictionError("no member produced a prediction")
        return best
