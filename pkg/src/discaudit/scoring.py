"""Discrimination scores, odds ratio and model-quality metrics.

Scores are risk differences Pr(D=1|P=1) - Pr(D=1|P=0) computed from exact
integer counts in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .data import CountsTable, Dataset, PredictionCountsTable, group_ids
from .errors import ConfigError, EmptyInputError, UndefinedMetricError


@dataclass(frozen=True)
class Score:
    value: float
    defined_by_convention: bool = False

    def __post_init__(self):
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"score {self.value} outside [-1, 1]")

    def __abs__(self) -> float:
        return abs(self.value)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class OddsRatio:
    value: float
    convention_case: bool = False


@dataclass(frozen=True)
class ModelQuality:
    bcr: float | None  # None only when built by audit_predictions on single-class data
    err: float


def _risk_difference(pos1: int, n1: int, pos0: int, n0: int) -> Score:
    if n1 == 0 or n0 == 0:
        return Score(0.0, True)
    return Score(pos1 / n1 - pos0 / n0)


def group_score(c: CountsTable) -> Score:
    """Score of one group; 0 by convention when either P-division pair is empty."""
    return _risk_difference(c.f11, c.f11 + c.f01, c.f10, c.f10 + c.f00)


def model_group_score(pc: PredictionCountsTable) -> Score:
    """Score of a group's predictions from its right/wrong split counts."""
    f = pc.observed
    return _risk_difference(pc.fr11 + pc.fw01, f.f11 + f.f01, pc.fr10 + pc.fw00, f.f10 + f.f00)


def exact_group_score(c: CountsTable) -> Fraction:
    if c.f11 + c.f01 == 0 or c.f10 + c.f00 == 0:
        return Fraction(0)
    return Fraction(c.f11, c.f11 + c.f01) - Fraction(c.f10, c.f10 + c.f00)


def as_fraction(x) -> Fraction:
    """Read a threshold as the decimal the user wrote (0.05 -> 1/20)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def over_limit(c: CountsTable, alpha) -> bool:
    """Exact test of |score| > alpha; float round-off never decides a boundary."""
    return abs(exact_group_score(c)) > as_fraction(alpha)


def odds_ratio(c: CountsTable) -> OddsRatio:
    """(f11*f00)/(f10*f01), with 1 for tables where correlation is undefined.

    Undefined means an empty P-group or an outcome value that never occurs;
    every 0/0 case falls under one of these.
    """
    if (c.f11 + c.f01 == 0 or c.f10 + c.f00 == 0
            or c.f11 + c.f10 == 0 or c.f01 + c.f00 == 0):
        return OddsRatio(1.0, True)
    num, den = c.f11 * c.f00, c.f10 * c.f01
    if den == 0:
        return OddsRatio(math.inf)
    return OddsRatio(num / den)


def table_counts(d: np.ndarray, p: np.ndarray, gid: np.ndarray, n_groups: int) -> np.ndarray:
    """(n_groups, 4) array of f11, f10, f01, f00 per group."""
    t = np.bincount(gid * 4 + d.astype(np.int64) * 2 + p.astype(np.int64), minlength=n_groups * 4)
    return t.reshape(n_groups, 4)[:, ::-1]


def weighted_score(scores: Iterable[Score], sizes: Iterable[int], n_rows: int) -> Score:
    """Size-weighted average of group scores; convention groups add 0 but keep their weight."""
    if n_rows <= 0:
        raise EmptyInputError("cannot score an empty dataset")
    total = 0.0
    all_conv = True
    for s, size in zip(scores, sizes):
        all_conv &= s.defined_by_convention
        total += s.value * (int(size) / n_rows)
    return Score(float(min(1.0, max(-1.0, total))), all_conv)


def dataset_score(data: Dataset, protected: str, explanatory: Iterable[str] = ()) -> Score:
    if len(data) == 0:
        raise EmptyInputError("cannot score an empty dataset")
    p_col = data.schema.require_role(protected, "protected")
    sigs, gid = group_ids(data, explanatory)
    arr = table_counts(data.outcome, data.values[:, p_col], gid, len(sigs))
    return weighted_score([group_score(CountsTable(*map(int, row))) for row in arr], arr.sum(axis=1), len(data))


def rank_attributes(scores: dict[str, Score]) -> list[str]:
    """Names by descending |score|, ties broken by name."""
    return sorted(scores, key=lambda n: (-abs(scores[n].value), n))


def global_score(data: Dataset, protected_set: Iterable[str], explanatory: Iterable[str] = ()) -> tuple[str, Score]:
    """Protected attribute with the largest |dataset score| and its signed score.

    If every attribute is scored 0 by convention, the result keeps the flag.
    """
    protected_set = list(protected_set)
    if not protected_set:
        raise ConfigError("global score needs at least one protected attribute")
    explanatory = list(explanatory)
    scores = {p: dataset_score(data, p, explanatory) for p in protected_set}
    best = rank_attributes(scores)[0]
    return best, scores[best]


def error_rate(pc: PredictionCountsTable) -> float:
    wrong = pc.fw11 + pc.fw10 + pc.fw01 + pc.fw00
    if pc.total == 0:
        raise EmptyInputError("no predictions to score")
    return wrong / pc.total


def model_quality(pc: PredictionCountsTable) -> ModelQuality:
    """BCR and error rate of predictions aggregated over all rows."""
    tp, fn = pc.fr11 + pc.fr10, pc.fw11 + pc.fw10
    tn, fp = pc.fr01 + pc.fr00, pc.fw01 + pc.fw00
    if tp + fn == 0 or tn + fp == 0:
        raise UndefinedMetricError("balanced classification rate needs both observed classes")
    bcr = (tp / (tp + fn) + tn / (tn + fp)) / 2
    return ModelQuality(bcr, error_rate(pc))
