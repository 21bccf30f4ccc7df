"""Count-table constructions for Simpson-style splits and merges, the
odds-ratio/score comparison, and small hand-drawn fixtures.

Rational parameters are taken as ``Fraction`` (or anything ``Fraction``
accepts, e.g. ``"1/50"``) so integrality of derived counts is checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .data import PREDICTED, CountsTable, Dataset, Schema
from .errors import IntegralityError, ParameterError
from .scoring import as_fraction, exact_group_score

PARADOX_SCHEMA = Schema.from_roles("D", protected=["P"], explanatory=["E"])
DIVISIONS = ((1, 1), (1, 0), (0, 1), (0, 0))  # (D, P) in counts-table field order


def _positive_int(name: str, v) -> int:
    if int(v) != v or v < 1:
        raise ParameterError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


def _integral(name: str, v: Fraction) -> int:
    if v.denominator != 1:
        raise IntegralityError(f"{name} = {v} is not an integer")
    if v < 0:
        raise ParameterError(f"{name} = {v} is negative")
    return int(v)


def table_rows(c: CountsTable, e: int | None = None) -> list[tuple[int, ...]]:
    """Rows (D, P[, E]) for a counts table, divisions in f11, f10, f01, f00 order."""
    rows = []
    for (d, p), k in zip(DIVISIONS, c.as_tuple()):
        rows.extend([(d, p) if e is None else (d, p, e)] * k)
    return rows


def materialize(first: CountsTable, second: CountsTable) -> Dataset:
    """Dataset on (D, P, E) with E=1 rows for ``first`` then E=0 rows for ``second``."""
    rows = table_rows(first, 1) + table_rows(second, 0)
    return Dataset(PARADOX_SCHEMA, np.array(rows, dtype=np.uint8).reshape(len(rows), 3))


@dataclass(frozen=True)
class ParadoxInstance:
    e_counts: CountsTable
    e1_counts: CountsTable
    e2_counts: CountsTable
    params: dict[str, Any]
    expected: dict[str, Fraction]  # keys "e", "e1", "e2"

    def __post_init__(self):
        if self.e1_counts + self.e2_counts != self.e_counts:
            raise ParameterError("merged counts are not the fieldwise sum of the parts")

    def dataset(self) -> Dataset:
        return materialize(self.e1_counts, self.e2_counts)

    def manifest(self) -> dict[str, Any]:
        return {
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "counts": {"e": list(self.e_counts.as_tuple()), "e1": list(self.e1_counts.as_tuple()),
                       "e2": list(self.e2_counts.as_tuple())},
            "expected_scores": {k: float(v) for k, v in self.expected.items()},
            "expected_scores_exact": {k: str(v) for k, v in self.expected.items()},
        }


def gen_simpson_split(K: int) -> ParadoxInstance:
    """A score-0 group whose two halves score +1 and -1."""
    K = _positive_int("K", K)
    e1 = CountsTable(K, 0, 0, K)
    e2 = CountsTable(0, K, K, 0)
    e = e1 + e2
    return ParadoxInstance(e, e1, e2, {"K": K},
                           {"e": Fraction(0), "e1": Fraction(1), "e2": Fraction(-1)})


def gen_simpson_merge(K: int, m: int, alpha_prime, alpha) -> ParadoxInstance:
    """Two under-threshold groups whose union scores m*alpha_prime/3.

    The first part scores 0 and the second alpha_prime. The first part has
    2K rows with P=1 and K with P=0, the second K and 2K, so the union has 3K
    rows on each side of P and its score is the difference of the positive
    counts over 3K.
    """
    K = _positive_int("K", K)
    m = _positive_int("m", m)
    ap = as_fraction(alpha_prime)
    a = as_fraction(alpha)
    if not 0 < ap < a:
        raise ParameterError(f"need 0 < alpha_prime < alpha, got {ap} and {a}")
    e1 = CountsTable(
        _integral("2*alpha_prime*m*K", 2 * ap * m * K),
        _integral("alpha_prime*m*K", ap * m * K),
        _integral("2K - 2*alpha_prime*m*K", 2 * K - 2 * ap * m * K),
        _integral("K - alpha_prime*m*K", K - ap * m * K),
    )
    e2 = CountsTable(
        _integral("2*alpha_prime*K", 2 * ap * K),
        _integral("2*alpha_prime*K", 2 * ap * K),
        _integral("K - 2*alpha_prime*K", K - 2 * ap * K),
        _integral("2K - 2*alpha_prime*K", 2 * K - 2 * ap * K),
    )
    e = e1 + e2
    expected = {"e": m * ap / 3, "e1": Fraction(0), "e2": ap}
    inst = ParadoxInstance(e, e1, e2, {"K": K, "m": m, "alpha_prime": ap, "alpha": a}, expected)
    for key, c in (("e", e), ("e1", e1), ("e2", e2)):
        if exact_group_score(c) != expected[key]:
            raise AssertionError(f"construction broke for {key}: {exact_group_score(c)} != {expected[key]}")
    return inst


def merge_exceeds(inst: ParadoxInstance) -> bool:
    """Whether the merged group is over the limit, i.e. m*alpha_prime/3 > alpha."""
    return abs(inst.expected["e"]) > inst.params["alpha"]


@dataclass(frozen=True)
class CorrelationInstance:
    e1_counts: CountsTable
    e2_counts: CountsTable
    m: int
    w: Fraction
    K: int
    oz1: Fraction
    oz2: Fraction
    delta1: Fraction
    delta2: Fraction

    @property
    def dz(self) -> Fraction:
        """|oz1 - 1| - |oz2 - 1|."""
        return abs(self.oz1 - 1) - abs(self.oz2 - 1)

    @property
    def ddelta(self) -> Fraction:
        """|delta1| - |delta2|."""
        return abs(self.delta1) - abs(self.delta2)

    @property
    def closed_form_dz(self) -> Fraction:
        return self.m - 1 / self.w

    @property
    def closed_form_ddelta(self) -> Fraction:
        """m/(m+1) - w/(w+1), which drops the 1/2 terms of both scores.

        For m >= 1 >= w it exceeds ``ddelta`` by (1-w)/(1+w); ``ddelta`` is
        what the tables actually produce.
        """
        return Fraction(self.m, self.m + 1) - self.w / (self.w + 1)

    @property
    def in_stated_regime(self) -> bool:
        return 1 / self.w > self.m > max(self.w, 1)

    @property
    def is_counterexample(self) -> bool:
        """Less correlated first table but larger |score|, measured on the tables."""
        return self.dz < 0 and self.ddelta > 0

    def dataset(self) -> Dataset:
        return materialize(self.e1_counts, self.e2_counts)

    def manifest(self) -> dict[str, Any]:
        return {
            "params": {"m": self.m, "w": str(self.w), "K": self.K},
            "counts": {"e1": list(self.e1_counts.as_tuple()), "e2": list(self.e2_counts.as_tuple())},
            "odds_ratios": {"e1": str(self.oz1), "e2": str(self.oz2)},
            "expected_scores": {"e1": float(self.delta1), "e2": float(self.delta2)},
            "dz": str(self.dz), "ddelta": str(self.ddelta),
            "closed_form_ddelta": str(self.closed_form_ddelta),
            "in_stated_regime": self.in_stated_regime,
            "is_counterexample": self.is_counterexample,
        }


def gen_corr_counterexample(m: int, w, K: int) -> CorrelationInstance:
    """Tables (mK, K, K, K) and (K, wK, K, K) with odds ratios m and 1/w."""
    m = _positive_int("m", m)
    K = _positive_int("K", K)
    w = as_fraction(w)
    if not w > 0:
        raise ParameterError(f"w must be positive, got {w}")
    wK = _integral("w*K", w * K)
    e1 = CountsTable(m * K, K, K, K)
    e2 = CountsTable(K, wK, K, K)
    oz1 = Fraction(e1.f11 * e1.f00, e1.f10 * e1.f01)
    oz2 = Fraction(e2.f11 * e2.f00, e2.f10 * e2.f01)
    return CorrelationInstance(e1, e2, m, w, K, oz1, oz2, exact_group_score(e1), exact_group_score(e2))


# fixtures ---------------------------------------------------------------------

FIGURE_SCHEMA = Schema.from_roles("D", protected=["G"], other=["X"])
TABLE2_SCHEMA = Schema.from_roles("D", protected=["G"], other=["M"])
EXAMPLE1_SCHEMA = Schema.from_roles("D", protected=["G"], explanatory=["S"])


def _figure_dataset(rows, kind="observed") -> Dataset:
    return Dataset(FIGURE_SCHEMA, np.array(rows, dtype=np.uint8).reshape(len(rows), 3), kind)


def example1_dataset() -> Dataset:
    """Income by gender (G=1 female) split by sector S: 62 rows with S=1, 63 with S=0."""
    rows = ([(d, g, 1) for d, g in table_rows(CountsTable(9, 3, 20, 30))]
            + [(d, g, 0) for d, g in table_rows(CountsTable(1, 12, 20, 30))])
    return Dataset(EXAMPLE1_SCHEMA, np.array(rows, dtype=np.uint8))


def table2_datasets() -> tuple[Dataset, Dataset]:
    """Four people (G=1 female) and the predictions of the model D-hat = M."""
    observed = Dataset.from_rows(TABLE2_SCHEMA, [(1, 1, 1), (0, 1, 0), (1, 0, 0), (0, 0, 0)])
    predicted = observed.with_outcome(observed.column("M"), PREDICTED)
    return observed, predicted


def gen_figure_fixtures() -> dict[str, Dataset]:
    """Named fixtures for the fair/unfair prediction pictures.

    X is the side of the drawn decision boundary; the fig1d and fig2a1
    predictions are D-hat = X. G=1 marks females.
    """
    # fig1: 6 females (1 positive), 8 males (6 positive)
    fem = [(1, 1, 1)] + [(0, 1, 1)] * 2 + [(0, 1, 0)] * 3
    male = [(1, 0, 1)] * 4 + [(1, 0, 0)] * 2 + [(0, 0, 0)] * 2
    fig1a = _figure_dataset(fem + male)
    out = fig1a.outcome.copy()
    out[0] = 0  # the one female positive, mispredicted
    fig1b = fig1a.with_outcome(out)
    fig1c = fig1a.with_outcome(fig1a.outcome)
    fig1d = fig1a.with_outcome(fig1a.column("X"))

    # fig2: 4 females and 4 males, half positive in each
    fig2a = _figure_dataset([(1, 1, 1), (1, 1, 0), (0, 1, 0), (0, 1, 0),
                             (1, 0, 1), (1, 0, 1), (0, 0, 0), (0, 0, 0)])
    fig2a1 = fig2a.with_outcome(fig2a.column("X"))

    t2_obs, t2_pred = table2_datasets()
    return {"fig1a": fig1a, "fig1b": fig1b, "fig1c": fig1c, "fig1d": fig1d,
            "fig2a": fig2a, "fig2a1": fig2a1,
            "example1": example1_dataset(), "table2": t2_obs, "table2_pred": t2_pred}
