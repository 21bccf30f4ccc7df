"""Schemas, binary datasets, E-group stratification and DP-division counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, RoleError, SchemaError

ROLES = ("outcome", "protected", "explanatory", "other")
OBSERVED = "observed"
PREDICTED = "predicted"


@dataclass(frozen=True)
class Schema:
    """Ordered attribute names with their roles.

    Positions in ``attributes`` are the column positions of every dataset
    built on this schema.
    """

    attributes: tuple[tuple[str, str], ...]

    def __post_init__(self):
        attrs = tuple((str(n), str(r)) for n, r in self.attributes)
        object.__setattr__(self, "attributes", attrs)
        names = [n for n, _ in attrs]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate attribute names: {dupes}")
        for name, role in attrs:
            if role not in ROLES:
                raise SchemaError(f"attribute {name!r} has unknown role {role!r}")
        n_outcome = sum(role == "outcome" for _, role in attrs)
        if n_outcome != 1:
            raise SchemaError(f"schema needs exactly one outcome attribute, got {n_outcome}")

    @classmethod
    def from_roles(cls, outcome: str, protected: Iterable[str] = (),
                   explanatory: Iterable[str] = (), other: Iterable[str] = ()) -> "Schema":
        attrs = [(outcome, "outcome")]
        attrs += [(n, "protected") for n in protected]
        attrs += [(n, "explanatory") for n in explanatory]
        attrs += [(n, "other") for n in other]
        return cls(tuple(attrs))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.attributes]

    @property
    def outcome(self) -> str:
        return next(n for n, r in self.attributes if r == "outcome")

    def with_role(self, role: str) -> list[str]:
        return [n for n, r in self.attributes if r == role]

    @property
    def protected(self) -> list[str]:
        return self.with_role("protected")

    @property
    def explanatory(self) -> list[str]:
        return self.with_role("explanatory")

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.attributes):
            if n == name:
                return i
        raise SchemaError(f"unknown attribute {name!r}")

    def role(self, name: str) -> str:
        return self.attributes[self.index(name)][1]

    def require_role(self, name: str, role: str) -> int:
        i = self.index(name)
        if self.attributes[i][1] != role:
            raise RoleError(f"attribute {name!r} has role {self.attributes[i][1]!r}, expected {role!r}")
        return i

    def ordered(self, names: Iterable[str]) -> list[str]:
        """``names`` sorted by schema position (unknown names raise)."""
        return sorted(set(names), key=self.index)

    def reassign(self, protected: Sequence[str] | None = None,
                 explanatory: Sequence[str] | None = None) -> "Schema":
        """Copy with the protected and/or explanatory sets replaced.

        Attributes dropped from a replaced set become ``other``.
        """
        for n in list(protected or []) + list(explanatory or []):
            self.index(n)
        if protected is not None and explanatory is not None and set(protected) & set(explanatory):
            raise RoleError(f"attributes both protected and explanatory: {sorted(set(protected) & set(explanatory))}")
        attrs = []
        for name, role in self.attributes:
            new = role
            if role != "outcome":
                if protected is not None:
                    if name in protected:
                        new = "protected"
                    elif role == "protected":
                        new = "other"
                if explanatory is not None:
                    if name in explanatory:
                        new = "explanatory"
                    elif new == "explanatory":
                        new = "other"
            elif name in (protected or ()) or name in (explanatory or ()):
                raise RoleError(f"outcome {name!r} cannot be protected or explanatory")
            attrs.append((name, new))
        return Schema(tuple(attrs))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Binary rows under a schema; column ``j`` holds attribute ``schema.names[j]``.

    ``outcome_kind`` says whether the outcome column is the observed outcome or
    a model's prediction of it.
    """

    schema: Schema
    values: np.ndarray
    outcome_kind: str = OBSERVED
    dropped_rows: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim == 1 and vals.size == 0:
            vals = vals.reshape(0, len(self.schema.names))
        if vals.ndim != 2 or vals.shape[1] != len(self.schema.names):
            raise SchemaError(
                f"rows must have {len(self.schema.names)} values, got array of shape {vals.shape}")
        if vals.size and not np.isin(vals, (0, 1)).all():
            raise SchemaError("dataset values must be 0 or 1")
        vals = np.ascontiguousarray(vals, dtype=np.uint8)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.outcome_kind not in (OBSERVED, PREDICTED):
            raise SchemaError(f"unknown outcome kind {self.outcome_kind!r}")

    @classmethod
    def from_rows(cls, schema: Schema, rows: Iterable[Sequence[int]], outcome_kind: str = OBSERVED) -> "Dataset":
        rows = [list(r) for r in rows]
        for i, r in enumerate(rows):
            if len(r) != len(schema.names):
                raise SchemaError(f"row {i} has {len(r)} values, schema has {len(schema.names)}")
        return cls(schema, np.array(rows, dtype=np.int64).reshape(len(rows), len(schema.names)), outcome_kind)

    def __len__(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.schema.index(name)]

    @property
    def outcome(self) -> np.ndarray:
        return self.column(self.schema.outcome)

    def with_outcome(self, outcome: np.ndarray, outcome_kind: str = PREDICTED) -> "Dataset":
        outcome = np.asarray(outcome)
        if outcome.shape != (len(self),):
            raise AlignmentError(f"need {len(self)} outcome values, got shape {outcome.shape}")
        vals = self.values.copy()
        vals[:, self.schema.index(self.schema.outcome)] = outcome
        return Dataset(self.schema, vals, outcome_kind)

    def with_schema(self, schema: Schema) -> "Dataset":
        if schema.names != self.schema.names:
            raise SchemaError("replacement schema must keep attribute names and order")
        return Dataset(schema, self.values, self.outcome_kind, self.dropped_rows)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in r) for r in self.values]


@dataclass(frozen=True, eq=False)
class EGroup:
    signature: tuple[tuple[str, int], ...]
    row_indices: np.ndarray

    @property
    def size(self) -> int:
        return int(self.row_indices.shape[0])

    def label(self) -> str:
        if not self.signature:
            return "*"
        return ",".join(f"{n}={v}" for n, v in self.signature)


@dataclass(frozen=True)
class CountsTable:
    """Tuple counts of the four DP-divisions; first index is D, second is P."""

    f11: int
    f10: int
    f01: int
    f00: int

    def __post_init__(self):
        for k in ("f11", "f10", "f01", "f00"):
            v = getattr(self, k)
            if int(v) != v or v < 0:
                raise ValueError(f"{k} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, k, int(v))

    def __add__(self, other: "CountsTable") -> "CountsTable":
        return CountsTable(self.f11 + other.f11, self.f10 + other.f10,
                           self.f01 + other.f01, self.f00 + other.f00)

    @property
    def total(self) -> int:
        return self.f11 + self.f10 + self.f01 + self.f00

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.f11, self.f10, self.f01, self.f00)


@dataclass(frozen=True)
class PredictionCountsTable:
    """Right (``fr``) and wrong (``fw``) prediction counts per DP-division."""

    fr11: int
    fw11: int
    fr10: int
    fw10: int
    fr01: int
    fw01: int
    fr00: int
    fw00: int

    def __post_init__(self):
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            if int(v) != v or v < 0:
                raise ValueError(f"{k} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, k, int(v))

    def __add__(self, other: "PredictionCountsTable") -> "PredictionCountsTable":
        return PredictionCountsTable(*(getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__))

    @property
    def observed(self) -> CountsTable:
        return CountsTable(self.fr11 + self.fw11, self.fr10 + self.fw10,
                           self.fr01 + self.fw01, self.fr00 + self.fw00)

    @property
    def predicted(self) -> CountsTable:
        """Counts with D replaced by the prediction."""
        return CountsTable(self.fr11 + self.fw01, self.fr10 + self.fw00,
                           self.fw11 + self.fr01, self.fw10 + self.fr00)

    @property
    def total(self) -> int:
        return self.observed.total


def _explanatory_columns(data: Dataset, explanatory: Iterable[str]) -> tuple[list[str], list[int]]:
    names = list(explanatory)
    for n in names:
        data.schema.require_role(n, "explanatory")
    names = data.schema.ordered(names)
    return names, [data.schema.index(n) for n in names]


def group_ids(data: Dataset, explanatory: Iterable[str]) -> tuple[list[tuple[tuple[str, int], ...]], np.ndarray]:
    """Dense group id per row plus the signature of each id.

    Ids follow lexicographic signature order over the schema-ordered
    explanatory attributes.
    """
    names, cols = _explanatory_columns(data, explanatory)
    n = len(data)
    if not cols:
        return ([()] if n else []), np.zeros(n, dtype=np.int64)
    sub = data.values[:, cols]
    if len(cols) <= 62:
        weights = np.left_shift(np.int64(1), np.arange(len(cols) - 1, -1, -1, dtype=np.int64))
        codes = sub.astype(np.int64) @ weights
        uniq, inverse = np.unique(codes, return_inverse=True)
        sigs = [tuple((nm, int((c >> (len(cols) - 1 - k)) & 1)) for k, nm in enumerate(names)) for c in uniq]
    else:
        uniq_rows, inverse = np.unique(sub, axis=0, return_inverse=True)
        sigs = [tuple(zip(names, (int(v) for v in row))) for row in uniq_rows]
    return sigs, inverse.reshape(-1).astype(np.int64)


def stratify(data: Dataset, explanatory: Iterable[str]) -> list[EGroup]:
    """Partition rows into E-groups, one per signature present in the data."""
    sigs, gid = group_ids(data, explanatory)
    if not sigs:
        return []
    order = np.argsort(gid, kind="stable")
    bounds = np.searchsorted(gid[order], np.arange(len(sigs) + 1))
    groups = []
    for g, sig in enumerate(sigs):
        idx = order[bounds[g]:bounds[g + 1]]
        idx.setflags(write=False)
        groups.append(EGroup(sig, idx))
    return groups


def counts(group: EGroup, data: Dataset, protected: str) -> CountsTable:
    p = data.values[group.row_indices, data.schema.require_role(protected, "protected")]
    d = data.values[group.row_indices, data.schema.index(data.schema.outcome)]
    tally = np.bincount(d.astype(np.int64) * 2 + p, minlength=4)
    return CountsTable(int(tally[3]), int(tally[2]), int(tally[1]), int(tally[0]))


def check_aligned(observed: Dataset, predicted: Dataset) -> None:
    if observed.schema.names != predicted.schema.names:
        raise AlignmentError("observed and predicted datasets have different attributes")
    if len(observed) != len(predicted):
        raise AlignmentError(f"row count mismatch: {len(observed)} observed vs {len(predicted)} predicted")
    if observed.outcome_kind != OBSERVED or predicted.outcome_kind != PREDICTED:
        raise AlignmentError("expected an observed dataset and a predicted dataset")
    out = observed.schema.index(observed.schema.outcome)
    keep = [j for j in range(observed.values.shape[1]) if j != out]
    if not np.array_equal(observed.values[:, keep], predicted.values[:, keep]):
        raise AlignmentError("predicted dataset differs from observed outside the outcome column")


def prediction_counts(group: EGroup, observed: Dataset, predicted: Dataset, protected: str) -> PredictionCountsTable:
    check_aligned(observed, predicted)
    idx = group.row_indices
    p = observed.values[idx, observed.schema.require_role(protected, "protected")].astype(np.int64)
    d = observed.outcome[idx].astype(np.int64)
    wrong = (predicted.outcome[idx] != observed.outcome[idx]).astype(np.int64)
    t = np.bincount(d * 4 + p * 2 + wrong, minlength=8)
    # index = d*4 + p*2 + wrong
    return PredictionCountsTable(fr11=int(t[6]), fw11=int(t[7]), fr10=int(t[4]), fw10=int(t[5]),
                                 fr01=int(t[2]), fw01=int(t[3]), fr00=int(t[0]), fw00=int(t[1]))


def whole(data: Dataset) -> EGroup:
    """The whole dataset as a single group."""
    idx = np.arange(len(data))
    idx.setflags(write=False)
    return EGroup((), idx)
