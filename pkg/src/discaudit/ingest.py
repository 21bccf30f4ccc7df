"""Delimited-text loading, binarization and schema configuration."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .data import ROLES, Dataset, Schema
from .errors import ConfigError, ConversionError, EmptyInputError, ParseError

log = logging.getLogger(__name__)

MISSING = frozenset({"", "?", "NA", "N/A", "nan", "NaN"})
RULE_KINDS = ("median", "majority", "threshold", "identity")


@dataclass
class RawTable:
    header: list[str]
    rows: list[list[str]]
    column_kinds: dict[str, str] = field(default_factory=dict)

    def column(self, name: str) -> list[str]:
        try:
            j = self.header.index(name)
        except ValueError:
            raise ConfigError(f"column {name!r} not in header") from None
        return [r[j] for r in self.rows]


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def infer_kind(values: list[str]) -> str:
    present = [v.strip() for v in values if v.strip() not in MISSING]
    if present and set(present) <= {"0", "1"}:
        return "binary"
    if present and all(_is_number(v) for v in present):
        return "numeric"
    return "categorical"


def load_raw(path, delimiter: str = ",") -> RawTable:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(row)}", line=reader.line_num)
            rows.append([v.strip() for v in row])
    table = RawTable(header, rows)
    for j, name in enumerate(header):
        table.column_kinds[name] = infer_kind([r[j] for r in rows])
    return table


@dataclass(frozen=True)
class Rule:
    kind: str
    categories: tuple[str, ...] = ()
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigError(f"unknown rule kind {self.kind!r}")
        if self.kind == "majority" and not self.categories:
            raise ConfigError("majority rule needs the category that maps to 1")
        if self.kind == "threshold" and self.threshold is None:
            raise ConfigError("threshold rule needs a value")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Rule":
        kind = d.get("kind", "identity")
        cats = d.get("categories", d.get("category", ()))
        if isinstance(cats, str):
            cats = (cats,)
        thr = d.get("value", d.get("threshold"))
        return cls(kind, tuple(str(c) for c in cats), None if thr is None else float(thr))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "majority":
            d["category"] = self.categories[0] if len(self.categories) == 1 else list(self.categories)
        if self.kind == "threshold":
            d["value"] = self.threshold
        return d


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    role: str
    rule: Rule = Rule("identity")
    source: str | None = None  # raw column; defaults to name
    positive: str = ""

    @property
    def column(self) -> str:
        return self.source or self.name


@dataclass(frozen=True)
class SchemaConfig:
    attributes: tuple[AttributeSpec, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate attribute names in schema config")
        for a in self.attributes:
            if a.role not in ROLES:
                raise ConfigError(f"attribute {a.name!r} has unknown role {a.role!r}")
        if sum(a.role == "outcome" for a in self.attributes) != 1:
            raise ConfigError("schema config needs exactly one outcome attribute")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SchemaConfig":
        try:
            entries = d["attributes"]
            attrs = tuple(
                AttributeSpec(str(e["name"]), str(e["role"]), Rule.from_dict(e.get("rule", {})),
                              e.get("source"), str(e.get("positive", "")))
                for e in entries)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed schema config: {exc}") from None
        return cls(attrs)

    @classmethod
    def load(cls, path) -> "SchemaConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None

    def to_dict(self) -> dict[str, Any]:
        out = []
        for a in self.attributes:
            e: dict[str, Any] = {"name": a.name, "role": a.role, "rule": a.rule.to_dict()}
            if a.source:
                e["source"] = a.source
            if a.positive:
                e["positive"] = a.positive
            out.append(e)
        return {"attributes": out}

    @classmethod
    def identity(cls, schema: Schema) -> "SchemaConfig":
        return cls(tuple(AttributeSpec(n, r) for n, r in schema.attributes))

    def schema(self) -> Schema:
        return Schema(tuple((a.name, a.role) for a in self.attributes))


def lower_median(values: list[float]) -> float:
    s = sorted(values)
    return s[(len(s) - 1) // 2]


def _to_float(v: str, name: str) -> float:
    try:
        return float(v)
    except ValueError:
        raise ConversionError(f"non-numeric value {v!r} in column {name!r}") from None


def _present_rows(raw: RawTable, config: SchemaConfig) -> np.ndarray:
    keep = np.ones(len(raw.rows), dtype=bool)
    for a in config.attributes:
        col = raw.column(a.column)
        keep &= np.array([v not in MISSING for v in col], dtype=bool)
    return keep


def fit_rules(raw: RawTable, config: SchemaConfig) -> dict[str, float]:
    """Cut points of median rules, computed on rows kept after missing-value removal."""
    keep = _present_rows(raw, config)
    cuts = {}
    for a in config.attributes:
        if a.rule.kind == "median":
            vals = [_to_float(v, a.column) for v, k in zip(raw.column(a.column), keep) if k]
            if not vals:
                raise EmptyInputError(f"no values to take a median of in {a.column!r}")
            cuts[a.name] = lower_median(vals)
    return cuts


def binarize_column(values: list[str], rule: Rule, name: str, cut: float | None = None) -> np.ndarray:
    if rule.kind == "identity":
        bad = [v for v in values if v not in ("0", "1")]
        if bad:
            raise ConversionError(f"column {name!r} is not binary (found {bad[0]!r})")
        return np.array([v == "1" for v in values], dtype=np.uint8)
    if rule.kind == "majority":
        if not set(rule.categories) & set(values):
            raise ConfigError(f"category {list(rule.categories)} never occurs in column {name!r}")
        cats = set(rule.categories)
        return np.array([v in cats for v in values], dtype=np.uint8)
    if rule.kind == "median":
        if cut is None:
            cut = lower_median([_to_float(v, name) for v in values])
    else:
        cut = rule.threshold
    return np.array([_to_float(v, name) >= cut for v in values], dtype=np.uint8)


def binarize(raw: RawTable, config: SchemaConfig, fitted: dict[str, float] | None = None) -> Dataset:
    """Map configured columns to 0/1 and attach roles; unlisted columns are dropped.

    Rows missing any configured field are removed and counted in
    ``Dataset.dropped_rows``. ``fitted`` reuses median cut points from another
    table, so a predictions file is binarized exactly like its training file.
    """
    keep = _present_rows(raw, config)
    cuts = fit_rules(raw, config) if fitted is None else fitted
    cols = []
    for a in config.attributes:
        col = [v for v, k in zip(raw.column(a.column), keep) if k]
        cols.append(binarize_column(col, a.rule, a.column, cuts.get(a.name)))
    n = int(keep.sum())
    dropped = len(raw.rows) - n
    if dropped:
        log.info("dropped %d rows with missing values", dropped)
    values = np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.uint8)
    return Dataset(config.schema(), values.reshape(n, len(cols)), dropped_rows=dropped)


@dataclass
class ValidationReport:
    n_rows: int
    positive_rate: float
    minority_rate: float
    attribute_balance: dict[str, float]
    warnings: list[str]


def validate(data: Dataset, config: SchemaConfig | None = None) -> ValidationReport:
    """Class balance, per-attribute balance and empty-contrast warnings."""
    warnings = []
    n = len(data)
    if n == 0:
        return ValidationReport(0, 0.0, 0.0, {}, ["dataset is empty"])
    pos = float(data.outcome.mean())
    minority = min(pos, 1 - pos)
    if minority == 0:
        warnings.append(f"outcome {data.schema.outcome!r} has a single class (minority rate 0)")
    balance = {name: float(data.values[:, j].mean()) for j, name in enumerate(data.schema.names)}
    for p in data.schema.protected:
        if balance[p] in (0.0, 1.0):
            warnings.append(f"protected attribute {p!r} has an empty contrast group")
    if data.dropped_rows:
        warnings.append(f"{data.dropped_rows} rows dropped for missing values")
    if config is not None and [a.name for a in config.attributes] != data.schema.names:
        warnings.append("dataset attributes do not match the schema config")
    return ValidationReport(n, pos, minority, balance, warnings)


def write_dataset_csv(data: Dataset, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.schema.names)
        w.writerows(data.values.tolist())
