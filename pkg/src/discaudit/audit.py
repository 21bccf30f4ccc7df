"""Dataset and prediction audits, the explanatory-attribute sweep, and report writers."""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .data import CountsTable, Dataset, PredictionCountsTable, check_aligned, group_ids
from .errors import ConfigError, EmptyInputError, UndefinedMetricError
from .scoring import (ModelQuality, Score, error_rate, group_score, model_group_score, model_quality, over_limit,
                      rank_attributes, table_counts, weighted_score)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuditConfig:
    alpha: float = 0.05
    explanatory: tuple[str, ...] = ()
    protected: tuple[str, ...] = ()
    top_k: int = 3
    min_group_size: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.top_k < 1:
            raise ConfigError("top_k must be at least 1")
        object.__setattr__(self, "explanatory", tuple(self.explanatory))
        object.__setattr__(self, "protected", tuple(self.protected))

    @classmethod
    def for_dataset(cls, data: Dataset, **kw) -> "AuditConfig":
        """Config taking protected and explanatory sets from the schema roles."""
        kw.setdefault("protected", tuple(data.schema.protected))
        kw.setdefault("explanatory", tuple(data.schema.explanatory))
        return cls(**kw)


@dataclass(frozen=True)
class GroupDetail:
    signature: tuple[tuple[str, int], ...]
    attribute: str
    size: int
    counts: CountsTable
    score: float
    convention: bool
    over_limit: bool
    small: bool

    def label(self) -> str:
        return ",".join(f"{n}={v}" for n, v in self.signature) or "*"


@dataclass
class AuditReport:
    n_rows: int
    alpha: float
    glbds_attribute: str
    glbds: float
    glbds_convention: bool
    attribute_scores: dict[str, float]
    wgds: float
    wg_score: float
    wg_attribute: str
    wg_signature: tuple[tuple[str, int], ...]
    wg_counts: CountsTable
    wg_pct: float
    ogds: float | None
    og_pct: float
    top_attributes: list[str]
    groups: list[GroupDetail] = field(repr=False)
    quality: ModelQuality | None = None

    @property
    def discriminatory(self) -> bool:
        return abs(self.glbds) > self.alpha

    @property
    def over_limit_groups(self) -> list[GroupDetail]:
        """Over-limit groups of the attribute that sets the global score."""
        return [g for g in self.groups if g.attribute == self.glbds_attribute and g.over_limit]

    def to_dict(self) -> dict[str, Any]:
        d = {
            "n_rows": self.n_rows,
            "alpha": self.alpha,
            "glbds": self.glbds,
            "glbds_attribute": self.glbds_attribute,
            "glbds_convention": self.glbds_convention,
            "attribute_scores": dict(self.attribute_scores),
            "wgds": self.wgds,
            "wg_score": self.wg_score,
            "wg_attribute": self.wg_attribute,
            "wg_signature": {n: v for n, v in self.wg_signature},
            "wg_counts": list(self.wg_counts.as_tuple()),
            "wg_pct": self.wg_pct,
            "ogds": self.ogds,
            "og_pct": self.og_pct,
            "top_attributes": list(self.top_attributes),
            "groups": [
                {"signature": {n: v for n, v in g.signature}, "attribute": g.attribute, "size": g.size,
                 "counts": list(g.counts.as_tuple()), "score": g.score, "convention": g.convention,
                 "over_limit": g.over_limit, "small": g.small}
                for g in self.groups
            ],
        }
        if self.quality is not None:
            d["bcr"] = self.quality.bcr
            d["err"] = self.quality.err
        return d


def _check_config(data: Dataset, cfg: AuditConfig) -> None:
    if not cfg.protected:
        raise ConfigError("audit needs at least one protected attribute")
    for p in cfg.protected:
        data.schema.require_role(p, "protected")
    for e in cfg.explanatory:
        data.schema.require_role(e, "explanatory")


def _assemble(n: int, cfg: AuditConfig, sigs, sizes: np.ndarray,
              tables: dict[str, np.ndarray], scores: dict[str, list[Score]]) -> AuditReport:
    protected = list(cfg.protected)
    attr_scores = {}
    conventions = {}
    for p in protected:
        attr_scores[p] = weighted_score(scores[p], sizes, n)
        conventions[p] = attr_scores[p].defined_by_convention
    ranked = rank_attributes(attr_scores)
    best = ranked[0]

    details = []
    for g, sig in enumerate(sigs):
        for p in protected:
            c = CountsTable(*map(int, tables[p][g]))
            s = scores[p][g]
            details.append(GroupDetail(sig, p, int(sizes[g]), c, s.value, s.defined_by_convention,
                                       over_limit(c, cfg.alpha), int(sizes[g]) < cfg.min_group_size))

    pos = {p: i for i, p in enumerate(protected)}
    # ties: larger group, then signature order, then protected-attribute order
    worst = min(range(len(details)),
                key=lambda i: (-abs(details[i].score), -details[i].size, i // len(protected),
                               pos[details[i].attribute]))
    w = details[worst]

    over = [d for d in details if d.attribute == best and d.over_limit]
    og_rows = sum(d.size for d in over)
    ogds = sum(d.score * d.size for d in over) / og_rows if og_rows else None

    return AuditReport(
        n_rows=n, alpha=cfg.alpha,
        glbds_attribute=best, glbds=attr_scores[best].value, glbds_convention=conventions[best],
        attribute_scores={p: attr_scores[p].value for p in protected},
        wgds=abs(w.score), wg_score=w.score, wg_attribute=w.attribute, wg_signature=w.signature,
        wg_counts=w.counts, wg_pct=w.size / n,
        ogds=ogds, og_pct=og_rows / n,
        top_attributes=ranked[:cfg.top_k],
        groups=details,
    )


def audit_dataset(data: Dataset, cfg: AuditConfig) -> AuditReport:
    """Score every (E-group, protected attribute) pair and summarize.

    Over-limit groups are those of the attribute attaining the global score
    whose |score| exceeds ``cfg.alpha``; ``ogds`` is their size-weighted mean
    signed score.
    """
    if len(data) == 0:
        raise EmptyInputError("cannot audit an empty dataset")
    _check_config(data, cfg)
    sigs, gid = group_ids(data, cfg.explanatory)
    sizes = np.bincount(gid, minlength=len(sigs))
    d = data.outcome
    tables, scores = {}, {}
    for p in cfg.protected:
        arr = table_counts(d, data.column(p), gid, len(sigs))
        tables[p] = arr
        scores[p] = [group_score(CountsTable(*map(int, row))) for row in arr]
    return _assemble(len(data), cfg, sigs, sizes, tables, scores)


def _prediction_tables(observed: Dataset, predicted: Dataset, protected: str,
                       gid: np.ndarray, n_groups: int) -> list[PredictionCountsTable]:
    d = observed.outcome.astype(np.int64)
    p = observed.column(protected).astype(np.int64)
    wrong = (predicted.outcome != observed.outcome).astype(np.int64)
    t = np.bincount(gid * 8 + d * 4 + p * 2 + wrong, minlength=n_groups * 8).reshape(n_groups, 8)
    return [PredictionCountsTable(fr11=int(r[6]), fw11=int(r[7]), fr10=int(r[4]), fw10=int(r[5]),
                                  fr01=int(r[2]), fw01=int(r[3]), fr00=int(r[0]), fw00=int(r[1]))
            for r in t]


def audit_predictions(observed: Dataset, predicted: Dataset, cfg: AuditConfig) -> tuple[AuditReport, ModelQuality]:
    """Audit a predicted dataset through the right/wrong split counts of each group.

    The returned report also carries the BCR/Err quality in ``report.quality``;
    BCR is None when the observed outcome has a single class.
    """
    check_aligned(observed, predicted)
    if len(observed) == 0:
        raise EmptyInputError("cannot audit an empty dataset")
    _check_config(observed, cfg)
    sigs, gid = group_ids(observed, cfg.explanatory)
    sizes = np.bincount(gid, minlength=len(sigs))
    tables, scores = {}, {}
    aggregate = None
    for p in cfg.protected:
        pcs = _prediction_tables(observed, predicted, p, gid, len(sigs))
        tables[p] = np.array([pc.predicted.as_tuple() for pc in pcs], dtype=np.int64).reshape(len(sigs), 4)
        scores[p] = [model_group_score(pc) for pc in pcs]
        if aggregate is None:
            aggregate = sum(pcs[1:], pcs[0])
    report = _assemble(len(observed), cfg, sigs, sizes, tables, scores)
    try:
        quality = model_quality(aggregate)
    except UndefinedMetricError:
        log.warning("observed outcome has a single class; BCR is undefined")
        quality = ModelQuality(None, error_rate(aggregate))
    report.quality = quality
    return report, quality


@dataclass(frozen=True)
class SweepEntry:
    k: int
    avg_abs_score: float
    n_subsets: int
    mean_groups: float
    min_group_size: int
    median_group_size: float


@dataclass
class SweepResult:
    explanatory: tuple[str, ...]
    entries: list[SweepEntry]

    def to_dict(self) -> dict[str, Any]:
        return {"explanatory": list(self.explanatory),
                "entries": [vars(e).copy() for e in self.entries]}


def sweep_explanatory(data: Dataset, cfg: AuditConfig) -> SweepResult:
    """Average |global score| over every size-k subset of the explanatory attributes, k = 0..|E|."""
    names = data.schema.ordered(cfg.explanatory)
    if not names:
        raise ConfigError("sweep needs at least one explanatory attribute")
    entries = []
    for k in range(len(names) + 1):
        vals, n_groups, all_sizes = [], [], []
        for subset in itertools.combinations(names, k):
            sub_cfg = AuditConfig(cfg.alpha, subset, cfg.protected, cfg.top_k, cfg.min_group_size)
            rep = audit_dataset(data, sub_cfg)
            vals.append(abs(rep.glbds))
            sizes = [g.size for g in rep.groups if g.attribute == rep.glbds_attribute]
            n_groups.append(len(sizes))
            all_sizes.extend(sizes)
        entries.append(SweepEntry(k, sum(vals) / len(vals), len(vals), sum(n_groups) / len(n_groups),
                                  min(all_sizes), float(statistics.median(all_sizes))))
    return SweepResult(tuple(names), entries)


# serialization ----------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def dumps_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 6 decimal places."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{dumps_json(str(k))}: {dumps_json(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps_json(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_csv(report: AuditReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["signature", "attribute", "size", "f11", "f10", "f01", "f00", "score", "convention",
                "over_limit", "small"])
    for g in report.groups:
        w.writerow([g.label(), g.attribute, g.size, *g.counts.as_tuple(), _fmt_float(g.score),
                    int(g.convention), int(g.over_limit), int(g.small)])
    return buf.getvalue()


def sweep_csv(result: SweepResult) -> str:
    lines = ["k,avg_abs_score,n_subsets"]
    lines += [f"{e.k},{_fmt_float(e.avg_abs_score)},{e.n_subsets}" for e in result.entries]
    return "\n".join(lines) + "\n"


def sweep_plot_data(result: SweepResult) -> str:
    return "".join(f"{e.k} {_fmt_float(e.avg_abs_score)}\n" for e in result.entries)


def render_report(report: AuditReport | SweepResult, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps_json(report.to_dict()) + "\n"
    if fmt == "csv":
        return sweep_csv(report) if isinstance(report, SweepResult) else report_csv(report)
    if fmt == "plot-data":
        if not isinstance(report, SweepResult):
            raise ConfigError("plot-data output is only defined for sweep results")
        return sweep_plot_data(report)
    raise ConfigError(f"unknown report format {fmt!r}")


def write_report(report: AuditReport | SweepResult, path, fmt: str = "json") -> Path:
    path = Path(path)
    text = render_report(report, fmt)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
    return path
