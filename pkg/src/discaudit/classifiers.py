"""Desk-scale classifiers over binary data: ID3-style tree, naive Bayes, constant.

Models only ever see the attributes in their pool. The pool is validated
against the schema: the outcome is never allowed, protected attributes only
with ``allow_protected=True``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np

from .data import PREDICTED, Dataset
from .errors import ConfigError, ParameterError, RoleError, SchemaError


def _check_pool(data: Dataset, pool: Iterable[str], allow_protected: bool = False) -> tuple[str, ...]:
    pool = list(pool)
    for name in pool:
        role = data.schema.role(name)
        if role == "outcome":
            raise RoleError(f"the outcome {name!r} cannot be a model input")
        if role == "protected" and not allow_protected:
            raise RoleError(f"protected attribute {name!r} cannot be a model input")
    return tuple(data.schema.ordered(pool))


def _entropy(pos: int, n: int) -> float:
    if n == 0 or pos == 0 or pos == n:
        return 0.0
    q = pos / n
    return -(q * math.log2(q) + (1 - q) * math.log2(1 - q))


def _majority(pos: int, n: int, fallback: int) -> int:
    if 2 * pos > n:
        return 1
    if 2 * pos < n:
        return 0
    return fallback


@dataclass
class Node:
    label: int
    attribute: str | None = None
    children: dict[int, "Node"] = field(default_factory=dict)
    n: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"label": self.label, "n": self.n}
        if not self.is_leaf:
            d["attribute"] = self.attribute
            d["children"] = {str(v): c.to_dict() for v, c in sorted(self.children.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Node":
        node = cls(int(d["label"]), d.get("attribute"), n=int(d.get("n", 0)))
        for v, c in d.get("children", {}).items():
            node.children[int(v)] = cls.from_dict(c)
        return node


@dataclass
class DecisionTree:
    root: Node
    attribute_pool: tuple[str, ...]

    def split_attributes(self) -> set[str]:
        out, stack = set(), [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.add(node.attribute)
                stack.extend(node.children.values())
        return out

    def paths(self) -> list[list[str]]:
        """Split attributes along every root-to-leaf path."""
        out = []

        def walk(node, path):
            if node.is_leaf:
                out.append(path)
                return
            for c in node.children.values():
                walk(c, path + [node.attribute])

        walk(self.root, [])
        return out

    def predict_array(self, data: Dataset) -> np.ndarray:
        cols = {a: data.column(a) for a in self.attribute_pool}
        out = np.empty(len(data), dtype=np.uint8)
        # route row blocks down the tree together
        stack = [(self.root, np.arange(len(data)))]
        while stack:
            node, idx = stack.pop()
            if node.is_leaf or idx.size == 0:
                out[idx] = node.label
                continue
            vals = cols[node.attribute][idx]
            for v in (0, 1):
                stack.append((node.children[v], idx[vals == v]))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "tree", "attribute_pool": list(self.attribute_pool), "root": self.root.to_dict()}


def train_tree(data: Dataset, pool: Iterable[str], max_depth: int | None = None, min_leaf: int = 1,
               allow_protected: bool = False) -> DecisionTree:
    """Greedy information-gain tree with majority-vote leaves.

    A node is split while it is impure, depth remains, and some pool attribute
    gives both children at least ``min_leaf`` rows; zero-gain splits are
    allowed (XOR-style targets need them). Gain ties go to the attribute that
    comes first in the schema. Label ties inherit the parent's label, 1 at the
    root.
    """
    pool = _check_pool(data, pool, allow_protected)
    if not pool:
        raise ParameterError("attribute pool is empty")
    if max_depth is None:
        max_depth = len(pool)
    if max_depth < 1:
        raise ParameterError("max_depth must be at least 1")
    if min_leaf < 1:
        raise ParameterError("min_leaf must be at least 1")
    X = {a: data.column(a) for a in pool}
    y = data.outcome.astype(np.int64)

    def grow(idx: np.ndarray, available: tuple[str, ...], depth: int, parent_label: int) -> Node:
        n, pos = idx.size, int(y[idx].sum())
        label = _majority(pos, n, parent_label)
        node = Node(label, n=n)
        if n == 0 or pos in (0, n) or depth >= max_depth:
            return node
        base = _entropy(pos, n)
        best, best_gain, best_split = None, -1.0, None
        for a in available:
            vals = X[a][idx]
            ones = idx[vals == 1]
            zeros = idx[vals == 0]
            if ones.size < min_leaf or zeros.size < min_leaf:
                continue
            cond = (zeros.size * _entropy(int(y[zeros].sum()), zeros.size)
                    + ones.size * _entropy(int(y[ones].sum()), ones.size)) / n
            gain = base - cond
            if gain > best_gain + 1e-12:
                best, best_gain, best_split = a, gain, (zeros, ones)
        if best is None:
            return node
        rest = tuple(a for a in available if a != best)
        node.attribute = best
        node.children = {0: grow(best_split[0], rest, depth + 1, label),
                         1: grow(best_split[1], rest, depth + 1, label)}
        return node

    root = grow(np.arange(len(data)), pool, 0, 1)
    return DecisionTree(root, pool)


@dataclass
class NaiveBayesModel:
    """Class prior and per-attribute P(A=1 | D=d), all add-``smoothing`` estimates."""

    prior: float
    conditionals: dict[str, tuple[float, float]]  # name -> (P(A=1|D=0), P(A=1|D=1))
    smoothing: float
    attribute_pool: tuple[str, ...]

    def log_odds(self, data: Dataset) -> np.ndarray:
        lo = np.full(len(data), math.log(self.prior) - math.log(1 - self.prior))
        for a in self.attribute_pool:
            q0, q1 = self.conditionals[a]
            x = data.column(a).astype(bool)
            lo += np.where(x, math.log(q1) - math.log(q0), math.log(1 - q1) - math.log(1 - q0))
        return lo

    def predict_array(self, data: Dataset) -> np.ndarray:
        return (self.log_odds(data) > 0).astype(np.uint8)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "naive_bayes", "prior": self.prior, "smoothing": self.smoothing,
                "attribute_pool": list(self.attribute_pool),
                "conditionals": {a: list(v) for a, v in self.conditionals.items()}}


def train_naive_bayes(data: Dataset, pool: Iterable[str], smoothing: float = 1.0,
                      allow_protected: bool = False) -> NaiveBayesModel:
    if not smoothing > 0:
        raise ParameterError("smoothing must be positive")
    pool = _check_pool(data, pool, allow_protected)
    y = data.outcome.astype(bool)
    n1 = int(y.sum())
    n0 = len(data) - n1
    prior = (n1 + smoothing) / (len(data) + 2 * smoothing)
    cond = {}
    for a in pool:
        x = data.column(a).astype(bool)
        c1 = int((x & y).sum())
        c0 = int((x & ~y).sum())
        cond[a] = ((c0 + smoothing) / (n0 + 2 * smoothing), (c1 + smoothing) / (n1 + 2 * smoothing))
    return NaiveBayesModel(prior, cond, smoothing, pool)


@dataclass
class ConstantModel:
    label: int
    attribute_pool: tuple[str, ...] = ()

    def predict_array(self, data: Dataset) -> np.ndarray:
        return np.full(len(data), self.label, dtype=np.uint8)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "constant", "label": self.label}


def train_constant(data: Dataset) -> ConstantModel:
    """Always predicts the majority class (1 on ties)."""
    pos = int(data.outcome.sum())
    return ConstantModel(_majority(pos, len(data), 1))


Model = Union[DecisionTree, NaiveBayesModel, ConstantModel]


def predict(model: Model, data: Dataset) -> Dataset:
    """Replace the outcome column with the model's predictions."""
    for a in model.attribute_pool:
        if a not in data.schema.names:
            raise SchemaError(f"model input {a!r} missing from dataset")
    return data.with_outcome(model.predict_array(data), PREDICTED)


def model_from_dict(d: dict[str, Any]) -> Model:
    kind = d.get("kind")
    if kind == "tree":
        return DecisionTree(Node.from_dict(d["root"]), tuple(d["attribute_pool"]))
    if kind == "naive_bayes":
        return NaiveBayesModel(float(d["prior"]), {a: tuple(v) for a, v in d["conditionals"].items()},
                               float(d["smoothing"]), tuple(d["attribute_pool"]))
    if kind == "constant":
        return ConstantModel(int(d["label"]))
    raise ConfigError(f"unknown model kind {kind!r}")


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> Model:
    try:
        return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"{path}: malformed model file ({exc})") from None
