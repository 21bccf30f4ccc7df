"""Command-line entry point.

Every command writes its outputs plus a ``manifest.json`` into ``--out-dir``.
Exit codes: 0 ok, 1 configuration error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .audit import AuditConfig, audit_dataset, audit_predictions, render_report, sweep_explanatory
from .classifiers import load_model, predict, train_constant, train_naive_bayes, train_tree
from .data import PREDICTED, Dataset
from .errors import AlignmentError, AuditError, ConfigError
from .ingest import SchemaConfig, binarize, fit_rules, load_raw, validate
from .synthesis import (gen_corr_counterexample, gen_figure_fixtures, gen_simpson_merge, gen_simpson_split,
                        merge_exceeds)

log = logging.getLogger("discaudit")


def _split_names(s: str | None) -> list[str] | None:
    if s is None:
        return None
    return [n.strip() for n in s.split(",") if n.strip()]


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects outputs in memory and writes them only once the command succeeded."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.out_dir = Path(args.out_dir)
        self.files: dict[str, str] = {}
        self.inputs: dict[str, str] = {}
        self.params: dict[str, Any] = {}
        self.extra: dict[str, Any] = {}

    def add_input(self, role: str, path) -> None:
        if path is not None:
            self.inputs[role] = str(path)

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def commit(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "command": self.args.command,
            "tool_version": __version__,
            "inputs": self.inputs,
            "input_digests": {k: _digest(Path(v)) for k, v in self.inputs.items()},
            "schema_digest": _digest(Path(self.args.schema)) if getattr(self.args, "schema", None) else None,
            "params": self.params,
            "outputs": sorted(self.files) + ["manifest.json"],
        }
        manifest.update(self.extra)
        self.files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        tmps = []
        for name, text in self.files.items():
            tmp = self.out_dir / (name + ".tmp")
            tmp.write_text(text, encoding="utf-8")
            tmps.append((tmp, self.out_dir / name))
        for tmp, final in tmps:
            tmp.replace(final)


def _load(args, path) -> tuple[Dataset, SchemaConfig]:
    config = SchemaConfig.load(args.schema)
    raw = load_raw(path, args.delimiter)
    data = binarize(raw, config)
    data = _override_roles(args, data)
    return data, config


def _override_roles(args, data: Dataset) -> Dataset:
    protected = _split_names(getattr(args, "protected", None))
    explanatory = _split_names(getattr(args, "explanatory", None))
    if protected is None and explanatory is None:
        return data
    return data.with_schema(data.schema.reassign(protected, explanatory))


def _audit_config(args, data: Dataset) -> AuditConfig:
    return AuditConfig.for_dataset(data, alpha=args.alpha, top_k=args.top_k, min_group_size=args.min_group_size)


def _config_params(cfg: AuditConfig, args) -> dict[str, Any]:
    return {"alpha": cfg.alpha, "explanatory": list(cfg.explanatory), "protected": list(cfg.protected),
            "top_k": cfg.top_k, "min_group_size": cfg.min_group_size, "seed": args.seed,
            "format": args.format}


def cmd_audit(args) -> int:
    run = Run(args)
    run.add_input("data", args.data)
    data, config = _load(args, args.data)
    cfg = _audit_config(args, data)
    report = audit_dataset(data, cfg)
    run.params = _config_params(cfg, args)
    run.extra["validation"] = vars(validate(data, config))
    run.add(f"report.{args.format}", render_report(report, args.format))
    run.commit()
    print(f"glbds={report.glbds:.6f} ({report.glbds_attribute}) wgds={report.wgds:.6f} "
          f"og_pct={report.og_pct:.6f} -> {run.out_dir}")
    return 0


def _read_predictions(args, observed: Dataset, config: SchemaConfig) -> Dataset:
    if args.model:
        return predict(load_model(args.model), observed)
    raw = load_raw(args.predicted, args.delimiter)
    outcome = observed.schema.outcome
    if len(raw.header) == 1 and raw.header[0] in (outcome, "prediction"):
        col = raw.column(raw.header[0])
        if len(col) != len(observed):
            raise AlignmentError(f"{len(col)} predictions for {len(observed)} rows")
        bad = [v for v in col if v not in ("0", "1")]
        if bad:
            raise AlignmentError(f"prediction values must be 0 or 1, found {bad[0]!r}")
        return observed.with_outcome([int(v) for v in col], PREDICTED)
    obs_raw = load_raw(args.data, args.delimiter)
    pred = binarize(raw, config, fitted=fit_rules(obs_raw, config))
    if len(pred) != len(observed):
        raise AlignmentError(f"{len(pred)} predicted rows for {len(observed)} observed rows")
    return Dataset(observed.schema, pred.values, PREDICTED)


def cmd_audit_predictions(args) -> int:
    if bool(args.predicted) == bool(args.model):
        raise ConfigError("give exactly one of --predicted or --model")
    run = Run(args)
    run.add_input("data", args.data)
    run.add_input("predicted", args.predicted)
    run.add_input("model", args.model)
    observed, config = _load(args, args.data)
    predicted = _read_predictions(args, observed, config)
    cfg = _audit_config(args, observed)
    report, quality = audit_predictions(observed, predicted, cfg)
    run.params = _config_params(cfg, args)
    run.add(f"report.{args.format}", render_report(report, args.format))
    run.commit()
    bcr = "undefined" if quality.bcr is None else f"{quality.bcr:.6f}"
    print(f"glbds={report.glbds:.6f} ({report.glbds_attribute}) bcr={bcr} err={quality.err:.6f} -> {run.out_dir}")
    return 0


def cmd_train(args) -> int:
    run = Run(args)
    run.add_input("data", args.data)
    data, _ = _load(args, args.data)
    pool = _split_names(args.pool) or data.schema.explanatory
    if args.kind == "tree":
        model = train_tree(data, pool, args.max_depth, args.min_leaf, args.allow_protected)
    elif args.kind == "naive-bayes":
        model = train_naive_bayes(data, pool, args.smoothing, args.allow_protected)
    else:
        model = train_constant(data)
    run.params = {"kind": args.kind, "pool": list(getattr(model, "attribute_pool", ())),
                  "max_depth": args.max_depth, "min_leaf": args.min_leaf, "smoothing": args.smoothing,
                  "allow_protected": args.allow_protected, "seed": args.seed}
    run.add("model.json", json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n")
    run.commit()
    print(f"trained {args.kind} -> {run.out_dir / 'model.json'}")
    return 0


def cmd_predict(args) -> int:
    run = Run(args)
    run.add_input("data", args.data)
    run.add_input("model", args.model)
    data, _ = _load(args, args.data)
    pred = predict(load_model(args.model), data)
    run.params = {"seed": args.seed}
    run.add("predictions.csv", "prediction\n" + "".join(f"{int(v)}\n" for v in pred.outcome))
    run.commit()
    print(f"{len(pred)} predictions -> {run.out_dir / 'predictions.csv'}")
    return 0


def cmd_sweep(args) -> int:
    run = Run(args)
    run.add_input("data", args.data)
    data, _ = _load(args, args.data)
    cfg = _audit_config(args, data)
    result = sweep_explanatory(data, cfg)
    run.params = _config_params(cfg, args)
    run.add("sweep.csv", render_report(result, "csv"))
    run.add("sweep.json", render_report(result, "json"))
    run.add("sweep.dat", render_report(result, "plot-data"))
    run.commit()
    for e in result.entries:
        print(f"k={e.k} avg_abs_score={e.avg_abs_score:.6f} n_subsets={e.n_subsets}")
    return 0


def _dataset_csv(data: Dataset) -> str:
    lines = [",".join(data.schema.names)] + [",".join(map(str, r)) for r in data.values.tolist()]
    return "\n".join(lines) + "\n"


def _schema_json(data: Dataset) -> str:
    return json.dumps(SchemaConfig.identity(data.schema).to_dict(), indent=2) + "\n"


def cmd_synth(args) -> int:
    run = Run(args)
    if args.kind == "simpson-split":
        inst = gen_simpson_split(args.K)
        run.extra["instance"] = inst.manifest()
        data = inst.dataset()
    elif args.kind == "simpson-merge":
        inst = gen_simpson_merge(args.K, args.m, Fraction(args.alpha_prime), Fraction(str(args.alpha)))
        run.extra["instance"] = dict(inst.manifest(), merged_over_limit=merge_exceeds(inst))
        data = inst.dataset()
    elif args.kind == "corr":
        inst = gen_corr_counterexample(args.m, Fraction(args.w), args.K)
        run.extra["instance"] = inst.manifest()
        data = inst.dataset()
    else:
        fixtures = gen_figure_fixtures()
        for name, ds in fixtures.items():
            run.add(f"{name}.csv", _dataset_csv(ds))
            run.add(f"{name}.schema.json", _schema_json(ds))
        run.extra["fixtures"] = sorted(fixtures)
        run.commit()
        print(f"{len(fixtures)} fixtures -> {run.out_dir}")
        return 0
    run.params = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items()
                  if k in ("K", "m", "w", "alpha_prime", "alpha", "seed")}
    run.add("dataset.csv", _dataset_csv(data))
    run.add("schema.json", _schema_json(data))
    run.commit()
    print(json.dumps(run.extra["instance"].get("expected_scores", {})))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True, audit=True):
        if data:
            p.add_argument("data", help="delimited input file with a header row")
            p.add_argument("--schema", required=True, help="schema config JSON")
            p.add_argument("--delimiter", default=",")
            p.add_argument("--protected", help="comma-separated names; overrides schema roles")
            p.add_argument("--explanatory", help="comma-separated names; overrides schema roles")
        if audit:
            p.add_argument("--alpha", type=float, default=0.05)
            p.add_argument("--top-k", type=int, default=3)
            p.add_argument("--min-group-size", type=int, default=1)
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out-dir", default="out")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("audit", help="audit the observed outcomes of a dataset")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("audit-predictions", help="audit predictions against observed data")
    common(p)
    p.add_argument("--predicted", help="predictions file: same columns as the data, or one 0/1 column")
    p.add_argument("--model", help="model JSON to apply to the data instead")
    p.set_defaults(func=cmd_audit_predictions)

    p = sub.add_parser("train", help="train a baseline classifier")
    common(p, audit=False)
    p.add_argument("--kind", choices=("tree", "naive-bayes", "constant"), default="tree")
    p.add_argument("--pool", help="comma-separated input attributes (default: all explanatory)")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--allow-protected", action="store_true", help="permit protected attributes as inputs")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write a model's predictions for a dataset")
    common(p, audit=False)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="average global score by number of explanatory attributes")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate constructed datasets with known scores")
    p.add_argument("kind", choices=("simpson-split", "simpson-merge", "corr", "figures"))
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--w", default="1/5", help="rational, e.g. 1/5")
    p.add_argument("--alpha-prime", default="1/50", help="rational, e.g. 1/50")
    p.add_argument("--alpha", type=float, default=0.05)
    common(p, data=False, audit=False)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, OSError) else 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
