"""Audit the German credit data, sweep part of its explanatory set, and audit
three baseline classifiers trained on it.

    python scripts/german_demo.py [--sweep-k 6]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from discaudit import AuditConfig, audit_dataset, audit_predictions, sweep_explanatory
from discaudit.classifiers import predict, train_constant, train_naive_bayes, train_tree
from discaudit.ingest import SchemaConfig, binarize, load_raw

DATA = Path(__file__).resolve().parents[1] / "data"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sweep-k", type=int, default=6, help="sweep over the first k explanatory attributes")
    ap.add_argument("--alpha", type=float, default=0.05)
    args = ap.parse_args()

    config = SchemaConfig.load(DATA / "german_schema.json")
    data = binarize(load_raw(DATA / "german.csv"), config)
    cfg = AuditConfig.for_dataset(data, alpha=args.alpha)

    rep = audit_dataset(data, cfg)
    print(f"{len(data)} rows, {len(cfg.explanatory)} explanatory attributes")
    print(f"glbds={rep.glbds:.6f} ({rep.glbds_attribute})  wgds={rep.wgds:.6f} wg%={rep.wg_pct:.4f}  "
          f"ogds={rep.ogds}  og%={rep.og_pct:.4f}")
    print("attribute scores:", {k: round(v, 6) for k, v in rep.attribute_scores.items()})
    worst = sorted(rep.over_limit_groups, key=lambda g: (-abs(g.score), -g.size))[:5]
    for g in worst:
        print(f"  over limit: size={g.size:3d} score={g.score:+.3f} counts={g.counts.as_tuple()}")

    sub = replace(cfg, explanatory=cfg.explanatory[:args.sweep_k])
    print(f"\nsweep over {list(sub.explanatory)}")
    for e in sweep_explanatory(data, sub).entries:
        print(f"  k={e.k} avg|glbds|={e.avg_abs_score:.6f} subsets={e.n_subsets} "
              f"mean groups={e.mean_groups:.1f} median size={e.median_group_size}")

    expl = list(cfg.explanatory)
    models = {
        "tree(depth 4)": train_tree(data, expl, max_depth=4, min_leaf=5),
        "naive bayes": train_naive_bayes(data, expl),
        "constant": train_constant(data),
        "tree on protected + 2 expl.": train_tree(data, list(cfg.protected) + expl[:2], max_depth=4, min_leaf=5,
                                                 allow_protected=True),
    }
    print("\nmodels (audited with the full explanatory set)")
    for name, model in models.items():
        prep, q = audit_predictions(data, predict(model, data), cfg)
        bcr = "n/a" if q.bcr is None else f"{q.bcr:.4f}"
        print(f"  {name:28s} glbds={prep.glbds:+.6f} wgds={prep.wgds:.4f} bcr={bcr} err={q.err:.4f}")


if __name__ == "__main__":
    main()
