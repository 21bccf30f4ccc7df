"""Time stratification plus a full audit on a synthetic census-sized table.

    python scripts/scale_check.py [--rows 700000] [--explanatory 8]
"""

import argparse
import time

import numpy as np

from discaudit import AuditConfig, audit_dataset
from discaudit.data import Dataset, Schema, stratify


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=700_000)
    ap.add_argument("--explanatory", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    schema = Schema.from_roles("D", protected=["P0", "P1"],
                               explanatory=[f"E{i}" for i in range(args.explanatory)])
    rates = rng.uniform(0.1, 0.9, size=len(schema.names))
    data = Dataset(schema, (rng.random((args.rows, len(schema.names))) < rates).astype(np.uint8))
    t0 = time.perf_counter()
    groups = stratify(data, schema.explanatory)
    t1 = time.perf_counter()
    rep = audit_dataset(data, AuditConfig.for_dataset(data))
    t2 = time.perf_counter()
    print(f"{args.rows} rows x {len(schema.names)} attributes: {len(groups)} groups")
    print(f"stratify {t1 - t0:.2f} s, audit {t2 - t1:.2f} s, glbds={rep.glbds:.6f}")


if __name__ == "__main__":
    main()
