"""Print the constructed count tables and their exact scores.

    python scripts/construction_demo.py
"""

from fractions import Fraction

from discaudit import AuditConfig, audit_dataset
from discaudit.data import prediction_counts, whole
from discaudit.scoring import model_group_score, model_quality
from discaudit.synthesis import gen_corr_counterexample, gen_figure_fixtures, gen_simpson_merge, gen_simpson_split


def show(title, inst):
    print(title)
    for key in ("e", "e1", "e2"):
        print(f"  {key:2s} counts={getattr(inst, key + '_counts').as_tuple()} score={inst.expected[key]}")


def main():
    show("split, K=3", gen_simpson_split(3))
    merge = gen_simpson_merge(100, 10, Fraction(1, 50), Fraction(1, 20))
    show("merge, K=100 m=10 alpha'=1/50 alpha=1/20", merge)
    d = merge.dataset()
    r = audit_dataset(d, AuditConfig.for_dataset(d))
    r0 = audit_dataset(d, AuditConfig(protected=("P",)))
    print(f"  audited with E: glbds={r.glbds:.6f}, over-limit groups={len(r.over_limit_groups)}")
    print(f"  audited without E: glbds={r0.glbds:.6f}, over-limit groups={len(r0.over_limit_groups)}")

    c = gen_corr_counterexample(2, Fraction(1, 5), 5)
    print("odds ratio vs score, m=2 w=1/5 K=5")
    print(f"  e1={c.e1_counts.as_tuple()} oz={c.oz1} score={c.delta1}")
    print(f"  e2={c.e2_counts.as_tuple()} oz={c.oz2} score={c.delta2}")
    print(f"  dz={c.dz}  |d1|-|d2|={c.ddelta}  closed form={c.closed_form_ddelta}")

    fx = gen_figure_fixtures()
    print("prediction fixtures")
    for base, name in (("fig1a", "fig1b"), ("fig1a", "fig1c"), ("fig1a", "fig1d"), ("fig2a", "fig2a1"),
                       ("table2", "table2_pred")):
        obs = fx[base]
        prot = obs.schema.protected[0]
        pc = prediction_counts(whole(obs), obs, fx[name], prot)
        print(f"  {name:12s} score={model_group_score(pc).value:+.6f} err={model_quality(pc).err:.4f}")


if __name__ == "__main__":
    main()
