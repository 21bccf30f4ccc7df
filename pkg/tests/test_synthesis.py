from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discaudit.audit import AuditConfig, audit_dataset
from discaudit.data import CountsTable, counts, prediction_counts, stratify, whole
from discaudit.errors import IntegralityError, ParameterError
from discaudit.scoring import exact_group_score, group_score, model_group_score, odds_ratio, over_limit
from discaudit.synthesis import (gen_corr_counterexample, gen_figure_fixtures, gen_simpson_merge, gen_simpson_split,
                                 materialize, merge_exceeds)


def _materialized_scores(inst):
    """Exact scores of the E=1 part, the E=0 part and the whole, read back from the dataset."""
    d = inst.dataset()
    groups = {g.signature: g for g in stratify(d, ["E"])}
    parts = [counts(groups[(("E", s),)], d, "P") for s in (1, 0)]
    return [exact_group_score(c) for c in parts] + [exact_group_score(counts(whole(d), d, "P"))]


@pytest.mark.parametrize("K", range(1, 101))
def test_split_scores_for_all_k(K):
    inst = gen_simpson_split(K)
    assert inst.e_counts.as_tuple() == (K, K, K, K)
    assert inst.e1_counts.as_tuple() == (K, 0, 0, K)
    assert inst.e2_counts.as_tuple() == (0, K, K, 0)
    s1, s2, s = _materialized_scores(inst)
    assert (s, s1, s2) == (0, 1, -1)


def test_split_audit():
    d = gen_simpson_split(7).dataset()
    r = audit_dataset(d, AuditConfig.for_dataset(d))
    assert r.wgds == 1.0 and r.glbds == 0.0
    assert len(r.over_limit_groups) == 2


@pytest.mark.parametrize("K", [0, -3, 2.5])
def test_split_rejects_bad_k(K):
    with pytest.raises(ParameterError):
        gen_simpson_split(K)


def test_merge_worked_instance():
    inst = gen_simpson_merge(100, 10, Fraction(1, 50), 0.05)
    s1, s2, s = _materialized_scores(inst)
    assert (s1, s2, s) == (0, Fraction(1, 50), Fraction(1, 15))
    assert float(s) == pytest.approx(0.0666666666667, abs=1e-12)
    assert merge_exceeds(inst)
    assert over_limit(inst.e_counts, 0.05)
    assert not over_limit(inst.e1_counts, 0.05) and not over_limit(inst.e2_counts, 0.05)
    assert inst.e1_counts + inst.e2_counts == inst.e_counts


def test_merge_boundary_is_not_over():
    # m = 3*alpha/alpha_prime exactly puts the merged score on alpha
    inst = gen_simpson_merge(100, 15, Fraction(1, 100), 0.05)
    assert inst.expected["e"] == Fraction(1, 20)
    assert not merge_exceeds(inst)
    assert not over_limit(inst.e_counts, 0.05)


def test_merge_accepts_string_rationals():
    a = gen_simpson_merge(50, 5, "1/25", "0.05")
    b = gen_simpson_merge(50, 5, Fraction(1, 25), Fraction(1, 20))
    assert a.e_counts == b.e_counts


def _merge_params():
    """Valid (K, m, alpha_prime) triples: alpha_prime = 1/q with q | K and m <= q."""
    return st.integers(2, 40).flatmap(
        lambda q: st.tuples(st.integers(1, 6).map(lambda j: q * j), st.integers(1, q), st.just(q)))


@settings(max_examples=200, deadline=None)
@given(_merge_params(), st.sampled_from(["0.05", "0.1", "0.02", "1/3"]))
def test_merge_properties(params, alpha):
    K, m, q = params
    ap = Fraction(1, q)
    a = Fraction(alpha)
    if not ap < a:
        with pytest.raises(ParameterError):
            gen_simpson_merge(K, m, ap, a)
        return
    inst = gen_simpson_merge(K, m, ap, a)
    s1, s2, s = _materialized_scores(inst)
    assert (s1, s2, s) == (0, ap, m * ap / 3)
    assert merge_exceeds(inst) == (m > 3 * a / ap)
    assert over_limit(inst.e_counts, a) == (m > 3 * a / ap)
    assert min(inst.e_counts.as_tuple() + inst.e1_counts.as_tuple() + inst.e2_counts.as_tuple()) >= 0


def test_merge_integrality_error_names_the_product():
    with pytest.raises(IntegralityError, match="alpha_prime"):
        gen_simpson_merge(10, 3, Fraction(1, 7), 0.5)


def test_merge_negative_counts_rejected():
    # alpha_prime * m > 1 would need more positives than rows
    with pytest.raises(ParameterError):
        gen_simpson_merge(100, 60, Fraction(1, 50), 0.05)
    assert gen_simpson_merge(100, 50, Fraction(1, 50), 0.05).e1_counts.f01 == 0


def test_merge_alpha_prime_must_be_below_alpha():
    with pytest.raises(ParameterError):
        gen_simpson_merge(100, 2, Fraction(1, 10), 0.05)


def test_merge_audit_cross_check():
    inst = gen_simpson_merge(100, 10, Fraction(1, 50), 0.05)
    d = inst.dataset()
    r = audit_dataset(d, AuditConfig.for_dataset(d))
    assert r.over_limit_groups == []
    assert r.wgds == pytest.approx(1 / 50, abs=1e-12)
    r0 = audit_dataset(d, AuditConfig(explanatory=(), protected=("P",)))
    assert r0.glbds == pytest.approx(1 / 15, abs=1e-12)
    assert len(r0.over_limit_groups) == 1


def test_corr_instance_tables_and_dz():
    inst = gen_corr_counterexample(2, Fraction(1, 5), 5)
    assert inst.e1_counts.as_tuple() == (10, 5, 5, 5)
    assert inst.e2_counts.as_tuple() == (5, 1, 5, 5)
    assert inst.oz1 == 2 and inst.oz2 == 5
    assert inst.dz == -3 and inst.closed_form_dz == -3
    assert inst.in_stated_regime


def test_corr_scores_on_the_tables():
    inst = gen_corr_counterexample(2, Fraction(1, 5), 5)
    assert inst.delta1 == Fraction(2, 3) - Fraction(1, 2)
    assert inst.delta2 == Fraction(1, 2) - Fraction(1, 6)
    assert inst.ddelta == Fraction(-1, 6)
    assert inst.closed_form_ddelta == Fraction(1, 2)
    assert not inst.is_counterexample


def test_less_correlation_more_discrimination_witness():
    # the claim itself holds on other tables: a weakly correlated table with a
    # common outcome against a strongly correlated one with a rare outcome
    weak, strong = CountsTable(2, 1, 1, 1), CountsTable(1, 1, 99, 999)
    assert abs(odds_ratio(weak).value - 1) < abs(odds_ratio(strong).value - 1)
    assert abs(exact_group_score(weak)) > abs(exact_group_score(strong))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12))
def test_stated_tables_never_give_a_counterexample(m, wn, wd):
    # |d1| - |d2| has the sign of m*w - 1 for w <= 1 (as dz does) and of m - w for w > 1,
    # so the family never has dz < 0 together with |d1| > |d2|
    inst = gen_corr_counterexample(m, Fraction(wn, wd), wd)
    sign = lambda x: (x > 0) - (x < 0)
    if inst.w <= 1:
        assert sign(inst.ddelta) == sign(m * inst.w - 1) == sign(inst.dz)
    else:
        assert sign(inst.ddelta) == sign(m - inst.w)
    assert not inst.is_counterexample


def test_corr_symmetric_case():
    inst = gen_corr_counterexample(1, 1, 4)
    assert inst.dz == 0 and inst.ddelta == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(1, 10), st.integers(1, 10), st.integers(1, 5))
def test_corr_values_match_scoring_module(m, wn, wd, k):
    w = Fraction(wn, wd)
    K = wd * k
    inst = gen_corr_counterexample(m, w, K)
    d = inst.dataset()
    groups = {g.signature: g for g in stratify(d, ["E"])}
    c1, c2 = counts(groups[(("E", 1),)], d, "P"), counts(groups[(("E", 0),)], d, "P")
    assert (c1, c2) == (inst.e1_counts, inst.e2_counts)
    oz1, oz2 = odds_ratio(c1).value, odds_ratio(c2).value
    assert abs(abs(oz1 - 1) - abs(oz2 - 1) - float(inst.dz)) <= 1e-12
    assert inst.closed_form_dz == m - 1 / w
    # the reciprocal odds ratio of the second table is what the closed form tracks
    assert inst.oz2 == 1 / w
    dd = abs(group_score(c1).value) - abs(group_score(c2).value)
    assert abs(dd - float(inst.ddelta)) <= 1e-12


def test_corr_errors():
    with pytest.raises(IntegralityError):
        gen_corr_counterexample(2, Fraction(1, 3), 5)
    with pytest.raises(ParameterError):
        gen_corr_counterexample(0, Fraction(1, 5), 5)
    with pytest.raises(ParameterError):
        gen_corr_counterexample(2, 0, 5)


def test_manifests_are_json_ready():
    import json

    json.dumps(gen_simpson_merge(100, 10, Fraction(1, 50), 0.05).manifest())
    json.dumps(gen_corr_counterexample(2, Fraction(1, 5), 5).manifest())
    m = gen_simpson_split(3).manifest()
    assert m["expected_scores"] == {"e": 0.0, "e1": 1.0, "e2": -1.0}


def test_materialize_row_order():
    d = materialize(CountsTable(1, 0, 0, 1), CountsTable(0, 1, 1, 0))
    assert d.values.tolist() == [[1, 1, 1], [0, 0, 1], [1, 0, 0], [0, 1, 0]]


# --- fixtures ---------------------------------------------------------------------


def test_figure_fixture_scores():
    fx = gen_figure_fixtures()
    obs = fx["fig1a"]
    c = counts(whole(obs), obs, "G")
    assert c.as_tuple() == (1, 6, 5, 2)
    assert group_score(c).value == pytest.approx(-7 / 12, abs=1e-12)
    assert round(group_score(c).value, 2) == -0.58

    def pred_score(name, base="fig1a"):
        return model_group_score(prediction_counts(whole(fx[base]), fx[base], fx[name], "G")).value

    assert pred_score("fig1b") == pytest.approx(-0.75, abs=1e-12)
    assert pred_score("fig1c") == pytest.approx(-7 / 12, abs=1e-12)
    assert pred_score("fig1d") == 0.0
    assert group_score(counts(whole(fx["fig2a"]), fx["fig2a"], "G")).value == 0.0
    assert pred_score("fig2a1", "fig2a") == pytest.approx(-0.25, abs=1e-12)


def test_figure2_variant_is_one_error():
    fx = gen_figure_fixtures()
    assert int((fx["fig2a1"].outcome != fx["fig2a"].outcome).sum()) == 1
    assert int((fx["fig1b"].outcome != fx["fig1a"].outcome).sum()) == 1
    assert np.array_equal(fx["fig1c"].outcome, fx["fig1a"].outcome)


def test_example1_and_table2_fixtures():
    fx = gen_figure_fixtures()
    ex = fx["example1"]
    assert len(ex) == 125
    groups = {g.signature: counts(g, ex, "G") for g in stratify(ex, ["S"])}
    assert groups[(("S", 1),)].as_tuple() == (9, 3, 20, 30)
    assert groups[(("S", 0),)].as_tuple() == (1, 12, 20, 30)
    assert fx["table2_pred"].outcome.tolist() == [1, 0, 0, 0]
