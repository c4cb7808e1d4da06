from fractions import Fraction
from itertools import product

import pytest

from doubleore.catalog import builtin, right_only
from doubleore.dedata import check_r3_by_ambiguity, check_r3_formulas
from doubleore.exactla import QQ, ExactMatrix, PrimeField, rank
from doubleore.extension import (ValidationFailed, build, certify_double, certify_free_rank3,
                                 certify_hilbert, certify_pbw, factor_ring_check, left_form,
                                 noetherian_condition)
from doubleore.ncalg import NcPoly


def test_presentation_bh_rules_and_provenance(bh):
    assert bh.rules_text() == [
        "x2*x1 -> -x1*x2", "y2*y1 -> -y1*y2",
        "y1*x1 -> 2*x2*y1 + 2*x1*y2 + 2*x1*y1", "y1*x2 -> 2*x1*y2",
        "y2*x1 -> 2*x2*y1", "y2*x2 -> 2*x2*y2 - 2*x2*y1 - 2*x1*y2"]
    assert bh.provenance == ["base", "R1", "R2", "R2", "R2", "R2"]


def test_presentation_trivial_single_rule():
    b = build(builtin("trivial").data)
    assert b.rules_text() == ["y2*y1 -> y1*y2"]
    assert b.provenance == ["R1"]


def test_presentation_b4_tail_order():
    b = build(builtin("B4", {"a": 2}).data)
    assert b.rules_text()[0] == "y2*y1 -> y1*y2 + y1*y1 + 1/2*x*y2 + 2*x*y1 + x*x"


def test_build_rejects_broken_sigma():
    d = builtin("Bh").data
    sig = {g: [row[:] for row in m] for g, m in d.sigma.items()}
    sig[0][0][0] = sig[0][0][0] + NcPoly({(1,): QQ.one})
    with pytest.raises(ValidationFailed) as e:
        build(d.copy(sigma=sig))
    assert e.value.report.verdict == "fail"


def test_pbw_and_hilbert_bh(bh):
    pbw = certify_pbw(bh, 5)
    assert pbw.passed and pbw.details["counts"] == [1, 4, 10, 20, 35, 56]
    hil = certify_hilbert(bh, 5)
    assert hil.passed and hil.details["found"] == [1, 4, 10, 20, 35, 56]


@pytest.mark.parametrize("name,params", [("B1", {}), ("B1", {"c": 5}), ("B2", {"c": 2}),
                                         ("B3", {}), ("B4", {"a": 2}), ("B4", {"a": 2, "c": 3})])
def test_pbw_over_polynomial_ring(name, params):
    b = build(builtin(name, params).data)
    rep = certify_pbw(b, 5)
    assert rep.passed and rep.details["counts"] == [1, 3, 6, 10, 15, 21]
    assert certify_hilbert(b, 5).passed


def test_pbw_over_f7(bh_f5):
    assert certify_pbw(bh_f5, 4).passed


def test_free_rank3_right_only_fails():
    rep = certify_free_rank3(build(right_only()), 3)
    assert not rep.passed
    assert rep.witnesses[0] == {"degree": 2, "reason": "left map not injective",
                                "rank": 6, "domain": 8}


def test_right_only_is_not_double():
    b = build(right_only())
    assert not certify_double(b, 3).passed
    assert not noetherian_condition(b).passed


def test_double_bh_left_form(bh):
    rep = certify_double(bh, 4)
    assert rep.passed
    assert rep.details["left_form"]["p12'"] == "-1"
    assert rep.details["left_form"]["resubstitution_ok"] is True


def test_left_form_b1_is_inverse_of_p():
    for F, want in ((QQ, Fraction(1, 2)), (PrimeField(7), PrimeField(7)(4))):
        b = build(builtin("B1", {"p": 2, "b": 3, "c": 5}, F).data)
        lf = left_form(b)
        assert lf["p12'"] == want and lf["resubstitution_ok"]


def test_double_b4_without_phi():
    b = build(builtin("B4", {"a": 2}).data)
    rep = certify_double(b, 4)
    assert rep.passed
    assert any("sigma inverse not constructed" in n for n in rep.notes)


def test_trivial_p12_zero():
    b = build(builtin("trivial", {"p12": 0, "p11": 1}).data)
    assert not certify_double(b, 3).passed
    fr = factor_ring_check(b)
    assert fr.passed and "fails noetherian necessary condition (p12 = 0)" in fr.notes
    assert not noetherian_condition(b).passed


def test_factor_ring_b4():
    rep = factor_ring_check(build(builtin("B4", {"a": 2}).data))
    assert rep.passed and rep.details["relation"] == "y2*y1 - y1*y2 - y1*y1"


# --- the B4 family: an independent ideal computation in the free algebra ------------------

def _free_quotient_dim(relations, letters, degree):
    """dim of k<letters>/(relations) in ``degree``, relations homogeneous quadratic dicts."""
    words = ["".join(w) for w in product(letters, repeat=degree)]
    idx = {w: i for i, w in enumerate(words)}
    cols = []
    for r in relations:
        for k in range(degree - 1):
            for pre in product(letters, repeat=k):
                for post in product(letters, repeat=degree - 2 - k):
                    v = [Fraction(0)] * len(words)
                    for w, c in r.items():
                        v[idx["".join(pre) + w + "".join(post)]] += c
                    cols.append(v)
    m = ExactMatrix.from_columns(QQ, cols, len(words))
    return len(words) - rank(m)


def _b4_relations(a, b, c):
    # letters: x, u = y1, v = y2; relations written as lhs - rhs
    s21 = 2 + Fraction(2) / b
    return [
        {"ux": 1, "xu": -1, "xx": -b},
        {"vx": 1, "xu": -s21, "xv": -1},
        {"vu": 1, "uv": -1, "uu": -1, "xu": -a, "xv": -Fraction(b) / (1 + b), "xx": -c},
    ]


@pytest.mark.parametrize("a,dim3", [(1, 9), (2, 10), (3, 9)])
def test_b4_degree_three_dimension(a, dim3):
    rels = _b4_relations(a, 1, 1)
    assert _free_quotient_dim(rels, "xuv", 2) == 6
    assert _free_quotient_dim(rels, "xuv", 3) == dim3


@pytest.mark.parametrize("a", [1, 3, -1])
def test_b4_r3_fails_off_a_equal_two(a):
    d = builtin("B4", {"a": a, "b": 1, "c": 1}).data
    f, amb = check_r3_formulas(d), check_r3_by_ambiguity(d)
    assert not f.passed and not amb.passed
    with pytest.raises(ValidationFailed):
        build(d)


def test_b4_r3_residual_is_b_times_a_minus_two():
    for a, b in ((1, 1), (3, 2), (5, 4)):
        d = builtin("B4", {"a": a, "b": b, "c": 1}).data
        res = {w["residual"] for w in check_r3_formulas(d).witnesses}
        want = QQ(b) * (a - 2)
        assert res == {NcPoly({(0, 0, 0): want}).render(d.base.alphabet)} or \
            res == {NcPoly({(0, 0, 0): -want}).render(d.base.alphabet)}
