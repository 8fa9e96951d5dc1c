import pytest
from hypothesis import given

from nbalogic.hnf import (StepBudgetExceeded, contract_hnf, hnf_normalize, hnf_normalize_by_steps,
                          hnf_reducts, qH, step_hnf)
from nbalogic.semantics import equiv
from nbalogic.term import App, Const, Var, is_hnf, parse, to_str
from strategies import dim_and_term


def P(s, n=2):
    return parse(s, n)


def test_contract_examples():
    assert contract_hnf(P("q(e2, e1, e2)")) is Const(2)
    assert to_str(contract_hnf(P("q(q(x1, e1, e2), e2, e1)"))) == "q(x1, q(e1, e2, e1), q(e2, e2, e1))"
    assert contract_hnf(P("q(x1, e1, e2)")) is None


def test_normalize_examples():
    assert hnf_normalize(P("q(q(x1, e1, e2), e2, e1)")) is P("q(x1, e2, e1)")
    assert hnf_normalize(Var(1)) is Var(1)
    assert hnf_normalize(P("q(e1, q(e2, x1, x2), x3)")) is Var(2)


def test_qH_examples():
    psi = [P("q(x2, e1, e2)"), Var(3)]
    assert qH(Const(2), psi) is Var(3)
    assert to_str(qH(Var(1), psi)) == "q(x1, q(x2, e1, e2), x3)"
    assert qH(P("q(x1, e1, e2)"), [Const(2), Const(1)]) is P("q(x1, e2, e1)")


def test_step_is_none_exactly_on_hnfs():
    assert step_hnf(P("q(x1, e1, e2)")) is None
    assert step_hnf(P("q(e1, x1, x2)")) is Var(1)


def test_app_terms_rejected():
    with pytest.raises(ValueError):
        hnf_normalize(App("not", [Var(1)]))


def test_step_budget():
    t = P("q(q(q(x1, e1, e2), e2, e1), e1, e2)")
    with pytest.raises(StepBudgetExceeded):
        hnf_normalize_by_steps(t, budget=1)


@given(dim_and_term())
def test_output_is_hnf_and_equivalent(nt):
    n, t = nt
    h = hnf_normalize(t)
    assert is_hnf(h)
    assert equiv(t, h, n)


@given(dim_and_term())
def test_structural_pass_matches_rewriting(nt):
    n, t = nt
    h, steps = hnf_normalize_by_steps(t)
    assert h is hnf_normalize(t)
    assert (steps == 0) == is_hnf(t)


@given(dim_and_term())
def test_idempotent(nt):
    n, t = nt
    h = hnf_normalize(t)
    assert hnf_normalize(h) is h


@given(dim_and_term())
def test_every_reduct_has_the_same_normal_form(nt):
    n, t = nt
    h = hnf_normalize(t)
    for pos, r in hnf_reducts(t):
        assert hnf_normalize(r) is h
