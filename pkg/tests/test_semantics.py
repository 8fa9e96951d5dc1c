import numpy as np
import pytest
from hypothesis import given

from nbalogic.semantics import (MatrixJudgement, OracleLimitError, countermodel, environments, equiv,
                                evaluate, models, truth_table)
from nbalogic.term import Const, Q, Var, parse, variables
from strategies import dim_and_term


def test_evaluate_examples():
    assert evaluate(parse("q(e1, e2, e1)", 2), {}, 2) == 2
    assert evaluate(parse("q(x1, e1, e2)", 2), {1: 2}, 2) == 2
    # Ł3 negation at value 0
    assert evaluate(parse("q(x1, e3, e2, e1)", 3), {1: 1}, 3) == 3


def test_evaluate_rejects_unbound_and_out_of_range():
    with pytest.raises((KeyError, ValueError)):
        evaluate(Var(1), {}, 2)
    with pytest.raises(ValueError):
        evaluate(Var(1), {1: 3}, 2)


def test_models_examples():
    assert not models([], parse("q(x1, e1, e2)", 2), 2, 2)
    assert countermodel([], parse("q(x1, e1, e2)", 2), 2, 2) == {1: 1}
    assert models([Var(1)], Var(1), 3)
    assert models(MatrixJudgement([Var(1)], Var(1), 3), 3)
    # Ł3 implication x1 -> x1 in its q-form
    imp = parse("q(x1, q(x1, e3, e3, e3), q(x1, e2, e3, e3), q(x1, e1, e2, e3))", 3)
    assert models([], imp, 3, 3)


def test_equiv_examples():
    assert equiv(parse("q(x1, e1, e2)", 2), Var(1), 2)
    assert equiv(parse("q(x1, x2, x2)", 2), Var(2), 2)
    assert not equiv(Var(1), Var(2), 2)


def test_truth_table_order_first_variable_slowest():
    t = parse("q(x1, x2, e2)", 2)  # CL disjunction
    assert truth_table(t, 2).tolist() == [1, 2, 2, 2]
    assert truth_table(Var(2), 2, (1, 2)).tolist() == [1, 2, 1, 2]


def test_environments_order():
    envs = list(environments((1, 3), 2))
    assert envs == [{1: 1, 3: 1}, {1: 1, 3: 2}, {1: 2, 3: 1}, {1: 2, 3: 2}]


def test_oracle_variable_cap():
    big = Var(1)
    for i in range(2, 15):
        big = Q(Var(i), [big, Const(1)])
    with pytest.raises(OracleLimitError):
        truth_table(big, 2)


def test_designated_range_checked():
    with pytest.raises(ValueError):
        models([], Var(1), 2, 3)


@given(dim_and_term())
def test_vectorized_table_matches_pointwise_evaluation(nt):
    n, t = nt
    vs = variables(t)
    table = truth_table(t, n, vs)
    expected = [evaluate(t, rho, n) for rho in environments(vs, n)]
    assert np.array_equal(table, expected)


@given(dim_and_term())
def test_countermodel_is_a_countermodel(nt):
    n, t = nt
    cm = countermodel([], t, n, n)
    if cm is None:
        assert models([], t, n)
    else:
        assert evaluate(t, {**{v: 1 for v in variables(t)}, **cm}, n) != n
