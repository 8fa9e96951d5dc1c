import pickle

import pytest
from hypothesis import given, strategies as st

from nbalogic.term import (App, Const, ParseError, Permutation, Q, Var, apply_permutation, is_app_free,
                           is_hnf, parse, positions, replace_at, size, subterm_at, substitute, to_str,
                           variables)
from nbalogic.semantics import evaluate
from strategies import dim_and_term, formulas, q_terms


def test_parse_examples():
    assert parse("q(x1, e1, e2)", 2) is Q(Var(1), [Const(1), Const(2)])
    t = parse("or(x1, not(x2))", 2, {"or": 2, "not": 1})
    assert t is App("or", [Var(1), App("not", [Var(2)])])


@pytest.mark.parametrize("text, n", [
    ("e3", 2),             # constant out of range
    ("q(x1, e1)", 2),      # wrong q arity
    ("x0", 2),
    ("x01", 2),
    ("foo(x1)", 2),        # unknown connective
    ("q(x1, e1, e2) x2", 2),
    ("q(x1, e1, e2", 2),
    ("x1 + x2", 2),
    ("", 2),
])
def test_parse_errors(text, n):
    with pytest.raises(ParseError):
        parse(text, n)


def test_parse_error_reports_offset():
    with pytest.raises(ParseError) as info:
        parse("q(x1, e1, e9)", 2)
    assert info.value.position == 10


def test_dimension_must_be_at_least_two():
    with pytest.raises(ValueError):
        parse("x1", 1)


def test_print_examples():
    assert to_str(Q(Var(1), [Const(1), Const(2)])) == "q(x1, e1, e2)"
    assert to_str(Const(3)) == "e3"
    assert to_str(Var(7)) == "x7"


def test_whitespace_insensitive():
    assert parse(" q ( x1 ,e1,  e2 ) ", 2) is parse("q(x1,e1,e2)", 2)


def test_hash_consing():
    a = Q(Var(1), [Const(1), Const(2)])
    b = Q(Var(1), (Const(1), Const(2)))
    assert a is b
    assert hash(a) == hash(b)
    assert pickle.loads(pickle.dumps(a)) is a
    with pytest.raises(AttributeError):
        a.head = Var(2)


def test_substitute_examples():
    t = parse("q(x1, x2, x1)", 2)
    assert to_str(substitute(t, {1: Const(1)})) == "q(e1, x2, e1)"
    assert substitute(Var(1), {}) is Var(1)
    u = substitute(parse("q(x1, e1, e2)", 2), {1: parse("q(x2, e2, e1)", 2)})
    assert to_str(u) == "q(q(x2, e2, e1), e1, e2)"


def test_substitution_is_simultaneous():
    t = parse("q(x1, x2, x1)", 2)
    assert to_str(substitute(t, {1: Var(2), 2: Var(1)})) == "q(x2, x1, x2)"


def test_apply_permutation_examples():
    sigma = Permutation((2, 1))
    assert to_str(apply_permutation(Var(1), sigma)) == "q(x1, e2, e1)"
    assert to_str(apply_permutation(Var(1), Permutation.identity(2))) == "q(x1, e1, e2)"
    rho = Permutation((2, 3, 1))
    for i in (1, 2, 3):
        assert evaluate(apply_permutation(Const(i), rho), {}, 3) == rho(i)


def test_permutation_algebra():
    perms = Permutation.all(3)
    assert len(perms) == 6
    for s in perms:
        assert s.compose(s.inverse()) == Permutation.identity(3)
        for t in perms:
            assert s.compose(t)(1) == s(t(1))
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_is_hnf_examples():
    assert is_hnf(parse("q(x1, e1, e2)", 2))
    assert not is_hnf(parse("q(q(x1, e1, e2), e1, e2)", 2))
    assert is_hnf(Const(2))


def test_variables_examples():
    assert variables(parse("q(x3, x1, x3)", 2)) == (1, 3)
    assert variables(Const(1)) == ()
    assert variables(parse("q(x2, q(x1, e1, e2), e1)", 2)) == (1, 2)


def test_size_counts_tree_nodes():
    shared = parse("q(x1, e1, e2)", 2)
    assert size(Q(Var(2), [shared, shared])) == 3
    assert size(Var(1)) == 0


def test_positions_and_replace():
    t = parse("q(x1, q(x2, e1, e2), e2)", 2)
    ps = list(positions(t))
    assert ps[0] == ()
    assert subterm_at(t, (1, 0)) is Var(2)
    assert to_str(replace_at(t, (1,), Const(1))) == "q(x1, e1, e2)"
    assert len(ps) == 7


@given(dim_and_term())
def test_roundtrip_q_terms(nt):
    n, t = nt
    assert parse(to_str(t), n) is t


@given(formulas({"and": 2, "not": 1, "maj": 3}))
def test_roundtrip_formulas(phi):
    sig = {"and": 2, "not": 1, "maj": 3}
    assert parse(to_str(phi), 2, sig) is phi
    assert not is_app_free(phi) or isinstance(phi, Var)


@given(dim_and_term(), st.data())
def test_replace_at_then_subterm(nt, data):
    n, t = nt
    pos = data.draw(st.sampled_from(list(positions(t))))
    new = Const(1)
    assert subterm_at(replace_at(t, pos, new), pos) is new
    assert replace_at(t, pos, subterm_at(t, pos)) is t


@given(q_terms(2))
def test_substitute_identity(t):
    assert substitute(t, {i: Var(i) for i in variables(t)}) is t
