import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbalogic import algebra as alg
from nbalogic import power as pw


def m3():
    """The diamond lattice M3 (0, a, b, c, 1) as (join, meet): not distributive."""
    k = 5
    join = np.zeros((k, k), dtype=int)
    meet = np.zeros((k, k), dtype=int)
    for x in range(k):
        for y in range(k):
            if x == y:
                join[x, y] = meet[x, y] = x
            elif 0 in (x, y):
                join[x, y], meet[x, y] = max(x, y), 0
            elif 4 in (x, y):
                join[x, y], meet[x, y] = 4, min(x, y)
            else:
                join[x, y], meet[x, y] = 4, 0
    return join, meet


def test_valid_semirings():
    assert pw.boolean_algebra_semiring(1).size == 2
    Z4 = pw.zmod(4)
    assert Z4.commutative and Z4.sum([3, 3]) == 2 and Z4.prod([2, 2]) == 0
    assert pw.chain_lattice(3).one == 2


def test_distributivity_violation_rejected():
    join, meet = m3()
    with pytest.raises(pw.SemiringError) as info:
        pw.FinSemiring(join, meet, 0, 4)
    assert info.value.law.startswith("SR2")
    x, y, z = info.value.witness
    assert meet[x, join[y, z]] != join[meet[x, y], meet[x, z]]


def test_other_axiom_violations():
    x = np.arange(3)
    with pytest.raises(pw.SemiringError):
        pw.FinSemiring((x[:, None] - x[None, :]) % 3, (x[:, None] * x[None, :]) % 3, 0, 1)
    with pytest.raises(pw.SemiringError):
        pw.FinSemiring((x[:, None] + x[None, :]) % 3, np.ones((3, 3), dtype=int), 0, 1)


def test_q_I_examples():
    R = pw.zmod(4)
    ws = [(1, 2), (3, 0)]
    assert pw.q_I(R, (1, 0), ws, (0, 1)) == (1, 2)
    w = (3, 1)
    assert pw.q_I(R, (3, 2), [w, w], (0, 1)) == w  # 3 + 2 = 1 in Z4


def test_is_I_central_examples():
    B4 = pw.boolean_algebra_semiring(2)
    assert pw.is_I_central(B4, (3, 0), (0, 1))
    assert pw.is_I_central(B4, (1, 2), (0, 1))       # a e1 + a' e2
    assert not pw.is_I_central(B4, (1, 1), (0, 1))   # does not sum to 1
    assert not pw.is_I_central(pw.zmod(4), (2, 3), (0, 1))


@pytest.mark.parametrize("R, vectors, central", [
    (pw.boolean_algebra_semiring(1), 4, 2),
    (pw.boolean_algebra_semiring(2), 16, 4),
    (pw.zmod(4), 16, 2),
    (pw.chain_lattice(3), 9, 2),
])
def test_cross_validation_frozen(R, vectors, central):
    rows = pw.cross_validate_centrality(R, 2)
    assert len(rows) == vectors
    assert all(r.agree for r in rows)
    assert sum(r.by_identities for r in rows) == central


def test_cross_validation_sample():
    R = pw.boolean_algebra_semiring(1)
    assert pw.cross_validate_centrality(R, 2, sample=[]) == []
    (row,) = pw.cross_validate_centrality(R, 2, sample=[(1, 1)])
    assert not row.by_coordinates and not row.by_identities


def test_complemented_core_examples():
    B4 = pw.boolean_algebra_semiring(2)
    assert pw.complemented_core(B4).members == (0, 1, 2, 3)
    assert pw.complemented_core(pw.zmod(4)).members == (0, 1)
    assert pw.complemented_core(pw.chain_lattice(3)).members == (0, 2)
    assert pw.complemented_core(pw.zmod(6)).members == (0, 1, 3, 4)


def test_semiring_power_examples():
    E = alg.generating_algebra(2)
    ER = pw.semiring_power(E, pw.boolean_algebra_semiring(1))
    assert ER.size == 2
    assert pw.semiring_power(2, pw.boolean_algebra_semiring(2)).size == 4
    assert alg.is_nba(ER)
    with pytest.raises(alg.AlgebraError):
        pw.semiring_power(alg.power_algebra(2, 2), pw.zmod(2))


@pytest.mark.parametrize("R", [pw.boolean_algebra_semiring(1), pw.boolean_algebra_semiring(2), pw.zmod(4),
                               pw.chain_lattice(3), pw.zmod(6), pw.chain_lattice(4)],
                         ids=lambda R: R.name)
def test_core_power_equality(R):
    report = pw.compare_core_power(2, R)
    assert report.ok


def test_boolean_power_sizes():
    sizes = [pw.boolean_power(3, pw.boolean_algebra_semiring(k)).semiring_power.size for k in (1, 2, 3)]
    assert sizes == [3, 9, 27]
    bp = pw.boolean_power(2, pw.boolean_algebra_semiring(1))
    assert bp.power.size == 2 and len(bp.atoms) == 1
    with pytest.raises(alg.AlgebraError):
        pw.boolean_power(2, pw.chain_lattice(3))


def test_boolean_power_of_algebra_with_extra_op():
    E = alg.generating_algebra(2).as_table({"neg": np.array([1, 0])})
    bp = pw.boolean_power(E, pw.boolean_algebra_semiring(2))
    assert bp.power.size == 4 and "neg" in bp.semiring_power.ops


def test_foster_examples():
    for n in (2, 3):
        P = alg.generating_algebra(n)
        full = pw.foster_check(P, alg.power_algebra(n, 2))
        assert full.ok and full.atoms == 2 and full.size == n * n
        minimal = pw.foster_check(P, alg.subalgebra(alg.power_algebra(n, 2)))
        assert minimal.ok and minimal.atoms == 1


def test_foster_with_extra_operation():
    P = alg.parse_algebra("n 2\npointwise-power 1\nop neg 1\n0 -> 1\n1 -> 0\n")
    A = alg.parse_algebra("n 2\npointwise-power 2\nop neg 1\n0 -> 3\n1 -> 2\n2 -> 1\n3 -> 0\n")
    assert pw.foster_check(P, A).ok
    with pytest.raises(alg.AlgebraError):
        pw.foster_check(alg.generating_algebra(2), A)


def test_semiring_file_roundtrip(tmp_path):
    R = pw.zmod(4)
    text = pw.dump_semiring(R)
    S = pw.parse_semiring(text)
    assert np.array_equal(S.add, R.add) and np.array_equal(S.mul, R.mul)
    p = tmp_path / "z4.sr"
    p.write_text(text)
    assert pw.load_semiring(str(p)).name == "Z4"


@pytest.mark.parametrize("text", [
    "universe 2\nzero 0\none 1\n",
    "universe 2\nadd 0 0 -> 5\n",
    "semiring X\nadd 0 0 0\n",
    "universe 1\nzero 0\n",
])
def test_semiring_file_errors(text):
    with pytest.raises(pw.SemiringError):
        pw.parse_semiring(text)


def test_centrality_check_over_budget_is_reported(monkeypatch):
    # with a tiny budget B3 for the lifted q cannot be searched, and the check
    # refuses instead of guessing
    monkeypatch.setattr(alg, "ENUM_BUDGET", 50)
    with pytest.raises(alg.CheckTooLarge):
        pw.cross_validate_centrality(pw.zmod(6), 2, sample=[(3, 4)])


def test_every_z6_vector_is_decided():
    rows = pw.cross_validate_centrality(pw.zmod(6), 2)
    assert len(rows) == 36 and all(r.agree for r in rows)
    assert sorted(r.vector for r in rows if r.by_coordinates) == [(0, 1), (1, 0), (3, 4), (4, 3)]


def test_vector_algebra_caps():
    with pytest.raises(alg.AlgebraError):
        pw.vector_algebra(pw.zmod(5), 4)
    with pytest.raises(ValueError):
        pw.vector_algebra(pw.zmod(2), 2, I=(0,))


@settings(max_examples=30)
@given(st.sampled_from(["B4", "Z4", "C3"]), st.data())
def test_centrality_conditions_match_identities(name, data):
    R = {"B4": pw.boolean_algebra_semiring(2), "Z4": pw.zmod(4), "C3": pw.chain_lattice(3)}[name]
    v = data.draw(st.tuples(st.integers(0, R.size - 1), st.integers(0, R.size - 1)))
    (row,) = pw.cross_validate_centrality(R, 2, sample=[v])
    assert row.agree


@given(st.integers(2, 8))
def test_zmod_core_is_boolean(m):
    C = pw.complemented_core(pw.zmod(m))
    assert 0 in C.members and 1 in C.members
    assert all(pw.zmod(m).mul[r, r] == r for r in C.members)
