"""Finite semirings, free semimodules and semiring powers.

A vector of the free R-semimodule on a finite basis E is a tuple of semiring
element ids, one per basis element (basis positions are element ids of E).
Semirings need not be commutative; products are always taken left to right.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import (
    AlgebraError, FinAlgebra, FinBooleanAlgebra, InvariantViolation, PowerAlgebra,
    check_boolean_axioms, coordinate_boolean_algebra, coordinate_matrix, generating_algebra,
    is_central, is_nba, pointwise_power,
)

__all__ = [
    "SemiringError", "FinSemiring", "boolean_algebra_semiring", "zmod", "chain_lattice",
    "semiring_from_boolean_algebra", "parse_semiring", "load_semiring", "dump_semiring",
    "q_I", "is_I_central", "VectorAlgebra", "vector_algebra", "CentralityRow",
    "cross_validate_centrality", "complemented_core", "e_central_vectors", "semiring_power",
    "CorePowerReport", "compare_core_power", "atoms", "BooleanPower", "boolean_power",
    "FosterReport", "foster_check",
]

MAX_SEMIRING = 256
MAX_VECTORS = 512


class SemiringError(ValueError):
    def __init__(self, law: str, witness: tuple = ()):
        self.law = law
        self.witness = witness
        super().__init__(f"{law} fails at {witness}" if witness else law)


class FinSemiring:
    """A finite semiring given by its tables; the axioms are verified on construction."""

    def __init__(self, add, mul, zero: int, one: int, labels: Sequence[str] | None = None,
                 name: str = "R"):
        add = np.asarray(add, dtype=np.int64)
        mul = np.asarray(mul, dtype=np.int64)
        k = add.shape[0] if add.ndim == 2 else 0
        if not 1 <= k <= MAX_SEMIRING:
            raise SemiringError(f"universe size must be in 1..{MAX_SEMIRING}")
        for t, what in ((add, "add"), (mul, "mul")):
            if t.shape != (k, k) or t.min() < 0 or t.max() >= k:
                raise SemiringError(f"{what} table must map pairs of 0..{k - 1} into 0..{k - 1}")
        if not (0 <= zero < k and 0 <= one < k):
            raise SemiringError("zero and one must be elements")
        self.add, self.mul = add, mul
        self.zero, self.one = int(zero), int(one)
        self.size = k
        self.labels = list(labels) if labels is not None else [str(i) for i in range(k)]
        self.name = name
        self._verify()

    def __repr__(self):
        return f"<FinSemiring {self.name}: |R|={self.size}>"

    def label(self, r: int) -> str:
        return self.labels[r]

    def _verify(self):
        k, A, M, z, o = self.size, self.add, self.mul, self.zero, self.one
        x = np.arange(k)
        X, Y = np.meshgrid(x, x, indexing="ij")

        def need(ok, law, *where):
            if not np.all(ok):
                idx = tuple(int(w[np.unravel_index(np.flatnonzero(~np.asarray(ok))[0], np.shape(ok))])
                            for w in where)
                raise SemiringError(law, idx)

        need(A[X, Y] == A[Y, X], "addition commutative", X, Y)
        need(A[x, z] == x, "0 is an additive unit", x)
        need(M[x, o] == x, "1 is a right unit", x)
        need(M[o, x] == x, "1 is a left unit", x)
        need(M[x, z] == z, "SR1 x0 = 0", x)
        need(M[z, x] == z, "SR1 0x = 0", x)
        for w in range(k):
            W = np.full_like(X, w)
            need(A[A[X, Y], w] == A[X, A[Y, w]], "addition associative", X, Y, W)
            need(M[M[X, Y], w] == M[X, M[Y, w]], "multiplication associative", X, Y, W)
            need(M[w, A[X, Y]] == A[M[w, X], M[w, Y]], "SR2 x(y+z) = xy+xz", W, X, Y)
            need(M[A[X, Y], w] == A[M[X, w], M[Y, w]], "SR3 (y+z)x = yx+zx", X, Y, W)

    @property
    def commutative(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def sum(self, items: Iterable[int]) -> int:
        acc = self.zero
        for r in items:
            acc = int(self.add[acc, r])
        return acc

    def prod(self, items: Iterable[int]) -> int:
        acc = self.one
        for r in items:
            acc = int(self.mul[acc, r])
        return acc


def boolean_algebra_semiring(k: int) -> FinSemiring:
    """The Boolean algebra of subsets of {1..k} as a semiring (+ = join, * = meet)."""
    if k < 0:
        raise ValueError("number of atoms must be >= 0")
    x = np.arange(2 ** k)
    labels = ["{" + ",".join(str(i + 1) for i in range(k) if m >> i & 1) + "}" for m in x]
    return FinSemiring(x[:, None] | x[None, :], x[:, None] & x[None, :], 0, 2 ** k - 1, labels,
                       f"B{2 ** k}")


def zmod(m: int) -> FinSemiring:
    x = np.arange(m)
    return FinSemiring((x[:, None] + x[None, :]) % m, (x[:, None] * x[None, :]) % m, 0, 1 % m,
                       name=f"Z{m}")


def chain_lattice(k: int) -> FinSemiring:
    """The chain 0 < 1 < .. < k-1 with + = max and * = min."""
    x = np.arange(k)
    return FinSemiring(np.maximum.outer(x, x), np.minimum.outer(x, x), 0, k - 1, name=f"C{k}")


def semiring_from_boolean_algebra(B: FinBooleanAlgebra, labels: Sequence[str] | None = None,
                                  name: str = "B") -> FinSemiring:
    """(B, join, meet, bottom, top) on member positions."""
    return FinSemiring(B.join_table, B.meet_table, B.pos(B.bottom), B.pos(B.top), labels, name)


def parse_semiring(text: str) -> FinSemiring:
    name, size, zero, one = "R", None, None, None
    rows: dict[str, dict] = {"add": {}, "mul": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        w = line.split()
        try:
            if w[0] in rows:
                if len(w) != 5 or w[3] != "->":
                    raise ValueError(f"expected '{w[0]} a b -> c'")
                rows[w[0]][(int(w[1]), int(w[2]))] = int(w[4])
            elif w[0] == "semiring":
                name = w[1]
            elif w[0] == "universe":
                size = int(w[1])
            elif w[0] == "zero":
                zero = int(w[1])
            elif w[0] == "one":
                one = int(w[1])
            else:
                raise ValueError(f"unknown directive {w[0]!r}")
        except (ValueError, IndexError) as exc:
            raise SemiringError(f"line {lineno}: {exc}") from None
    if size is None or zero is None or one is None:
        raise SemiringError("need 'universe', 'zero' and 'one' lines")
    tables = {}
    for op, entries in rows.items():
        t = np.full((size, size), -1)
        for (a, b), c in entries.items():
            if not (0 <= a < size and 0 <= b < size and 0 <= c < size):
                raise SemiringError(f"{op} line {a} {b} -> {c} outside the universe")
            t[a, b] = c
        if np.any(t < 0):
            raise SemiringError(f"{op} table is missing {tuple(np.argwhere(t < 0)[0].tolist())}")
        tables[op] = t
    return FinSemiring(tables["add"], tables["mul"], zero, one, name=name)


def load_semiring(path: str) -> FinSemiring:
    with open(path, encoding="utf-8") as fh:
        return parse_semiring(fh.read())


def dump_semiring(R: FinSemiring) -> str:
    lines = [f"semiring {R.name}", f"universe {R.size}"]
    for op, t in (("add", R.add), ("mul", R.mul)):
        lines += [f"{op} {a} {b} -> {t[a, b]}" for a in range(R.size) for b in range(R.size)]
    lines += [f"zero {R.zero}", f"one {R.one}"]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# vectors

def q_I(R: FinSemiring, v: Sequence[int], ws: Sequence[Sequence[int]], I: Sequence[int]) -> tuple[int, ...]:
    """q_I(v, w^1..w^n)_d = sum_i v_{I_i} w^i_d."""
    if len(ws) != len(I):
        raise ValueError("one argument vector per element of I")
    dim = len(v)
    return tuple(R.sum(int(R.mul[v[e], w[d]]) for e, w in zip(I, ws)) for d in range(dim))


def is_I_central(R: FinSemiring, v: Sequence[int], I: Sequence[int]) -> bool:
    """The four coordinate conditions for I-centrality of ``v``."""
    I = list(I)
    if any(v[d] != R.zero for d in range(len(v)) if d not in I):
        return False
    a = [v[e] for e in I]
    if R.sum(a) != R.one:
        return False
    if any(not np.array_equal(R.mul[x, :], R.mul[:, x]) for x in a):
        return False
    for i, x in enumerate(a):
        for j, y in enumerate(a):
            if R.mul[x, y] != (x if i == j else R.zero):
                return False
    return True


class VectorAlgebra(FinAlgebra):
    """Vectors over ``R`` with basis positions 0..dim-1, closed under ``ops``.

    Operation specs: ``("select", J)`` for q_J, ``("lift", E, g)`` for the
    linear lifting of ``g`` from the algebra ``E``, ``("add",)``,
    ``("smul", r)`` and ``("basis", d)``. The selector ``q`` has spec
    ``q_spec``; the constants are the unit vectors at ``I``.
    """

    def __init__(self, R: FinSemiring, dim: int, I: Sequence[int], vectors, q_spec,
                 ops: Mapping[str, tuple], name: str = "V"):
        self.R = R
        self.dim = dim
        self.I = tuple(I)
        self.vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, dim)
        self.specs = {"q": q_spec, **ops}
        self._radix = R.size ** np.arange(dim - 1, -1, -1, dtype=np.int64)
        codes = self.vectors @ self._radix
        self._order = np.argsort(codes)
        self._sorted = codes[self._order]
        units = []
        for e in self.I:
            u = np.full(dim, R.zero)
            u[e] = R.one
            units.append(int(self._encode(u)))
        if min(units) < 0:
            raise AlgebraError("unit vectors of I must belong to the universe")
        labels = ["(" + ",".join(R.label(int(x)) for x in row) + ")" for row in self.vectors]
        super().__init__(len(self.I), len(self.vectors), units,
                         {k: self._arity(s) for k, s in ops.items()}, labels, name)

    @staticmethod
    def _arity(spec) -> int:
        kind = spec[0]
        if kind == "select":
            return len(spec[1]) + 1
        if kind == "lift":
            return spec[1].arity(spec[2])
        return {"add": 2, "smul": 1, "basis": 0}[kind]

    def arity(self, op):
        return self._arity(self.specs[op])

    def _encode(self, rows):
        codes = np.asarray(rows, dtype=np.int64) @ self._radix
        pos = np.minimum(np.searchsorted(self._sorted, codes), len(self._sorted) - 1)
        return np.where(self._sorted[pos] == codes, self._order[pos], -1)

    def apply(self, op, args):
        spec = self.specs[op]
        R = self.R
        vs = [self.vectors[np.asarray(a)] for a in args]
        kind = spec[0]
        if kind == "select":
            J = spec[1]
            head, ws = vs[0], vs[1:]
            ws = np.broadcast_arrays(head, *ws)[1:]
            out = np.full(np.broadcast_shapes(*(w.shape for w in ws), head.shape), R.zero)
            for e, w in zip(J, ws):
                out = R.add[out, R.mul[head[..., e:e + 1], w]]
        elif kind == "add":
            out = R.add[vs[0], vs[1]]
        elif kind == "smul":
            out = R.mul[spec[1], vs[0]]
        elif kind == "basis":
            out = np.full(self.dim, R.zero)
            out[spec[1]] = R.one
        else:
            E, g = spec[1], spec[2]
            table = E.table(g)
            k = table.ndim
            shape = np.broadcast_shapes(*(v.shape for v in vs)) if vs else (self.dim,)
            out = np.full(shape, R.zero)
            for ds in itertools.product(range(E.size), repeat=k):
                coef = np.full(shape[:-1], R.one)
                for v, d in zip(vs, ds):
                    coef = R.mul[coef, v[..., d]]
                c = int(table[ds])
                out[..., c] = R.add[out[..., c], coef]
        res = self._encode(out)
        if np.any(res < 0):
            raise AlgebraError(f"{op!r} leaves the universe of {self.name}")
        return res


def _as_algebra(E) -> FinAlgebra:
    return generating_algebra(E) if isinstance(E, int) else E


def vector_algebra(R: FinSemiring, E, I: Sequence[int] | None = None) -> VectorAlgebra:
    """The full vector algebra V_E with selector q_I.

    Operations: addition, left multiplication by each scalar, q_J for every
    other nonempty J (in increasing order), the liftings of all operations of
    E (its q included), and the basis vectors as constants.
    """
    E = _as_algebra(E)
    dim = E.size
    I = tuple(E.constants) if I is None else tuple(I)
    if len(I) < 2 or len(set(I)) != len(I) or any(not 0 <= e < dim for e in I):
        raise ValueError("I must list at least 2 distinct basis positions")
    if R.size ** dim > MAX_VECTORS:
        raise AlgebraError(f"V has {R.size ** dim} vectors, over the cap of {MAX_VECTORS}")
    vectors = list(itertools.product(range(R.size), repeat=dim))
    ops: dict[str, tuple] = {"add": ("add",)}
    ops.update({f"smul_{r}": ("smul", r) for r in range(R.size)})
    for size in range(1, dim + 1):
        for J in itertools.combinations(range(dim), size):
            if J != I:
                ops["q_" + "_".join(map(str, J))] = ("select", J)
    for g in ("q",) + E.ops:
        ops[f"lift_{g}"] = ("lift", E, g)
    ops.update({f"basis_{d}": ("basis", d) for d in range(dim)})
    return VectorAlgebra(R, dim, I, vectors, ("select", I), ops, name=f"V({E.name},{R.name})")


@dataclass(frozen=True)
class CentralityRow:
    vector: tuple
    by_coordinates: bool
    by_identities: bool

    @property
    def agree(self) -> bool:
        return self.by_coordinates == self.by_identities


def cross_validate_centrality(R: FinSemiring, E, I: Sequence[int] | None = None,
                              sample: Iterable[Sequence[int]] | None = None) -> list[CentralityRow]:
    """Compare the coordinate conditions with B1-B3 checked directly in V_E."""
    V = vector_algebra(R, E, I)
    rows = []
    vecs = [tuple(int(x) for x in v) for v in V.vectors] if sample is None else [tuple(v) for v in sample]
    for v in vecs:
        idx = int(V._encode(np.array(v)))
        if idx < 0:
            raise ValueError(f"{v} is not a vector of V")
        rows.append(CentralityRow(v, is_I_central(R, v, V.I), is_central(V, idx)))
    return rows


# --------------------------------------------------------------------------
# complemented core

def complemented_core(R: FinSemiring, max_family: int = 4) -> FinBooleanAlgebra:
    """C(R): complemented, commuting elements with join r + r's, meet rs.

    Verifies complement uniqueness, idempotence, the Boolean-algebra laws and
    that every pairwise-orthogonal family of at most ``max_family`` members
    sums to its join.
    """
    k = R.size
    commuting = [bool(np.array_equal(R.mul[r, :], R.mul[:, r])) for r in range(k)]
    comp = {}
    for r in range(k):
        if not commuting[r]:
            continue
        ss = [s for s in range(k) if R.add[r, s] == R.one and R.mul[r, s] == R.zero]
        if len(ss) > 1:
            raise InvariantViolation(f"{R.label(r)} has complements {ss}")
        if ss:
            comp[r] = ss[0]
    members = tuple(sorted(comp))
    if any(R.mul[r, r] != r for r in members):
        raise InvariantViolation("a member of C(R) is not idempotent")
    pos = {r: i for i, r in enumerate(members)}
    mem = np.array(members)
    meet = R.mul[np.ix_(mem, mem)]
    join = R.add[mem[:, None], R.mul[[comp[r] for r in members]][:, mem]]
    try:
        meet = np.vectorize(pos.__getitem__)(meet)
        join = np.vectorize(pos.__getitem__)(join)
        neg = np.array([pos[comp[r]] for r in members])
    except KeyError:
        raise InvariantViolation("C(R) is not closed under its operations") from None
    bad = check_boolean_axioms(meet, join, neg, pos[R.zero], pos[R.one])
    if bad:
        raise InvariantViolation(f"C(R) violates {bad}")
    B = FinBooleanAlgebra(None, members, meet, join, neg, R.zero, R.one)
    for fam in _orthogonal_families(R, members, max_family):
        total = R.sum(fam)
        acc = R.zero
        for a in fam:
            acc = B.join(acc, a)
        if total != acc:
            raise InvariantViolation(f"sum and join differ on the orthogonal family {fam}")
    return B


def _orthogonal_families(R, members, max_len):
    def extend(fam):
        if len(fam) >= 2:
            yield tuple(fam)
        if len(fam) == max_len:
            return
        for a in members:
            if all(R.mul[a, b] == R.zero and R.mul[b, a] == R.zero for b in fam):
                yield from extend(fam + [a])

    yield from extend([])


# --------------------------------------------------------------------------
# semiring powers

def e_central_vectors(R: FinSemiring, dim: int, I: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """All I-central vectors of length ``dim`` (I defaults to every position)."""
    I = list(range(dim)) if I is None else list(I)
    cand = [r for r in range(R.size)
            if R.mul[r, r] == r and np.array_equal(R.mul[r, :], R.mul[:, r])]
    out = []

    def extend(prefix):
        if len(prefix) == len(I):
            if R.sum(prefix) == R.one:
                v = [R.zero] * dim
                for e, a in zip(I, prefix):
                    v[e] = a
                out.append(tuple(v))
            return
        for a in cand:
            if all(R.mul[a, b] == R.zero and R.mul[b, a] == R.zero for b in prefix):
                extend(prefix + [a])

    extend([])
    return sorted(out)


def semiring_power(E, R: FinSemiring) -> VectorAlgebra:
    """E[R] for an algebra E whose constants enumerate its universe (|E| = n).

    The universe is the set of E-central vectors; every operation of E (q
    included) is lifted linearly, so E[R] has the type of E. Closure under
    the lifted operations is checked, and the lifted q is checked to agree
    with q_E.
    """
    E = _as_algebra(E)
    if E.size != E.n or sorted(E.constants) != list(range(E.n)):
        raise AlgebraError("semiring powers need an algebra whose constants are its whole universe")
    I = tuple(E.constants)
    vecs = e_central_vectors(R, E.size, I)
    if len(vecs) > MAX_VECTORS:
        raise AlgebraError(f"E[R] has {len(vecs)} elements, over the cap of {MAX_VECTORS}")
    ops = {g: ("lift", E, g) for g in E.ops}
    ops["q_E"] = ("select", I)
    A = VectorAlgebra(R, E.size, I, vecs, ("lift", E, "q"), ops, name=f"{E.name}[{R.name}]")
    try:
        for op in ("q",) + A.ops:
            A.table(op)
    except AlgebraError as exc:
        raise InvariantViolation(f"E[R] is not closed: {exc}") from None
    if not np.array_equal(A.table("q"), A.table("q_E")):
        raise InvariantViolation("lifted q differs from q_E on E[R]")
    # q_E duplicates q; drop it so that E[R] has exactly the type of E
    A.arities.pop("q_E")
    return A


@dataclass(frozen=True)
class CorePowerReport:
    size: int
    core_size: int
    same_universe: bool
    same_operations: dict

    @property
    def ok(self) -> bool:
        return self.same_universe and all(self.same_operations.values())


def compare_core_power(E, R: FinSemiring) -> CorePowerReport:
    """E[R] and E[C(R)] as literal sets of vectors, with the same operations."""
    E = _as_algebra(E)
    ER = semiring_power(E, R)
    C = complemented_core(R)
    CR = semiring_from_boolean_algebra(C, [R.label(r) for r in C.members], f"C({R.name})")
    EC = semiring_power(E, CR)
    members = np.array(C.members)
    lifted = members[EC.vectors]
    same = {tuple(r) for r in lifted.tolist()} == {tuple(r) for r in ER.vectors.tolist()}
    ops = {}
    if same:
        perm = ER._encode(lifted)
        for op in ("q",) + E.ops:
            k = ER.arity(op)
            ops[op] = bool(np.array_equal(
                perm[EC.table(op)], ER.table(op)[np.ix_(*[perm] * k)] if k else ER.table(op)))
    return CorePowerReport(ER.size, C.size, same, ops)


def atoms(B) -> list[int]:
    """Atoms of a finite Boolean algebra, or of a Boolean semiring (order x <= y iff xy = x)."""
    if isinstance(B, FinBooleanAlgebra):
        return B.atoms()
    nz = [a for a in range(B.size) if a != B.zero]
    return [a for a in nz if all(B.mul[b, a] != b or b == a for b in nz)]


@dataclass(frozen=True)
class BooleanPower:
    power: PowerAlgebra           # E^atoms with pointwise operations
    semiring_power: VectorAlgebra
    atoms: tuple
    iso: np.ndarray               # position in semiring_power -> element of power


def boolean_power(E, B) -> BooleanPower:
    """The Boolean power of E by a finite Boolean algebra B, as E^atoms(B).

    The map v -> f_v, f_v(atom) = the unique e with atom <= v_e, is checked to
    be an isomorphism from E[B] onto E^atoms for q, the constants and every
    operation of E.
    """
    E = _as_algebra(E)
    if isinstance(B, FinBooleanAlgebra):
        B = semiring_from_boolean_algebra(B)
    core = complemented_core(B)
    if len(core.members) != B.size:
        raise AlgebraError(f"{B.name} is not a Boolean algebra")
    ats = atoms(B)
    EB = semiring_power(E, B)
    P = pointwise_power(E, len(ats))
    rows = []
    for v in EB.vectors:
        f = []
        for a in ats:
            hits = [e for e in range(E.size) if B.mul[a, v[e]] == a]
            if len(hits) != 1:
                raise InvariantViolation(f"atom {B.label(a)} lies below {len(hits)} coordinates")
            f.append(hits[0])
        rows.append(f)
    iso = P._decode(np.array(rows, dtype=np.int64).reshape(-1, len(ats)))
    if sorted(iso.tolist()) != list(range(P.size)):
        raise InvariantViolation("v -> f_v is not a bijection onto E^atoms")
    _check_iso(EB, P, iso, ("q",) + E.ops)
    return BooleanPower(P, EB, tuple(ats), iso)


def _check_iso(A: FinAlgebra, B: FinAlgebra, m: np.ndarray, ops):
    if not np.array_equal(m[list(A.constants)], np.array(B.constants)):
        raise InvariantViolation("the map does not preserve constants")
    bad = [op for op in ops if not _preserves(A, B, m, op)]
    if bad:
        raise InvariantViolation(f"the map does not preserve {bad}")


def _preserves(A, B, m, op) -> bool:
    k = A.arity(op)
    if k == 0:
        return int(m[A.table(op)]) == int(B.table(op))
    return bool(np.array_equal(m[A.table(op)], B.table(op)[np.ix_(*[m] * k)]))


@dataclass(frozen=True)
class FosterReport:
    size: int
    atoms: int
    bijective: bool
    preserved: dict

    @property
    def ok(self) -> bool:
        return self.bijective and all(self.preserved.values())


def foster_check(P: FinAlgebra, A: FinAlgebra) -> FosterReport:
    """Check A ≅ P^atoms(B_A) through the coordinate map, for q and all extra operations.

    ``P`` must be an nBA with n elements; ``A`` an nBA of the same type
    (typically a subalgebra of a power of P).
    """
    if P.size != P.n or not is_nba(P):
        raise AlgebraError("P must be an nBA with exactly n elements")
    if set(A.ops) != set(P.ops) or any(A.arity(o) != P.arity(o) for o in P.ops):
        raise AlgebraError("A and P have different types")
    B = coordinate_boolean_algebra(A)
    ats = B.atoms()
    C = coordinate_matrix(A)
    # f(a)(atom) = the e_i with atom <= a_i
    rows = []
    for a in range(A.size):
        f = []
        for at in ats:
            hits = [i for i in range(A.n) if B.leq(at, int(C[a, i]))]
            if len(hits) != 1:
                raise InvariantViolation("coordinates of an element are not orthogonal")
            f.append(P.constants[hits[0]])
        rows.append(f)
    Q = pointwise_power(P, len(ats))
    m = Q._decode(np.array(rows, dtype=np.int64).reshape(-1, len(ats)))
    bijective = sorted(m.tolist()) == list(range(Q.size))
    preserved = {}
    if bijective:
        preserved["constants"] = bool(np.array_equal(m[list(A.constants)], np.array(Q.constants)))
        for op in ("q",) + P.ops:
            preserved[op] = _preserves(A, Q, m, op)
    report = FosterReport(A.size, len(ats), bijective, preserved)
    if not report.ok:
        raise InvariantViolation(f"coordinate map is not an isomorphism: {report}")
    return report
