"""Finite algebras of dimension n: nBA laws, central elements, coordinates.

Elements are 0-based integer ids; ``A.constants[i-1]`` is the id of e_i.
Operations are evaluated through ``A.apply(op, args)`` on integer arrays, so
checks run vectorized. ``"q"`` names the (n+1)-ary selector; any other name
is an extra operation.

Law checking is exact. Three strategies are combined:

* algebras presented inside a pointwise power P^I are checked coordinate by
  coordinate in P (an identity holds in a subset S of P^I iff it holds in P
  over each coordinate projection of S);
* small search spaces are enumerated vectorized in chunks;
* otherwise variables are split lazily, only when their value is needed,
  using q(e_i, y_1..y_n) = y_i (once verified) to select branches symbolically.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .term import App, Const, Permutation, Q, Term, Var, check_dimension, variables

__all__ = [
    "MAX_UNIVERSE", "MAX_DIM", "AlgebraError", "CheckTooLarge", "InvariantViolation",
    "Failure", "Law", "FinAlgebra", "TableAlgebra", "PowerAlgebra",
    "generating_algebra", "pointwise_power", "power_algebra", "subalgebra",
    "evaluate_in", "find_counterexample", "check_law", "axiom_laws", "central_laws",
    "check_axioms", "central_failure", "is_central", "central_elements", "is_nba",
    "nba_failures", "congruence_generated", "principal_congruence",
    "is_central_by_congruences", "simplicity_failures", "is_decomposition_operator",
    "decomposition_failure", "p_op", "FinBooleanAlgebra", "check_boolean_axioms",
    "coordinate_boolean_algebra", "coordinates", "coordinate_matrix", "central_vectors",
    "RepresentationReport", "representation_iso", "permute_element", "permuted_algebra",
    "permutation_law_failure", "algebra_models", "SymmetryReport", "check_symmetry",
    "parse_algebra", "load_algebra", "dump_algebra",
]

MAX_UNIVERSE = 512
MAX_DIM = 5
DENSE_CAP = 1 << 24      # entries in one dense operation table
ENUM_BUDGET = 1 << 26    # assignments for one vectorized enumeration
CHUNK = 1 << 18
SPLIT_BUDGET = 1 << 21   # leaves of one lazy case split


class AlgebraError(ValueError):
    pass


class CheckTooLarge(RuntimeError):
    """An exhaustive check would exceed the configured budget."""


class InvariantViolation(AssertionError):
    """A property that must hold by construction failed (an implementation bug)."""


@dataclass(frozen=True)
class Failure:
    law: str
    witness: dict

    def __str__(self):
        w = ", ".join(f"{k}={v}" for k, v in self.witness.items())
        return f"{self.law} fails at {w}" if w else f"{self.law} fails"


@dataclass(frozen=True)
class Law:
    """An identity ``lhs = rhs``; variables in ``params`` are bound by the caller."""

    name: str
    lhs: Term
    rhs: Term
    params: tuple[int, ...] = ()


# --------------------------------------------------------------------------
# algebras

class FinAlgebra:
    """A finite algebra of dimension n with q, constants and extra operations."""

    def __init__(self, n: int, size: int, constants: Sequence[int],
                 arities: Mapping[str, int] | None = None,
                 labels: Sequence[str] | None = None, name: str = "A"):
        check_dimension(n)
        if n > MAX_DIM:
            raise AlgebraError(f"dimension {n} exceeds the cap of {MAX_DIM}")
        if not 1 <= size <= MAX_UNIVERSE:
            raise AlgebraError(f"universe size {size} outside 1..{MAX_UNIVERSE}")
        constants = tuple(int(c) for c in constants)
        if len(constants) != n or any(not 0 <= c < size for c in constants):
            raise AlgebraError(f"need {n} constants with ids in 0..{size - 1}")
        self.n = n
        self.size = size
        self.constants = constants
        self.arities = dict(sorted((arities or {}).items()))
        if "q" in self.arities:
            raise AlgebraError("'q' is reserved for the selector")
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != size:
            raise AlgebraError("one label per element expected")
        self.name = name
        self._tables: dict[str, np.ndarray] = {}
        self._cache: dict = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}: n={self.n}, |A|={self.size}, ops={list(self.arities)}>"

    @property
    def ops(self) -> tuple[str, ...]:
        return tuple(self.arities)

    @property
    def universe(self) -> range:
        return range(self.size)

    def arity(self, op: str) -> int:
        return self.n + 1 if op == "q" else self.arities[op]

    def apply(self, op: str, args: Sequence[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def q(self, *args: int) -> int:
        return int(self.apply("q", [np.asarray(a) for a in args]))

    def op(self, name: str, *args: int) -> int:
        return int(self.apply(name, [np.asarray(a) for a in args]))

    def table(self, op: str) -> np.ndarray:
        """Dense table of ``op`` with shape ``(size,) * arity``."""
        t = self._tables.get(op)
        if t is None:
            k = self.arity(op)
            if self.size ** k > DENSE_CAP:
                raise CheckTooLarge(f"dense table of {op!r} would have {self.size ** k} entries")
            grids = [np.arange(self.size).reshape((1,) * i + (-1,) + (1,) * (k - i - 1)) for i in range(k)]
            t = np.broadcast_to(self.apply(op, grids), (self.size,) * k).astype(np.int32)
            self._tables[op] = t
        return t

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels is not None else str(a)

    def as_table(self, extra: Mapping[str, np.ndarray] | None = None) -> "TableAlgebra":
        ops = {op: self.table(op) for op in self.ops}
        ops.update(extra or {})
        return TableAlgebra(self.n, self.table("q"), self.constants, ops, self.labels, self.name)


class TableAlgebra(FinAlgebra):
    """An algebra given by explicit dense tables."""

    def __init__(self, n: int, q_table, constants: Sequence[int],
                 ops: Mapping[str, np.ndarray] | None = None,
                 labels: Sequence[str] | None = None, name: str = "A"):
        q_table = np.asarray(q_table, dtype=np.int32)
        size = q_table.shape[0] if q_table.ndim else 0
        ops = {k: np.asarray(v, dtype=np.int32) for k, v in (ops or {}).items()}
        super().__init__(n, size, constants, {k: v.ndim for k, v in ops.items()}, labels, name)
        for op, t in [("q", q_table)] + list(ops.items()):
            if t.shape != (size,) * t.ndim or (op == "q" and t.ndim != n + 1):
                raise AlgebraError(f"table of {op!r} has shape {t.shape}")
            if t.size and (t.min() < 0 or t.max() >= size):
                raise AlgebraError(f"table of {op!r} leaves the universe")
        self._tables = {"q": q_table, **ops}

    def apply(self, op, args):
        return self._tables[op][tuple(np.asarray(a) for a in args)]


class PowerAlgebra(FinAlgebra):
    """A subset of a pointwise power base^width, closed under all operations.

    ``coords[a]`` lists the base ids of element ``a``, one per coordinate.
    """

    def __init__(self, base: FinAlgebra, coords, name: str | None = None):
        coords = np.asarray(coords, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise AlgebraError("coords must be a (size, width) array")
        size, width = coords.shape
        self.base = base
        self.coords = coords
        self.width = width
        self._radix = base.size ** np.arange(width - 1, -1, -1, dtype=np.int64)
        codes = coords @ self._radix
        self._order = np.argsort(codes, kind="stable")
        self._sorted = codes[self._order]
        if len(np.unique(codes)) != size:
            raise AlgebraError("repeated elements in coords")
        consts = []
        for c in base.constants:
            hit = self._decode(np.full(width, c))
            if hit < 0:
                raise AlgebraError("the universe must contain the diagonal constants")
            consts.append(int(hit))
        labels = ["(" + ",".join(base.label(int(x)) for x in row) + ")" for row in coords]
        super().__init__(base.n, size, consts, base.arities, labels, name or f"{base.name}^{width}")

    def _decode(self, rows: np.ndarray) -> np.ndarray:
        codes = np.asarray(rows, dtype=np.int64) @ self._radix
        pos = np.searchsorted(self._sorted, codes)
        pos = np.minimum(pos, len(self._sorted) - 1)
        found = self._sorted[pos] == codes
        return np.where(found, self._order[pos], -1)

    def apply(self, op, args):
        rows = self.base.apply(op, [self.coords[np.asarray(a)] for a in args])
        rows = np.broadcast_to(rows, np.broadcast_shapes(np.shape(rows), (self.width,)))
        out = self._decode(rows)
        if np.any(out < 0):
            raise AlgebraError(f"{op!r} leaves the universe of {self.name}")
        return out


def generating_algebra(n: int) -> TableAlgebra:
    """The algebra **n**: universe e_1..e_n (ids 0..n-1), q(e_i, y) = y_i."""
    check_dimension(n)
    grid = np.indices((n,) * (n + 1))
    table = np.choose(grid[0], list(grid[1:]))
    return TableAlgebra(n, table, range(n), labels=[f"e{i}" for i in range(1, n + 1)], name=str(n))


def pointwise_power(P: FinAlgebra, width: int) -> PowerAlgebra:
    if width < 1:
        raise AlgebraError("the index set must be nonempty")
    if P.size ** width > MAX_UNIVERSE:
        raise AlgebraError(f"{P.name}^{width} has {P.size ** width} elements, over the cap of {MAX_UNIVERSE}")
    coords = np.array(list(itertools.product(range(P.size), repeat=width)), dtype=np.int64)
    return PowerAlgebra(P, coords)


def power_algebra(n: int, width: int) -> PowerAlgebra:
    """The full power n^I with |I| = ``width`` and pointwise q."""
    return pointwise_power(generating_algebra(n), width)


def subalgebra(A: FinAlgebra, generators: Iterable[int] = ()) -> FinAlgebra:
    """The least subuniverse containing ``generators`` and the constants.

    The result records ``ambient`` (``A``) and ``embedding`` (its ids in ``A``).
    """
    S = set(int(g) for g in generators) | set(A.constants)
    if any(not 0 <= g < A.size for g in S):
        raise AlgebraError("generator outside the universe")
    while True:
        arr = np.array(sorted(S))
        new = set(S)
        for op in ("q",) + A.ops:
            k = A.arity(op)
            if len(arr) ** k > DENSE_CAP:
                raise CheckTooLarge(f"closure under {op!r} needs {len(arr) ** k} evaluations")
            grids = [arr.reshape((1,) * i + (-1,) + (1,) * (k - i - 1)) for i in range(k)]
            new.update(np.unique(A.apply(op, grids)).tolist())
        if len(new) == len(S):
            break
        S = new
    emb = np.array(sorted(S))
    if isinstance(A, PowerAlgebra):
        sub = PowerAlgebra(A.base, A.coords[emb], name=f"sub({A.name})")
    else:
        remap = np.full(A.size, -1)
        remap[emb] = np.arange(len(emb))
        ops = {op: remap[A.table(op)[np.ix_(*[emb] * A.arity(op))]] if A.arity(op) else remap[A.table(op)]
               for op in A.ops}
        q = remap[A.table("q")[np.ix_(*[emb] * (A.n + 1))]]
        labels = [A.label(int(a)) for a in emb]
        sub = TableAlgebra(A.n, q, remap[list(A.constants)], ops, labels, f"sub({A.name})")
    sub.ambient = A
    sub.embedding = emb
    return sub


# --------------------------------------------------------------------------
# term evaluation and law checking

def _eval_arrays(A: FinAlgebra, t: Term, env: Mapping[int, np.ndarray], memo: dict):
    r = memo.get(t)
    if r is not None:
        return r
    if isinstance(t, Const):
        if t.index > A.n:
            raise AlgebraError(f"constant e{t.index} out of range for n={A.n}")
        r = np.asarray(A.constants[t.index - 1])
    elif isinstance(t, Var):
        r = env[t.index]
    elif isinstance(t, Q):
        r = A.apply("q", [_eval_arrays(A, u, env, memo) for u in (t.head,) + t.args])
    else:
        r = A.apply(t.name, [_eval_arrays(A, u, env, memo) for u in t.args])
    memo[t] = r
    return r


def evaluate_in(A: FinAlgebra, t: Term, rho: Mapping[int, int]) -> int:
    """Value of ``t`` in ``A``; ``e_i`` denotes ``A.constants[i-1]``."""
    env = {k: np.asarray(v) for k, v in rho.items()}
    return int(_eval_arrays(A, t, env, {}))


def _grid_chunks(free: Sequence[int], domains: Mapping[int, np.ndarray]):
    sizes = [len(domains[v]) for v in free]
    inner = len(free)
    width = 1
    while inner > 0 and width * sizes[inner - 1] <= CHUNK:
        inner -= 1
        width *= sizes[inner]
    outer_vars, inner_vars = free[:inner], free[inner:]
    if inner_vars:
        mesh = np.meshgrid(*[domains[v] for v in inner_vars], indexing="ij")
        inner_env = {v: m.ravel() for v, m in zip(inner_vars, mesh)}
    else:
        inner_env = {}
    for head in itertools.product(*[domains[v] for v in outer_vars]):
        env = dict(inner_env)
        env.update({v: np.full(width, x) for v, x in zip(outer_vars, head)})
        yield env, width


def _enumerate(A, lhs, rhs, fixed, free, domains):
    for env, width in _grid_chunks(free, domains):
        env.update({v: np.full(width, x) for v, x in fixed.items()})
        memo: dict = {}
        left = np.broadcast_to(_eval_arrays(A, lhs, env, memo), (width,))
        right = np.broadcast_to(_eval_arrays(A, rhs, env, memo), (width,))
        bad = np.flatnonzero(left != right)
        if bad.size:
            j = int(bad[0])
            return {v: int(env[v][j]) for v in list(free) + list(fixed)}
    return None


class _Need(Exception):
    def __init__(self, var):
        self.var = var


def _a1_holds(A: FinAlgebra) -> bool:
    hit = A._cache.get("a1")
    if hit is None:
        hit = A.size ** A.n <= ENUM_BUDGET and all(
            find_counterexample(A, law.lhs, law.rhs, _lazy_ok=False) is None
            for law in axiom_laws(A.n) if law.name.startswith("A1"))
        A._cache["a1"] = hit
    return hit


def _lazy(A, lhs, rhs, fixed, free, domains):
    selectors = {}
    if _a1_holds(A):
        for i, c in enumerate(A.constants):
            selectors.setdefault(c, i)
    leaves = 0

    def sym(u, env):
        if isinstance(u, Const):
            return A.constants[u.index - 1]
        if isinstance(u, Var):
            v = env.get(u.index)
            return ("x", u.index) if v is None else v
        if isinstance(u, Q):
            h = sym(u.head, env)
            if isinstance(h, tuple):
                raise _Need(h[1])
            if h in selectors:
                return sym(u.args[selectors[h]], env)
            kids = u.args
            op = "q"
        else:
            kids, op, h = u.args, u.name, None
        vals = [sym(a, env) for a in kids]
        for v in vals:
            if isinstance(v, tuple):
                raise _Need(v[1])
        args = vals if h is None else [h] + vals
        return int(A.apply(op, [np.asarray(a) for a in args]))

    def run(env):
        try:
            left, right = sym(lhs, env), sym(rhs, env)
        except _Need as need:
            left, right = ("x", need.var), None
        if left == right:
            return None
        if isinstance(left, tuple):
            return split(left[1], env)
        if isinstance(right, tuple):
            return split(right[1], env)
        return dict(env)

    def split(var, env):
        nonlocal leaves
        for x in domains[var]:
            leaves += 1
            if leaves > SPLIT_BUDGET:
                raise CheckTooLarge(f"case split over {A.name} exceeded {SPLIT_BUDGET} leaves")
            env[var] = int(x)
            w = run(env)
            if w is not None:
                return w
            del env[var]
        return None

    w = run(dict(fixed))
    if w is not None:
        for v in free:
            w.setdefault(v, int(domains[v][0]))
    return w


def find_counterexample(A: FinAlgebra, lhs: Term, rhs: Term, fixed: Mapping[int, int] | None = None,
                        domains: Mapping[int, Sequence[int]] | None = None,
                        _lazy_ok: bool = True) -> dict[int, int] | None:
    """An assignment (var index -> element id) where ``lhs != rhs``, or None.

    Variables in ``fixed`` are bound; the others range over ``domains``
    (default: the whole universe).
    """
    fixed = {k: int(v) for k, v in (fixed or {}).items()}
    free = sorted((set(variables(lhs)) | set(variables(rhs))) - set(fixed))
    doms = {v: np.asarray(domains[v]) if domains and v in domains else np.arange(A.size) for v in free}
    if isinstance(A, PowerAlgebra):
        for j in range(A.width):
            col = A.coords[:, j]
            w = find_counterexample(A.base, lhs, rhs, {v: col[x] for v, x in fixed.items()},
                                    {v: np.unique(col[doms[v]]) for v in free})
            if w is not None:
                lifted = dict(fixed)
                for v in free:
                    lifted[v] = int(doms[v][np.flatnonzero(col[doms[v]] == w[v])[0]])
                env = {k: np.asarray(x) for k, x in lifted.items()}
                if int(_eval_arrays(A, lhs, env, {})) == int(_eval_arrays(A, rhs, env, {})):
                    raise InvariantViolation("coordinate witness does not lift")
                return lifted
        return None
    key = (lhs, rhs, tuple(sorted(fixed.items())), tuple((v, doms[v].tobytes()) for v in free))
    if key in A._cache:
        return A._cache[key]
    total = math.prod(len(doms[v]) for v in free)
    if total <= ENUM_BUDGET or not _lazy_ok:
        if total > ENUM_BUDGET:
            raise CheckTooLarge(f"{total} assignments exceed the enumeration budget")
        w = _enumerate(A, lhs, rhs, fixed, free, doms)
    else:
        w = _lazy(A, lhs, rhs, fixed, free, doms)
    A._cache[key] = w
    return w


def _witness(A, w):
    return {f"x{k}": A.label(v) for k, v in sorted(w.items())}


def check_law(A: FinAlgebra, law: Law, params: Sequence[int] = ()) -> Failure | None:
    fixed = dict(zip(law.params, params))
    w = find_counterexample(A, law.lhs, law.rhs, fixed)
    return None if w is None else Failure(law.name, _witness(A, w))


def axiom_laws(n: int) -> list[Law]:
    """A1-A6 for dimension n (A1 and A5 one law per index i)."""
    E = [Const(i) for i in range(1, n + 1)]
    x = Var(1)
    ys = [Var(1 + j) for j in range(1, n + 1)]
    zs = [Var(1 + n + j) for j in range(1, n + 1)]
    laws = [Law(f"A1^{i}", Q(E[i - 1], ys), ys[i - 1]) for i in range(1, n + 1)]
    laws.append(Law("A2", Q(Q(x, ys), zs), Q(x, [Q(y, zs) for y in ys])))
    laws.append(Law("A3", Q(x, [ys[0]] * n), ys[0]))
    laws.append(Law("A4", Q(x, E), x))
    for i in range(n):
        lhs = Q(x, ys[:i] + [Q(x, zs)] + ys[i + 1:])
        rhs = Q(x, ys[:i] + [zs[i]] + ys[i + 1:])
        laws.append(Law(f"A5^{i + 1}", lhs, rhs))
    y = Var(2)
    mat = [[Var(3 + j * n + k) for k in range(n)] for j in range(n)]
    lhs = Q(x, [Q(y, row) for row in mat])
    rhs = Q(y, [Q(x, [mat[j][k] for j in range(n)]) for k in range(n)])
    laws.append(Law("A6", lhs, rhs))
    return laws


def _apply_term(op: str, args):
    return Q(args[0], args[1:]) if op == "q" else App(op, args)


def central_laws(A: FinAlgebra, with_b4: bool = True) -> list[Law]:
    """B1, B2, B3 (one per operation) and B4, with ``x1`` standing for the candidate c."""
    n = A.n
    c = Var(1)
    E = [Const(i) for i in range(1, n + 1)]
    laws = [Law("B1", Q(c, E), c, (1,)), Law("B2", Q(c, [Var(2)] * n), Var(2), (1,))]
    for op in ("q",) + A.ops:
        k = A.arity(op)
        mat = [[Var(2 + i * k + j) for j in range(k)] for i in range(n)]
        lhs = Q(c, [_apply_term(op, row) for row in mat])
        rhs = _apply_term(op, [Q(c, [mat[i][j] for i in range(n)]) for j in range(k)])
        laws.append(Law(f"B3[{op}]", lhs, rhs, (1,)))
    if with_b4:
        mat = [[Var(2 + i * n + j) for j in range(n)] for i in range(n)]
        lhs = Q(c, [Q(c, row) for row in mat])
        rhs = Q(c, [mat[i][i] for i in range(n)])
        laws.append(Law("B4", lhs, rhs, (1,)))
    return laws


def check_axioms(A: FinAlgebra) -> list[Failure]:
    """Failures of A1-A6 in ``A`` (empty list: all hold)."""
    out = []
    for law in axiom_laws(A.n):
        f = check_law(A, law)
        if f is not None:
            out.append(f)
    return out


# Row automata. B3/D3 say that an n-ary f commutes with a k-ary g over an
# n x k matrix; B4/D2 compare f applied to the rows with f of the diagonal.
# Both read the matrix one row at a time; the state keeps only the classes of
# the partial applications f(prefix, -), so the search is over reachable
# states rather than over all |A|^(nk) matrices.

def _prefix_classes(f: np.ndarray, N: int, n: int):
    flat = f.reshape(-1)
    cls, reps = [], []
    for j in range(n + 1):
        _, first, inv = np.unique(flat.reshape(N ** j, N ** (n - j)), axis=0,
                                  return_index=True, return_inverse=True)
        cls.append(inv.reshape(-1))
        reps.append(first)
    trans = [cls[j + 1][reps[j][:, None] * N + np.arange(N)[None, :]] for j in range(n)]
    return trans, flat[reps[n]]


def _automaton_failure(f, N, n, rows, feeds, combine):
    """A matrix (list of n rows) on which the two sides differ, or None.

    Reading the rows bottom-up is the same as reversing the arguments of f;
    whichever order has fewer prefix classes is used.
    """
    trans, val = _prefix_classes(f, N, n)
    rev = f.transpose(tuple(range(n - 1, -1, -1))) if n > 1 else f
    trans_r, val_r = _prefix_classes(rev, N, n)
    flip = sum(int(t.max()) for t in trans_r) < sum(int(t.max()) for t in trans)
    if flip:
        trans, val = trans_r, val_r
    order = list(range(n - 1, -1, -1)) if flip else list(range(n))
    R = len(rows)
    m = feeds(0)[1].shape[1]
    states = np.zeros((1, 1 + m), dtype=np.int64)
    parents = []
    for i in range(n):
        a, b = feeds(order[i])
        if len(states) * R > ENUM_BUDGET:
            raise CheckTooLarge(f"{len(states) * R} automaton transitions exceed the budget")
        T = trans[i]
        step = max(1, CHUNK // R)
        C = T.max() + 1
        radix = C ** np.arange(m, -1, -1, dtype=np.int64)
        if float(C) ** (m + 1) >= 2.0 ** 62:
            raise CheckTooLarge("automaton state codes overflow")
        codes, origin = [], []
        for lo in range(0, len(states), step):
            S = states[lo:lo + step]
            code = T[S[:, :1], a[None, :]] * radix[0]
            for t in range(m):
                code += T[S[:, t + 1:t + 2], b[None, :, t]] * radix[t + 1]
            u, first = np.unique(code.ravel(), return_index=True)
            codes.append(u)
            origin.append(first + lo * R)
        u, first = np.unique(np.concatenate(codes), return_index=True)
        parents.append(np.concatenate(origin)[first])
        states = (u[:, None] // radix[None, :]) % C
    lhs = val[states[:, 0]]
    rhs = combine(val[states[:, 1:]])
    bad = np.flatnonzero(lhs != rhs)
    if not bad.size:
        return None
    idx, out = int(bad[0]), [None] * n
    for i in range(n - 1, -1, -1):
        idx, r = divmod(int(parents[i][idx]), R)
        out[order[i]] = rows[r].tolist()
    return out


def _all_rows(N, k):
    if N ** k > ENUM_BUDGET:
        raise CheckTooLarge(f"{N ** k} rows exceed the budget")
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(N), repeat=k)), dtype=np.int64)


def _commutation_failure(A: FinAlgebra, f: np.ndarray, op: str):
    """Matrix x (n x k) with f(op(x_1), .., op(x_n)) != op(f(x^1), .., f(x^k))."""
    k = A.arity(op)
    g = A.table(op)
    rows = _all_rows(A.size, k)
    gr = g[tuple(rows.T)] if k else np.full(1, int(g))
    return _automaton_failure(f, A.size, A.n, rows, lambda i: (gr, rows),
                              lambda v: g[tuple(v.T)] if k else np.full(len(v), int(g)))


def _diagonal_failure(A: FinAlgebra, f: np.ndarray):
    """Matrix x (n x n) with f(f(x_1), .., f(x_n)) != f(x_11, .., x_nn)."""
    rows = _all_rows(A.size, A.n)
    fr = f[tuple(rows.T)]
    return _automaton_failure(f, A.size, A.n, rows, lambda i: (fr, rows[:, i:i + 1]),
                              lambda v: v[:, 0])


def _matrix_witness(A, mat, first: int, head: dict | None = None):
    w = dict(head or {})
    k = len(mat[0]) if mat else 0
    for i, row in enumerate(mat):
        for j, x in enumerate(row):
            w[f"x{first + i * k + j}"] = A.label(x)
    return w


def central_failure(A: FinAlgebra, c: int) -> Failure | None:
    """The first of B1, B2, B3 that fails for ``c``, or None if ``c`` is central.

    For central ``c`` the consequence B4 is re-derived and must hold.
    """
    laws = central_laws(A)
    for law in laws[:2]:
        f = check_law(A, law, (c,))
        if f is not None:
            return f
    delegate = isinstance(A, PowerAlgebra)
    fc = None if delegate else A.table("q")[c]
    head = {"x1": A.label(c)}
    for law in laws[2:-1]:
        if delegate:
            fl = check_law(A, law, (c,))
        else:
            mat = _commutation_failure(A, fc, law.name[3:-1])
            fl = None if mat is None else Failure(law.name, _matrix_witness(A, mat, 2, head))
        if fl is not None:
            return fl
    if delegate:
        fl = check_law(A, laws[-1], (c,))
    else:
        mat = _diagonal_failure(A, fc)
        fl = None if mat is None else Failure("B4", _matrix_witness(A, mat, 2, head))
    if fl is not None:
        raise InvariantViolation(f"B1-B3 hold for {A.label(c)} but {fl}")
    return None


def is_central(A: FinAlgebra, c: int) -> bool:
    return central_failure(A, c) is None


def central_elements(A: FinAlgebra) -> list[int]:
    return [c for c in A.universe if is_central(A, c)]


def nba_failures(A: FinAlgebra) -> list[Failure]:
    """A1 failures and non-central elements (with their witnesses)."""
    out = [f for f in (check_law(A, law) for law in axiom_laws(A.n) if law.name.startswith("A1")) if f]
    for c in A.universe:
        f = central_failure(A, c)
        if f is not None:
            out.append(Failure(f"{f.law} for c={A.label(c)}", f.witness))
    return out


def is_nba(A: FinAlgebra) -> bool:
    if any(check_law(A, law) for law in axiom_laws(A.n) if law.name.startswith("A1")):
        return False
    return all(is_central(A, c) for c in A.universe)


# --------------------------------------------------------------------------
# congruences

def congruence_generated(A: FinAlgebra, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    """Least congruence containing ``pairs``, as an array of class representatives."""
    size = A.size
    pairs = list(pairs)
    src = np.array([a for a, _ in pairs] + [0], dtype=np.int64)
    dst = np.array([b for _, b in pairs] + [0], dtype=np.int64)
    rep = _components(size, src, dst)
    tables = [A.table(op) for op in ("q",) + A.ops if A.arity(op) > 0]
    while True:
        moved = np.flatnonzero(rep != np.arange(size))
        srcs, dsts = [np.arange(size)], [rep]
        if moved.size:
            for t in tables:
                for p in range(t.ndim):
                    tp = np.moveaxis(t, p, 0).reshape(size, -1)
                    srcs.append(tp[moved].ravel())
                    dsts.append(tp[rep[moved]].ravel())
        new = _components(size, np.concatenate(srcs), np.concatenate(dsts))
        if np.array_equal(new, rep):
            return rep
        rep = new


def _components(size, src, dst):
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(size, size))
    _, comp = connected_components(graph, directed=False)
    first = np.full(comp.max() + 1, size)
    np.minimum.at(first, comp, np.arange(size))
    return first[comp]


def principal_congruence(A: FinAlgebra, a: int, b: int) -> np.ndarray:
    return congruence_generated(A, [(a, b)])


def is_central_by_congruences(A: FinAlgebra, c: int) -> bool:
    """Centrality from the definition: θ(c, e_1), .., θ(c, e_n) are complementary factor congruences."""
    reps = np.stack([principal_congruence(A, c, e) for e in A.constants], axis=1)
    distinct = len({tuple(r) for r in reps.tolist()})
    classes = math.prod(len(np.unique(reps[:, i])) for i in range(A.n))
    return distinct == A.size and classes == A.size


def simplicity_failures(A: FinAlgebra) -> list[tuple[int, int]]:
    """Pairs (i, j) for which θ(e_i, e_j) is not the total congruence."""
    out = []
    for i, j in itertools.combinations(range(1, A.n + 1), 2):
        rep = principal_congruence(A, A.constants[i - 1], A.constants[j - 1])
        if np.any(rep != rep[0]):
            out.append((i, j))
    return out


# --------------------------------------------------------------------------
# decomposition operators

def decomposition_failure(A: FinAlgebra, f) -> Failure | None:
    """First failure of D1, D2 or D3 (one check per operation) for the n-ary table ``f``."""
    f = np.asarray(f, dtype=np.int64)
    n = A.n
    if f.shape != (A.size,) * n:
        raise AlgebraError(f"decomposition operator table must have shape {(A.size,) * n}")
    if f.min() < 0 or f.max() >= A.size:
        raise AlgebraError("decomposition operator leaves the universe")
    u = np.arange(A.size)
    bad = np.flatnonzero(f[(u,) * n] != u)
    if bad.size:
        return Failure("D1", {"x1": A.label(int(bad[0]))})
    mat = _diagonal_failure(A, f)
    if mat is not None:
        return Failure("D2", _matrix_witness(A, mat, 1))
    for op in ("q",) + A.ops:
        mat = _commutation_failure(A, f, op)
        if mat is not None:
            return Failure(f"D3[{op}]", _matrix_witness(A, mat, 1))
    return None


def is_decomposition_operator(A: FinAlgebra, f) -> bool:
    return decomposition_failure(A, f) is None


# --------------------------------------------------------------------------
# the inner Boolean algebra and coordinates

def p_op(A: FinAlgebra, a: int, *args: int) -> int:
    """p(a, a_1..a_m) = q(a, a_1..a_m, e_{m+1}..e_n) for 1 <= m < n."""
    m = len(args)
    if not 1 <= m < A.n:
        raise ValueError(f"p takes between 1 and {A.n - 1} arguments after the head, got {m}")
    return A.q(a, *args, *A.constants[m:])


def _p_arrays(A, a, *args):
    tail = [np.asarray(c) for c in A.constants[len(args):]]
    return A.apply("q", [np.asarray(a)] + [np.asarray(x) for x in args] + tail)


@dataclass(frozen=True)
class FinBooleanAlgebra:
    """A finite Boolean algebra on ``members`` (element ids of ``algebra``).

    The tables are indexed by positions in ``members``.
    """

    algebra: FinAlgebra | None
    members: tuple[int, ...]
    meet_table: np.ndarray = field(repr=False)
    join_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    bottom: int = 0
    top: int = 1

    @property
    def size(self) -> int:
        return len(self.members)

    def pos(self, a: int) -> int:
        return self.members.index(a)

    def meet(self, a, b):
        return self.members[self.meet_table[self.pos(a), self.pos(b)]]

    def join(self, a, b):
        return self.members[self.join_table[self.pos(a), self.pos(b)]]

    def neg(self, a):
        return self.members[self.neg_table[self.pos(a)]]

    def leq(self, a, b) -> bool:
        return self.meet(a, b) == a

    def atoms(self) -> list[int]:
        bot = self.pos(self.bottom)
        out = []
        for i in range(self.size):
            if i == bot:
                continue
            below = np.flatnonzero(self.meet_table[i] == np.arange(self.size))
            if set(below.tolist()) == {bot, i}:
                out.append(self.members[i])
        return out


def check_boolean_axioms(meet: np.ndarray, join: np.ndarray, neg: np.ndarray,
                         bot: int, top: int) -> str | None:
    """Name of the first failing Boolean-algebra law on position tables, or None.

    Laws: commutativity, associativity, absorption, distributivity, bounds,
    complements (an axiomatization of Boolean algebras).
    """
    m = len(neg)
    x = np.arange(m)
    X, Y = np.meshgrid(x, x, indexing="ij")
    checks = [
        ("meet commutative", meet[X, Y], meet[Y, X]),
        ("join commutative", join[X, Y], join[Y, X]),
        ("absorption meet", meet[X, join[X, Y]], X),
        ("absorption join", join[X, meet[X, Y]], X),
        ("top is meet unit", meet[x, top], x),
        ("bottom is join unit", join[x, bot], x),
        ("complement meet", meet[x, neg], np.full(m, bot)),
        ("complement join", join[x, neg], np.full(m, top)),
    ]
    for name, a, b in checks:
        if not np.array_equal(a, b):
            return name
    for z in range(m):
        if not np.array_equal(meet[meet[X, Y], z], meet[X, meet[Y, z]]):
            return "meet associative"
        if not np.array_equal(join[join[X, Y], z], join[X, join[Y, z]]):
            return "join associative"
        if not np.array_equal(meet[X, join[Y, z]], join[meet[X, Y], meet[X, z]]):
            return "distributivity"
    return None


def coordinate_boolean_algebra(A: FinAlgebra, check_nba: bool = True) -> FinBooleanAlgebra:
    """B_A = {x : p(x, y, y) = y for all y} with meet p(x,e1,y), join p(x,y,e2), neg p(x,e2,e1)."""
    if check_nba and not is_nba(A):
        raise AlgebraError(f"{A.name} is not an nBA")
    e1, e2 = A.constants[0], A.constants[1]
    u = np.arange(A.size)
    pyy = _p_arrays(A, u[:, None], u[None, :], u[None, :])
    members = tuple(int(a) for a in np.flatnonzero(np.all(pyy == u[None, :], axis=1)))
    mem = np.array(members)
    pos = np.full(A.size, -1)
    pos[mem] = np.arange(len(mem))
    meet = pos[_p_arrays(A, mem[:, None], e1, mem[None, :])]
    join = pos[_p_arrays(A, mem[:, None], mem[None, :], e2)]
    neg = pos[_p_arrays(A, mem, e2, e1)]
    if min(meet.min(), join.min(), neg.min()) < 0:
        raise InvariantViolation("B_A is not closed under its operations")
    bad = check_boolean_axioms(meet, join, neg, int(pos[e1]), int(pos[e2]))
    if bad:
        raise InvariantViolation(f"B_A violates {bad}")
    rest = [np.asarray(e1)] * (A.n - 2)
    image = A.apply("q", [u, np.asarray(e1), np.asarray(e2)] + rest)
    if set(np.unique(image).tolist()) != set(members):
        raise InvariantViolation("B_A differs from {q(a, e1, e2, e1, .., e1)}")
    fixed = A.apply("q", [mem, np.asarray(e1), np.asarray(e2)] + rest)
    if not np.array_equal(fixed, mem):
        raise InvariantViolation("q(y, e1, e2, e1, .., e1) = y fails on B_A")
    return FinBooleanAlgebra(A, members, meet, join, neg, e1, e2)


def coordinate_matrix(A: FinAlgebra) -> np.ndarray:
    """Row a holds the coordinates a_1..a_n, a_i = q(a, e1, .., e2 at i, .., e1)."""
    u = np.arange(A.size)
    e1, e2 = A.constants[0], A.constants[1]
    cols = []
    for i in range(A.n):
        args = [np.asarray(e2 if j == i else e1) for j in range(A.n)]
        cols.append(A.apply("q", [u] + args))
    return np.stack(cols, axis=1)


def coordinates(A: FinAlgebra, a: int) -> tuple[int, ...]:
    return tuple(int(x) for x in coordinate_matrix(A)[a])


def central_vectors(B: FinBooleanAlgebra, n: int) -> list[tuple[int, ...]]:
    """All fully orthogonal n-tuples over B (pairwise meets bottom, join top), as member ids."""
    bot = B.pos(B.bottom)
    out = []

    def extend(prefix, acc):
        if len(prefix) == n - 1:
            last = int(B.neg_table[acc])
            out.append(tuple(B.members[i] for i in prefix + [last]))
            return
        for i in range(B.size):
            if B.meet_table[i, acc] == bot:
                extend(prefix + [i], int(B.join_table[acc, i]))

    extend([], bot)
    return out


@dataclass(frozen=True)
class RepresentationReport:
    size: int
    boolean_size: int
    central_vectors: int
    coordinates_in_B: bool
    orthogonal: bool
    injective: bool
    surjective: bool
    q_preserved: bool
    inverse_ok: bool

    @property
    def ok(self) -> bool:
        return all([self.coordinates_in_B, self.orthogonal, self.injective, self.surjective,
                    self.q_preserved, self.inverse_ok, self.size == self.central_vectors])


def representation_iso(A: FinAlgebra, check_nba: bool = True) -> RepresentationReport:
    """Check that a -> (a_1..a_n) is an isomorphism of A onto the q-algebra of
    fully orthogonal n-vectors over B_A, and that the nested-p inverse works.

    Only q and the constants are used. Raises InvariantViolation on failure.
    """
    B = coordinate_boolean_algebra(A, check_nba)
    n = A.n
    C = coordinate_matrix(A)
    pos = np.full(A.size, -1)
    pos[np.array(B.members)] = np.arange(B.size)
    P = pos[C]
    in_b = bool(np.all(P >= 0))
    bot, top = B.pos(B.bottom), B.pos(B.top)
    orth = in_b
    if in_b:
        acc = P[:, 0]
        for i in range(1, n):
            acc = B.join_table[acc, P[:, i]]
        orth = bool(np.all(acc == top))
        for i, k in itertools.combinations(range(n), 2):
            orth &= bool(np.all(B.meet_table[P[:, i], P[:, k]] == bot))
    rows = {tuple(r) for r in C.tolist()}
    cv = central_vectors(B, n)
    injective = len(rows) == A.size
    surjective = rows == set(cv)

    q_ok = in_b
    if in_b:
        grids = [np.arange(A.size).reshape((1,) * i + (-1,) + (1,) * (n - i - 1)) for i in range(n)]
        bs = [np.broadcast_to(g, (A.size,) * n).ravel() for g in grids]
        for a in range(A.size):
            out = A.apply("q", [np.asarray(a)] + bs)
            lhs = P[out]
            for i in range(n):
                rhs = B.meet_table[P[a, 0], P[bs[0], i]]
                for j in range(1, n):
                    rhs = B.join_table[rhs, B.meet_table[P[a, j], P[bs[j], i]]]
                if not np.array_equal(lhs[:, i], rhs):
                    q_ok = False
                    break
            if not q_ok:
                break

    V = np.array(cv, dtype=np.int64).reshape(-1, n)
    e = A.constants
    b = _p_arrays(A, V[:, n - 2], e[n - 1], e[n - 2])
    for i in range(n - 3, -1, -1):
        b = _p_arrays(A, V[:, i], b, e[i])
    inverse_ok = bool(np.array_equal(C[np.asarray(b)].reshape(-1, n), V))
    report = RepresentationReport(A.size, B.size, len(cv), in_b, orth, injective, surjective,
                                  q_ok, inverse_ok)
    if not report.ok:
        raise InvariantViolation(f"representation check failed for {A.name}: {report}")
    return report


# --------------------------------------------------------------------------
# symmetry

def permute_element(A: FinAlgebra, x: int, sigma: Permutation) -> int:
    """x^σ = q(x, e_σ(1), .., e_σ(n))."""
    return A.q(x, *[A.constants[sigma(i) - 1] for i in range(1, A.n + 1)])


def permuted_algebra(n: int, sigma: Permutation) -> TableAlgebra:
    """**n**^σ with q(x, ȳ) = q^n(x^{σ^-1}, ȳ); its constants are c_i = e_σ(i).

    The map x -> x^σ is verified to be an isomorphism from **n**.
    """
    if sigma.n != n:
        raise ValueError("permutation degree differs from n")
    base = generating_algebra(n)
    inv = sigma.inverse()
    table = base.table("q")[[inv(h) - 1 for h in range(1, n + 1)]]
    A = TableAlgebra(n, table, [sigma(i) - 1 for i in range(1, n + 1)], labels=base.labels,
                     name=f"{n}^{sigma.images}")
    m = np.array([permute_element(base, x, sigma) for x in range(n)])
    if sorted(m.tolist()) != list(range(n)):
        raise InvariantViolation("x -> x^σ is not a bijection")
    if not np.array_equal(m[list(base.constants)], np.array(A.constants)):
        raise InvariantViolation("x -> x^σ does not preserve constants")
    grids = np.indices((n,) * (n + 1))
    lhs = m[base.table("q")]
    rhs = A.table("q")[tuple(m[g] for g in grids)]
    if not np.array_equal(lhs, rhs):
        raise InvariantViolation("x -> x^σ does not preserve q")
    A.sigma = sigma
    return A


def permutation_law_failure(A: FinAlgebra) -> str | None:
    """Check (x^σ)^ρ = x^(ρ∘σ) for every element and all permutations σ, ρ."""
    perms = Permutation.all(A.n)
    for x in A.universe:
        for s in perms:
            xs = permute_element(A, x, s)
            for r in perms:
                if permute_element(A, xs, r) != permute_element(A, x, r.compose(s)):
                    return f"x={A.label(x)}, σ={s.images}, ρ={r.images}"
    return None


def algebra_models(A: FinAlgebra, premises: Sequence[Term], conclusion: Term, designated: int) -> bool:
    """Brute-force consequence in the matrix (A, designated) over all assignments."""
    terms = list(premises) + [conclusion]
    free = sorted(set().union(*(variables(t) for t in terms)))
    if A.size ** len(free) > ENUM_BUDGET:
        raise CheckTooLarge("too many assignments for a brute-force judgement")
    doms = {v: np.arange(A.size) for v in free}
    for env, width in _grid_chunks(free, doms):
        memo: dict = {}
        vals = [np.broadcast_to(_eval_arrays(A, t, env, memo), (width,)) for t in terms]
        ok = np.ones(width, dtype=bool)
        for v in vals[:-1]:
            ok &= v == designated
        if np.any(ok & (vals[-1] != designated)):
            return False
    return True


@dataclass(frozen=True)
class SymmetryReport:
    plain: bool       # Γ ⊨ φ in (n, e_i)
    permuted: bool    # Γ^σ ⊨ φ^σ in (n, e_σ(i))
    twisted: bool     # Γ ⊨ φ in (n^σ, e_σ(i))

    @property
    def agree(self) -> bool:
        return self.plain == self.permuted == self.twisted


def check_symmetry(premises: Sequence[Term], phi: Term, sigma: Permutation, i: int, n: int) -> SymmetryReport:
    """The three equivalent judgements of the symmetry theorem, each by brute force."""
    from .semantics import models
    from .term import apply_permutation
    plain = models(list(premises), phi, n, i)
    permuted = models([apply_permutation(g, sigma) for g in premises], apply_permutation(phi, sigma),
                      n, sigma(i))
    twisted = algebra_models(permuted_algebra(n, sigma), premises, phi, sigma(i) - 1)
    return SymmetryReport(plain, permuted, twisted)


# --------------------------------------------------------------------------
# algebra files

def parse_algebra(text: str) -> FinAlgebra:
    """Read the line-oriented algebra format (0-based element ids)."""
    name, n, size, power = "A", None, None, None
    constants: dict[int, int] = {}
    q_rows: dict[tuple, int] = {}
    ops: dict[str, tuple[int, dict]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if "->" in words:
                k = words.index("->")
                res = words[k + 1:]
                if len(res) != 1:
                    raise AlgebraError("expected one result after '->'")
                if words[0] == "q":
                    q_rows[tuple(int(w) for w in words[1:k])] = int(res[0])
                elif current is not None:
                    arity, rows = ops[current]
                    args = tuple(int(w) for w in words[:k])
                    if len(args) != arity:
                        raise AlgebraError(f"{current} takes {arity} arguments")
                    rows[args] = int(res[0])
                else:
                    raise AlgebraError("table line outside an 'op' block")
                continue
            head = words[0]
            if head == "algebra":
                name = words[1]
            elif head == "n":
                n = int(words[1])
            elif head == "universe":
                size = int(words[1])
            elif head == "constant":
                constants[int(words[1])] = int(words[2])
            elif head == "pointwise-power":
                power = int(words[1])
            elif head == "op":
                if len(words) != 3:
                    raise AlgebraError("expected 'op <name> <arity>'")
                current = words[1]
                ops[current] = (int(words[2]), {})
            else:
                raise AlgebraError(f"unknown directive {head!r}")
        except (ValueError, IndexError) as exc:
            raise AlgebraError(f"line {lineno}: {exc}") from None
    if n is None:
        raise AlgebraError("missing 'n' line")
    if power is not None:
        P = power_algebra(n, power)
        if size is not None and size != P.size:
            raise AlgebraError(f"universe {size} does not match {n}^{power} = {P.size}")
        if q_rows:
            raise AlgebraError("explicit q lines conflict with pointwise-power")
        if not ops:
            P.name = name
            return P
        size, q_table, consts = P.size, P.table("q"), P.constants
    else:
        if size is None:
            raise AlgebraError("missing 'universe' line")
        if sorted(constants) != list(range(1, n + 1)):
            raise AlgebraError(f"need constant lines for 1..{n}")
        consts = [constants[i] for i in range(1, n + 1)]
        q_table = _fill(q_rows, n + 1, size, "q")
    op_tables = {op: _fill(rows, arity, size, op) for op, (arity, rows) in ops.items()}
    return TableAlgebra(n, q_table, consts, op_tables, name=name)


def _fill(rows: dict, arity: int, size: int, what: str) -> np.ndarray:
    t = np.full((size,) * arity, -1, dtype=np.int32)
    for args, r in rows.items():
        if len(args) != arity or any(not 0 <= a < size for a in args) or not 0 <= r < size:
            raise AlgebraError(f"bad {what} line {args} -> {r}")
        t[args] = r
    missing = np.argwhere(t < 0)
    if missing.size:
        raise AlgebraError(f"{what} table is missing the tuple {tuple(missing[0].tolist())}")
    return t


def dump_algebra(A: FinAlgebra) -> str:
    lines = [f"algebra {A.name}", f"n {A.n}", f"universe {A.size}"]
    lines += [f"constant {i} {c}" for i, c in enumerate(A.constants, 1)]
    for op in ("q",) + A.ops:
        t = A.table(op)
        if op != "q":
            lines.append(f"op {op} {t.ndim}")
        for args in itertools.product(range(A.size), repeat=t.ndim):
            prefix = "q " if op == "q" else ""
            lines.append(prefix + " ".join(map(str, args)) + f" -> {t[args]}")
    return "\n".join(lines) + "\n"


def load_algebra(path: str) -> FinAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())
