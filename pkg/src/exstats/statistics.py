"""Locality identities, T_f, E_inv and the statistics group T = E_inv / E_id.

Lattices of expressions are stored as column-generator matrices with one row
per flat index ``op * |A| + a``.  Quotients ``Z^n / span(columns)`` are
diagonalized through the transpose, so the column cap applies to the ambient
dimension rather than to the (usually much larger) number of generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from math import gcd
from typing import Iterable, Sequence

from .expr import Expression, ProcessWord, commutator, expand_theta
from .linalg import (DEFAULT_MAX_COLS, ResourceLimitError, SparseIntMatrix, snf,
                     solve_integer)
from .model import ExcitationModel, minimal_empty_sets, restriction_partition

DEFAULT_GENERATOR_CAP = 2_000_000


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass
class RowSmith:
    """Row-side Smith data of a generator matrix M (n x N): ``U M V = D``.

    Only ``U`` and ``U_inv`` are kept.  ``U e`` gives coordinates of ``e`` in
    which the lattice is ``⊕ λ_i Z`` on the first ``rank`` rows and 0 after.
    """

    ambient_dim: int
    diagonal: tuple[int, ...]
    rank: int
    U: SparseIntMatrix
    U_inv: SparseIntMatrix | None

    @classmethod
    def of(cls, m: SparseIntMatrix, want_inverse: bool = True, max_cols: int = DEFAULT_MAX_COLS) -> "RowSmith":
        # snf(M^T) = V' (M^T) U'  =>  U'^T M V'^T = D^T, so U = V'^T
        res = snf(m.transpose(), track_u=False, track_v=True, track_vinv=want_inverse, max_cols=max_cols)
        U = res.V.transpose()
        U_inv = res.V_inv.transpose() if want_inverse else None
        return cls(m.nrows, res.diagonal[: res.rank], res.rank, U, U_inv)

    @property
    def factors(self) -> list[int]:
        """Invariant factors of Z^n / span, with 0 for each free summand."""
        return list(self.diagonal) + [0] * (self.ambient_dim - self.rank)

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.diagonal if d > 1]

    def coordinates(self, e) -> dict[int, int]:
        vec = dict(e.items()) if isinstance(e, Expression) else dict(e)
        return self.U.apply(vec)

    def order(self, e) -> int:
        """Smallest n >= 1 with n e in the lattice; 0 if no multiple lies in it."""
        n = 1
        for i, c in self.coordinates(e).items():
            if i >= self.rank:
                return 0
            lam = self.diagonal[i]
            n = _lcm(n, lam // gcd(lam, c))
        return n

    def contains(self, e) -> bool:
        return self.order(e) == 1

    def generator(self, i: int) -> dict[int, int]:
        return self.U_inv.column(i)


@dataclass
class IdentityLattice:
    model: ExcitationModel
    columns: list[dict[int, int]]
    label: str = "E_id"

    @property
    def matrix(self) -> SparseIntMatrix:
        return SparseIntMatrix._trusted(self.model.expression_dim, len(self.columns), [dict(c) for c in self.columns])

    def __len__(self) -> int:
        return len(self.columns)

    @cached_property
    def smith(self) -> RowSmith:
        return RowSmith.of(self.matrix)


class _ColumnSet:
    """Deduplicated nonzero columns in insertion order."""

    def __init__(self, cap: int):
        self.cols: list[dict[int, int]] = []
        self.seen: set = set()
        self.cap = cap

    def add(self, d: dict[int, int]):
        d = {k: v for k, v in d.items() if v}
        if not d:
            return
        key = tuple(sorted(d.items()))
        neg = tuple((k, -v) for k, v in key)
        if key in self.seen or neg in self.seen:
            return
        self.seen.add(key)
        self.cols.append(dict(key))
        if len(self.cols) > self.cap:
            raise ResourceLimitError(f"more than {self.cap} identity generators")


def _commutator_terms(m: ExcitationModel, j: int, i: int, b: int, sign: int, out: dict[int, int]):
    # θ([s_j, s_i], b) = θ(s_i,b) + θ(s_j,b+∂s_i) - θ(s_i,b+∂s_j) - θ(s_j,b)
    n = m.config_count
    si, sj = m.step[i], m.step[j]
    for k, v in ((i * n + b, sign), (j * n + si[b], sign), (i * n + sj[b], -sign), (j * n + b, -sign)):
        out[k] = out.get(k, 0) + v


def alternating_commutator(m: ExcitationModel, j: int, i: int, rest: Sequence[int], a: int) -> dict[int, int]:
    """Σ_{I ⊆ rest} (-1)^|I| θ([s_j, s_i], a + ∂I), the nested commutator of s_i, s_j and ``rest``."""
    out: dict[int, int] = {}
    shifts = [(a, 1)]
    for t in rest:
        st = m.step[t]
        shifts = shifts + [(st[b], -sg) for b, sg in shifts]
    for b, sg in shifts:
        _commutator_terms(m, j, i, b, sg, out)
    return out


def _common(m: ExcitationModel, ops: Iterable[int]) -> frozenset:
    inter = None
    for s in ops:
        sup = m.operators[s].support
        inter = sup if inter is None else inter & sup
    return frozenset(range(m.point_count)) if inter is None else inter


def identity_generators(m: ExcitationModel, cap: int = DEFAULT_GENERATOR_CAP) -> IdentityLattice:
    """Generators of E_id from inclusion-minimal empty-support sets.

    For a minimal set R with first element x0: the alternating commutators
    with inner pair {x0, x} for every other x in R.  For every operator k
    outside R whose support meets each ∩(R - x): the set R ∪ {k} with inner
    pair {k, x0}, where k cannot be dropped because it is in the pair.
    """
    cols = _ColumnSet(cap)
    n = m.config_count
    for R in minimal_empty_sets(m):
        x0 = R[0]
        for x in R[1:]:
            rest = [t for t in R if t not in (x0, x)]
            for a in range(n):
                cols.add(alternating_commutator(m, x, x0, rest, a))
        partial = [_common(m, [t for t in R if t != x]) for x in R]
        Rset = set(R)
        for k in range(m.op_count):
            if k in Rset:
                continue
            sup = m.operators[k].support
            if all(sup & p for p in partial):
                rest = [t for t in R if t != x0]
                for a in range(n):
                    cols.add(alternating_commutator(m, k, x0, rest, a))
    return IdentityLattice(m, cols.cols)


def nested_commutator(ops: Sequence[int]) -> ProcessWord:
    """[s_k, [..., [s_2, s_1]]] for ``ops = (s_1, ..., s_k)``."""
    w: ProcessWord = ((ops[0], 1),)
    for s in ops[1:]:
        w = commutator(((s, 1),), w)
    return w


def naive_identity_generators(m: ExcitationModel, max_ops: int = 6, max_sequences: int = 200_000) -> IdentityLattice:
    """All θ([s_k,[...,[s_2,s_1]]], a) for distinct-operator sequences with empty common support."""
    cols = _ColumnSet(10 ** 9)
    count = 0
    n = m.config_count
    for k in range(2, min(max_ops, m.op_count) + 1):
        for subset in combinations(range(m.op_count), k):
            if _common(m, subset):
                continue
            for seq in permutations(subset):
                count += 1
                if count > max_sequences:
                    raise ResourceLimitError(f"more than {max_sequences} sequences")
                w = nested_commutator(seq)
                for a in range(n):
                    e, _ = expand_theta(m, w, a)
                    cols.add(dict(e.items()))
    return IdentityLattice(m, cols.cols, "naive E_id")


# E_inv

def einv_constraints(m: ExcitationModel) -> SparseIntMatrix:
    """Rows whose common kernel is E_inv: closedness, then q_{V_x} for each maximal V_x.

    Restricting to a smaller V factors through a larger one (the quotient at
    V is a further quotient of the one at V' ⊇ V, and dropped operators stay
    dropped), so maximal sets suffice.
    """
    n = m.config_count
    rows: list[dict[int, int]] = [dict() for _ in range(n)]
    for s in range(m.op_count):
        st = m.step[s]
        for a in range(n):
            b = st[a]
            if b != a:
                k = s * n + a
                rows[b][k] = rows[b].get(k, 0) + 1
                rows[a][k] = rows[a].get(k, 0) - 1
    for V in m.max_support_sets:
        part = restriction_partition(m, V)
        members = part.members()
        for s in sorted(V):
            for cls in members:
                rows.append({s * n + a: 1 for a in cls})
    rows = [r for r in rows if r]
    return SparseIntMatrix.from_columns(m.expression_dim, rows).transpose()


@dataclass
class EinvBasis:
    """Basis B of E_inv with coordinate map ``x ↦ P x`` (valid on E_inv)."""

    basis: SparseIntMatrix
    coords: SparseIntMatrix
    constraints: SparseIntMatrix

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def contains(self, e: Expression) -> bool:
        return not self.constraints.apply(dict(e.items()))

    def coordinates(self, e) -> dict[int, int]:
        return self.coords.apply(dict(e.items()) if isinstance(e, Expression) else e)


def compute_Einv_basis(m: ExcitationModel) -> EinvBasis:
    K = einv_constraints(m)
    res = snf(K, track_u=False, track_v=True, track_vinv=True)
    r, n = res.rank, K.ncols
    basis = res.V.select_columns(range(r, n))
    # rows r.. of V^-1, as a (n - r) x n matrix
    vt = res.V_inv.transpose()
    coords = vt.select_columns(range(r, n)).transpose()
    return EinvBasis(basis, coords, K)


@dataclass
class StatisticsResult:
    invariant_factors: list[int]
    free_rank: int
    generators: list[Expression]
    tf_factors: list[int]
    tf_generators: list[Expression]
    dims: tuple[int, int, int]
    identity: IdentityLattice = field(repr=False)
    einv: EinvBasis | None = field(default=None, repr=False)

    def group_string(self) -> str:
        return group_string(self.invariant_factors, self.free_rank)


def group_string(torsion: Sequence[int], free_rank: int = 0) -> str:
    parts = [f"Z{d}" for d in torsion] + ["Z"] * free_rank
    return " + ".join(parts) if parts else "0"


def compute_Tf(m: ExcitationModel, lattice: IdentityLattice | None = None) -> tuple[list[int], list[Expression]]:
    lat = lattice or identity_generators(m)
    sm = lat.smith
    factors, gens = [], []
    for i, lam in enumerate(sm.diagonal):
        if lam > 1:
            factors.append(lam)
            gens.append(Expression(sm.generator(i)))
    return factors, gens


def compute_T(m: ExcitationModel, lattice: IdentityLattice | None = None, check_tf: bool = True) -> StatisticsResult:
    lat = lattice or identity_generators(m)
    einv = compute_Einv_basis(m)
    d = einv.dim
    ycols = []
    for col in lat.columns:
        if einv.constraints.apply(col):
            raise AssertionError("identity generator outside E_inv")
        ycols.append(einv.coords.apply(col))
    Y = SparseIntMatrix._trusted(d, len(ycols), ycols)
    ys = RowSmith.of(Y)
    torsion, gens = [], []
    for i, lam in enumerate(ys.diagonal):
        if lam > 1:
            torsion.append(lam)
            gens.append(Expression(einv.basis.apply(ys.generator(i))))
    free = d - ys.rank
    tf, tf_gens = compute_Tf(m, lat)
    if check_tf and tf != torsion:
        raise AssertionError(f"T = {torsion} but T_f = {tf}")
    return StatisticsResult(torsion, free, gens, tf, tf_gens, (m.expression_dim, len(lat), d), lat, einv)


class FreeCoordinateError(ArithmeticError):
    """An E_inv element with a nonzero free coordinate modulo the lattice."""


def order_in(m: ExcitationModel, lattice: IdentityLattice, e: Expression, einv: EinvBasis | None = None) -> int:
    """0 if e is not in E_inv, else the order of e modulo the lattice."""
    if einv is not None:
        inside = einv.contains(e)
    else:
        inside = not einv_constraints(m).apply(dict(e.items()))
    if not inside:
        return 0
    n = lattice.smith.order(e)
    if n == 0:
        raise FreeCoordinateError("expression in E_inv has infinite order modulo the identities")
    return n


def order_of_expression(m: ExcitationModel, e: Expression, lattice: IdentityLattice | None = None,
                        einv: EinvBasis | None = None) -> int:
    return order_in(m, lattice or identity_generators(m), e, einv)


def impose(m: ExcitationModel, processes: Sequence[ProcessWord], lattice: IdentityLattice | None = None) -> IdentityLattice:
    """E_id + span{θ(g, a) : g in processes, a in A}."""
    lat = lattice or identity_generators(m)
    cols = _ColumnSet(10 ** 9)
    for c in lat.columns:
        cols.add(c)
    for g in processes:
        for a in range(m.config_count):
            e, _ = expand_theta(m, g, a)
            cols.add(dict(e.items()))
    return IdentityLattice(m, cols.cols, "E_id + F")


def modified_order(m: ExcitationModel, extended: IdentityLattice, e: Expression, einv: EinvBasis | None = None) -> int:
    return order_in(m, extended, e, einv)


class EliminationError(ValueError):
    pass


def eliminate_operator(m: ExcitationModel, e: Expression, t: int, lattice: IdentityLattice | None = None) -> Expression:
    """A representative of e modulo E_id with no θ(t, ·) terms."""
    lat = lattice or identity_generators(m)
    n = m.config_count
    lo, hi = t * n, (t + 1) * n
    rows_of = {k: k - lo for k in range(lo, hi)}
    cols = []
    keep = []
    for j, c in enumerate(lat.columns):
        sub = {rows_of[k]: v for k, v in c.items() if lo <= k < hi}
        if sub:
            cols.append(sub)
            keep.append(j)
    target = {k - lo: v for k, v in e.items() if lo <= k < hi}
    if not target:
        return e
    Mt = SparseIntMatrix._trusted(n, len(cols), cols)
    x = solve_integer(Mt, target)
    if x is None:
        raise EliminationError("no representative avoids this operator")
    d = dict(e.items())
    for j, xj in zip(keep, x):
        if xj:
            for k, v in lat.columns[j].items():
                d[k] = d.get(k, 0) - xj * v
    out = Expression(d)
    assert all(not (lo <= k < hi) for k, _ in out.items())
    return out
