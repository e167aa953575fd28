"""Exact sparse integer linear algebra.

Everything here works over the integers with Python's arbitrary precision
ints.  Matrices are stored column-major as dictionaries of nonzero entries.
The workhorse is :func:`snf`, a sparse Smith normal form that optionally
records the unimodular transforms; the other routines (integer solving,
kernels, quotient invariants, lattice comparison) are built on top of it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Sequence

DEFAULT_MAX_COLS = 50_000
DEFAULT_MAX_NNZ = 20_000_000


class ResourceLimitError(RuntimeError):
    """Raised when a computation exceeds the configured size caps."""


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) = x*a + y*b`` and ``g >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _axpy(dst: dict, src: Mapping, f: int) -> None:
    # dst += f * src, dropping zeros
    for k, v in src.items():
        nv = dst.get(k, 0) + f * v
        if nv:
            dst[k] = nv
        else:
            dst.pop(k, None)


def _lincomb(x: Mapping, y: Mapping, a: int, b: int) -> dict:
    out = {}
    if a:
        for k, v in x.items():
            out[k] = a * v
    if b:
        _axpy(out, y, b)
    return {k: v for k, v in out.items() if v}


def _nearest_quotient(v: int, p: int) -> int:
    q, r = divmod(v, p)
    # pick the remainder of smallest magnitude
    if r and 2 * abs(r) > abs(p):
        q += 1
    return q


class SparseIntMatrix:
    """Immutable sparse integer matrix, stored by columns.

    ``columns[j]`` maps row index to a nonzero entry.  Treat the returned
    dictionaries as read-only.
    """

    __slots__ = ("nrows", "ncols", "_cols")

    def __init__(self, nrows: int, ncols: int, columns: Sequence[Mapping[int, int]] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.nrows = nrows
        self.ncols = ncols
        if columns is None:
            cols = [dict() for _ in range(ncols)]
        else:
            if len(columns) != ncols:
                raise ValueError(f"expected {ncols} columns, got {len(columns)}")
            cols = []
            for col in columns:
                clean = {}
                for r, v in col.items():
                    if not 0 <= r < nrows:
                        raise IndexError(f"row index {r} out of range for {nrows} rows")
                    if v:
                        clean[int(r)] = int(v)
                cols.append(clean)
        self._cols = tuple(cols)

    @classmethod
    def _trusted(cls, nrows: int, ncols: int, cols: list[dict]) -> "SparseIntMatrix":
        m = object.__new__(cls)
        m.nrows = nrows
        m.ncols = ncols
        m._cols = tuple(cols)
        return m

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[tuple[int, int], int]) -> "SparseIntMatrix":
        cols: list[dict] = [dict() for _ in range(ncols)]
        for (r, c), v in entries.items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r},{c}) out of bounds for {nrows}x{ncols}")
            if v:
                cols[c][r] = int(v)
        return cls._trusted(nrows, ncols, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "SparseIntMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols: list[dict] = [dict() for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    cols[j][i] = int(v)
        return cls._trusted(nrows, ncols, cols)

    @classmethod
    def from_columns(cls, nrows: int, columns: Iterable[Mapping[int, int]]) -> "SparseIntMatrix":
        cols = list(columns)
        return cls(nrows, len(cols), cols)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls._trusted(n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def columns(self) -> tuple[dict, ...]:
        return self._cols

    def column(self, j: int) -> dict:
        return self._cols[j]

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        return {(r, c): v for c, col in enumerate(self._cols) for r, v in col.items()}

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        r, c = idx
        return self._cols[c].get(r, 0)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for c, col in enumerate(self._cols):
            for r, v in col.items():
                out[r][c] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        cols: list[dict] = [dict() for _ in range(self.nrows)]
        for c, col in enumerate(self._cols):
            for r, v in col.items():
                cols[r][c] = v
        return SparseIntMatrix._trusted(self.ncols, self.nrows, cols)

    def select_columns(self, idx: Iterable[int]) -> "SparseIntMatrix":
        cols = [self._cols[j] for j in idx]
        return SparseIntMatrix._trusted(self.nrows, len(cols), cols)

    def hstack(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if other.nrows != self.nrows:
            raise ValueError("row count mismatch in hstack")
        return SparseIntMatrix._trusted(self.nrows, self.ncols + other.ncols, list(self._cols) + list(other._cols))

    def apply(self, vec: Mapping[int, int] | Sequence[int]) -> dict[int, int]:
        """Sparse matrix-vector product; ``vec`` may be a dict or a dense list."""
        items = vec.items() if isinstance(vec, Mapping) else enumerate(vec)
        out: dict[int, int] = {}
        for j, x in items:
            if x:
                _axpy(out, self._cols[j], x)
        return out

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [self.apply(col) for col in other._cols]
        return SparseIntMatrix._trusted(self.nrows, other.ncols, cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(c.items())) for c in self._cols)))

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def determinant(m: SparseIntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination; for tests and checks."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a = m.to_dense()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SnfResult:
    """Smith form ``D = U @ M @ V`` with ``D`` diagonal.

    ``diagonal`` has ``min(rows, cols)`` entries: the invariant factors
    ``1 <= λ_1 | λ_2 | ... | λ_rank`` followed by zeros.  ``U_inv`` and
    ``V_inv`` are the exact inverses of ``U`` and ``V``.  Any transform not
    requested is ``None``.
    """

    shape: tuple[int, int]
    diagonal: tuple[int, ...]
    rank: int
    U: SparseIntMatrix | None = None
    U_inv: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None
    V_inv: SparseIntMatrix | None = None

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.diagonal[: self.rank]

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal[: self.rank] if d > 1)

    def D(self) -> SparseIntMatrix:
        r, c = self.shape
        return SparseIntMatrix.from_entries(r, c, {(i, i): d for i, d in enumerate(self.diagonal) if d})

    def verify(self, m: SparseIntMatrix) -> bool:
        """Check ``U @ m @ V == D`` exactly (requires U and V)."""
        if self.U is None or self.V is None:
            raise ValueError("verification needs both U and V")
        return (self.U @ m @ self.V) == self.D()


class _Eliminator:
    """Sparse fraction-free elimination to Smith form.

    Pivot choice: among the columns with the fewest entries, the entry of
    least magnitude, then the shortest row, then the lowest row index.  The
    active-column heap is keyed by (size, column) so ties go to the lowest
    column.  Everything is deterministic.
    """

    def __init__(self, m: SparseIntMatrix, track_u: bool, track_uinv: bool,
                 track_v: bool, track_vinv: bool, max_nnz: int):
        self.nrows, self.ncols = m.shape
        self.rows: dict[int, dict[int, int]] = {}
        self.colrows: dict[int, set[int]] = {}
        nnz = 0
        for c, col in enumerate(m.columns):
            if col:
                self.colrows[c] = set(col)
            for r, v in col.items():
                self.rows.setdefault(r, {})[c] = v
                nnz += 1
        self.nnz = nnz
        self.max_nnz = max_nnz
        self.U = {i: {i: 1} for i in range(self.nrows)} if track_u else None
        self.Uinv = {i: {i: 1} for i in range(self.nrows)} if track_uinv else None
        self.V = {j: {j: 1} for j in range(self.ncols)} if track_v else None
        self.Vinv = {j: {j: 1} for j in range(self.ncols)} if track_vinv else None
        self.pivots: list[tuple[int, int, int]] = []

    # elementary operations -------------------------------------------------

    def row_add(self, t: int, s: int, f: int) -> None:
        """row_t += f * row_s (matrix and transforms)."""
        rows, colrows = self.rows, self.colrows
        rt = rows.setdefault(t, {})
        for c, v in rows[s].items():
            old = rt.get(c, 0)
            nv = old + f * v
            if nv:
                rt[c] = nv
                if not old:
                    colrows.setdefault(c, set()).add(t)
                    self.nnz += 1
            elif old:
                del rt[c]
                colrows[c].discard(t)
                self.nnz -= 1
        if self.nnz > self.max_nnz:
            raise ResourceLimitError(f"fill-in exceeded {self.max_nnz} nonzeros during Smith reduction")
        if self.U is not None:
            _axpy(self.U[t], self.U[s], f)
        if self.Uinv is not None:
            # U_inv <- U_inv E^{-1}: column s -= f * column t
            _axpy(self.Uinv[s], self.Uinv[t], -f)

    def col_add_pivot_row(self, t: int, s: int, f: int, r: int) -> None:
        """col_t += f * col_s where col_s is known to be supported on row r only."""
        row = self.rows[r]
        nv = row.get(t, 0) + f * row[s]
        if nv:
            row[t] = nv
        else:
            row.pop(t, None)
            self.colrows[t].discard(r)
            self.nnz -= 1
        if self.V is not None:
            _axpy(self.V[t], self.V[s], f)
        if self.Vinv is not None:
            # V_inv <- E^{-1} V_inv: row s -= f * row t
            _axpy(self.Vinv[s], self.Vinv[t], -f)

    def negate_row(self, r: int) -> None:
        if self.U is not None:
            self.U[r] = {k: -v for k, v in self.U[r].items()}
        if self.Uinv is not None:
            self.Uinv[r] = {k: -v for k, v in self.Uinv[r].items()}

    def mix_rows(self, i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        """(row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j) on transforms only; ad - bc = 1."""
        if self.U is not None:
            ui, uj = self.U[i], self.U[j]
            self.U[i], self.U[j] = _lincomb(ui, uj, a, b), _lincomb(ui, uj, c, d)
        if self.Uinv is not None:
            # inverse of [[a,b],[c,d]] is [[d,-b],[-c,a]]; acts on columns from the right
            wi, wj = self.Uinv[i], self.Uinv[j]
            self.Uinv[i], self.Uinv[j] = _lincomb(wi, wj, d, -c), _lincomb(wi, wj, -b, a)

    def mix_cols(self, i: int, j: int, a: int, b: int, c: int, d: int) -> None:
        """(col_i, col_j) <- (a col_i + c col_j, b col_i + d col_j), i.e. V <- V [[a,b],[c,d]]."""
        if self.V is not None:
            vi, vj = self.V[i], self.V[j]
            self.V[i], self.V[j] = _lincomb(vi, vj, a, c), _lincomb(vi, vj, b, d)
        if self.Vinv is not None:
            wi, wj = self.Vinv[i], self.Vinv[j]
            self.Vinv[i], self.Vinv[j] = _lincomb(wi, wj, d, -b), _lincomb(wi, wj, -c, a)

    # main loop ---------------------------------------------------------------

    def _choose_row(self, c: int) -> int:
        rows = self.rows
        return min(self.colrows[c], key=lambda r: (abs(rows[r][c]), len(rows[r]), r))

    def run(self) -> None:
        heap = [(len(rs), c) for c, rs in self.colrows.items()]
        heapq.heapify(heap)
        rows, colrows = self.rows, self.colrows
        track_col = self.V is not None or self.Vinv is not None
        while heap:
            size, c = heapq.heappop(heap)
            rs = colrows.get(c)
            if rs is None:
                continue
            if len(rs) != size:
                if rs:
                    heapq.heappush(heap, (len(rs), c))
                else:
                    del colrows[c]
                continue
            r = self._choose_row(c)
            touched_cols: set[int] = set()
            while True:
                p = rows[r][c]
                # clear the pivot column with row operations
                dirty = False
                for r2 in sorted(colrows[c]):
                    if r2 == r:
                        continue
                    q = _nearest_quotient(rows[r2][c], p)
                    if q:
                        touched_cols.update(rows[r].keys())
                        self.row_add(r2, r, -q)
                    if rows[r2].get(c):
                        dirty = True
                if dirty:
                    r = self._choose_row(c)
                    continue
                # clear the pivot row with column operations
                prow = rows[r]
                if abs(p) == 1 and not track_col:
                    for c2 in list(prow):
                        if c2 != c:
                            colrows[c2].discard(r)
                            touched_cols.add(c2)
                            self.nnz -= 1
                    rows[r] = {c: p}
                    break
                for c2 in sorted(prow):
                    if c2 == c:
                        continue
                    touched_cols.add(c2)
                    q = _nearest_quotient(prow[c2], p)
                    if q:
                        self.col_add_pivot_row(c2, c, -q, r)
                    if prow.get(c2):
                        dirty = True
                if dirty:
                    touched_cols.add(c)
                    c = min((k for k in prow if k != c), key=lambda k: (abs(prow[k]), len(colrows[k]), k))
                    continue
                break
            self.pivots.append((r, c, p))
            del rows[r]
            del colrows[c]
            self.nnz -= 1
            for c2 in touched_cols:
                rs2 = colrows.get(c2)
                if rs2 is not None:
                    if rs2:
                        heapq.heappush(heap, (len(rs2), c2))
                    else:
                        del colrows[c2]

    def normalize(self) -> list[tuple[int, int, int]]:
        """Make pivots positive and enforce the divisibility chain; return ordered pivots."""
        pivots = []
        for r, c, p in self.pivots:
            if p < 0:
                self.negate_row(r)
                p = -p
            pivots.append([r, c, p])
        units = [pv for pv in pivots if pv[2] == 1]
        rest = sorted((pv for pv in pivots if pv[2] != 1), key=lambda pv: (pv[2], pv[0]))
        k = len(rest)
        for i in range(k):
            for j in range(i + 1, k):
                a, b = rest[i][2], rest[j][2]
                if b % a == 0:
                    continue
                g, x, y = xgcd(a, b)
                ri, ci = rest[i][0], rest[i][1]
                rj, cj = rest[j][0], rest[j][1]
                # U2 = [[x, y], [-b/g, a/g]], V2 = [[1, -y b/g], [1, x a/g]]
                self.mix_rows(ri, rj, x, y, -(b // g), a // g)
                self.mix_cols(ci, cj, 1, -y * (b // g), 1, x * (a // g))
                rest[i][2] = g
                rest[j][2] = a // g * b
        # gcd steps can produce new units; they move to the front
        ones = units + [pv for pv in rest if pv[2] == 1]
        others = [pv for pv in rest if pv[2] != 1]
        return [tuple(pv) for pv in ones + others]


def snf(m: SparseIntMatrix, *, track_u: bool = True, track_uinv: bool = False,
        track_v: bool = True, track_vinv: bool = False,
        max_cols: int = DEFAULT_MAX_COLS, max_nnz: int = DEFAULT_MAX_NNZ) -> SnfResult:
    """Smith normal form of ``m``.

    Only the requested transforms are accumulated; skipping V saves most of
    the memory when only invariant factors and coordinates are needed.
    Raises :class:`ResourceLimitError` past ``max_cols`` columns or
    ``max_nnz`` working nonzeros.
    """
    if m.ncols > max_cols:
        raise ResourceLimitError(f"matrix has {m.ncols} columns; cap is {max_cols}")
    if m.nnz() > max_nnz:
        raise ResourceLimitError(f"matrix has {m.nnz()} nonzeros; cap is {max_nnz}")
    el = _Eliminator(m, track_u, track_uinv, track_v, track_vinv, max_nnz)
    el.run()
    pivots = el.normalize()
    nr, nc = m.shape
    rank = len(pivots)
    piv_rows = [pv[0] for pv in pivots]
    piv_cols = [pv[1] for pv in pivots]
    seen_r, seen_c = set(piv_rows), set(piv_cols)
    row_order = piv_rows + [i for i in range(nr) if i not in seen_r]
    col_order = piv_cols + [j for j in range(nc) if j not in seen_c]
    diagonal = tuple([pv[2] for pv in pivots] + [0] * (min(nr, nc) - rank))

    U = U_inv = V = V_inv = None
    if el.U is not None:
        # U' = P U : row i of U' is row row_order[i] of U, stored here by columns
        cols: list[dict] = [dict() for _ in range(nr)]
        for i, r in enumerate(row_order):
            for k, v in el.U[r].items():
                cols[k][i] = v
        U = SparseIntMatrix._trusted(nr, nr, cols)
    if el.Uinv is not None:
        # U_inv' = U_inv P^T : column i is column row_order[i]; el.Uinv is stored by columns
        U_inv = SparseIntMatrix._trusted(nr, nr, [el.Uinv[r] for r in row_order])
    if el.V is not None:
        V = SparseIntMatrix._trusted(nc, nc, [el.V[c] for c in col_order])
    if el.Vinv is not None:
        cols = [dict() for _ in range(nc)]
        for i, c in enumerate(col_order):
            for k, v in el.Vinv[c].items():
                cols[k][i] = v
        V_inv = SparseIntMatrix._trusted(nc, nc, cols)
    return SnfResult((nr, nc), diagonal, rank, U, U_inv, V, V_inv)


def _as_dict(vec: Mapping[int, int] | Sequence[int]) -> dict[int, int]:
    if isinstance(vec, Mapping):
        return {k: v for k, v in vec.items() if v}
    return {i: v for i, v in enumerate(vec) if v}


def solve_with_snf(res: SnfResult, b: Mapping[int, int] | Sequence[int]) -> dict[int, int] | None:
    """Integer solution of ``M x = b`` from a precomputed Smith form (needs U and V)."""
    if res.U is None or res.V is None:
        raise ValueError("solving needs U and V")
    c = res.U.apply(_as_dict(b))
    y = {}
    for i, ci in c.items():
        if i < res.rank:
            lam = res.diagonal[i]
            if ci % lam:
                return None
            y[i] = ci // lam
        else:
            return None
    return res.V.apply(y)


def solve_integer(m: SparseIntMatrix, b: Mapping[int, int] | Sequence[int]) -> list[int] | None:
    """Return an integer ``x`` with ``m @ x == b``, or ``None`` if none exists."""
    if isinstance(b, Mapping):
        if any(not 0 <= k < m.nrows for k in b):
            raise ValueError("right-hand side index out of range")
    elif len(b) != m.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.nrows}")
    res = snf(m, track_u=True, track_v=True)
    x = solve_with_snf(res, b)
    if x is None:
        return None
    return [x.get(j, 0) for j in range(m.ncols)]


def kernel_basis(m: SparseIntMatrix, **caps) -> SparseIntMatrix:
    """Columns form a basis of the integer kernel ``{x : m x = 0}``."""
    res = snf(m, track_u=False, track_v=True, **caps)
    return res.V.select_columns(range(res.rank, m.ncols))


def quotient_invariants(generators: SparseIntMatrix, ambient_dim: int, **caps) -> list[int]:
    """Invariant factors of ``Z^ambient_dim / span(columns)``; 0 marks a free factor."""
    if generators.nrows != ambient_dim:
        raise ValueError("generator rows must equal the ambient dimension")
    res = snf(generators, track_u=False, track_v=False, **caps)
    return list(res.invariant_factors) + [0] * (ambient_dim - res.rank)


def hermite_normal_form(generators: SparseIntMatrix) -> SparseIntMatrix:
    """Canonical basis of the lattice spanned by the columns.

    Returns the nonzero columns of the column-style Hermite form: pivots
    (lowest-index nonzero row of each basis vector) strictly increase,
    pivot entries are positive and every other basis vector's entry in a
    pivot row is reduced into ``[0, pivot)``.  Two generator sets span the
    same lattice iff their Hermite forms are equal.
    """
    basis: dict[int, dict[int, int]] = {}  # pivot row -> vector

    def lead(v: dict) -> int:
        return min(v)

    for col in generators.columns:
        v = dict(col)
        while v:
            p = lead(v)
            w = basis.get(p)
            if w is None:
                if v[p] < 0:
                    v = {k: -x for k, x in v.items()}
                basis[p] = v
                break
            a, b = w[p], v[p]
            if b % a == 0:
                _axpy(v, w, -(b // a))
                continue
            g, x, y = xgcd(a, b)
            new_w = _lincomb(w, v, x, y)
            new_v = _lincomb(w, v, -(b // g), a // g)
            if new_w[p] < 0:
                new_w = {k: -t for k, t in new_w.items()}
            basis[p] = new_w
            v = new_v
    pivots = sorted(basis)
    # reduce pivot rows top-down; subtracting w only touches rows >= its pivot
    for idx in range(len(pivots)):
        p = pivots[idx]
        w = basis[p]
        for q in pivots[:idx]:
            u = basis[q]
            x = u.get(p, 0)
            if x:
                f = x // w[p]
                if f:
                    _axpy(u, w, -f)
    return SparseIntMatrix(generators.nrows, len(pivots), [basis[p] for p in pivots])


def same_lattice(a: SparseIntMatrix, b: SparseIntMatrix) -> bool:
    return hermite_normal_form(a) == hermite_normal_form(b)
