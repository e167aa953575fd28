"""Finite simplicial complexes, oriented boundaries and the builtin example library."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .abelian import Element, FiniteAbelianGroup, product_group

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplices are increasing vertex tuples, listed lexicographically per dimension."""

    vertex_count: int
    simplices_by_dim: tuple[tuple[Simplex, ...], ...]
    _index: tuple[dict, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", tuple({s: i for i, s in enumerate(level)}
                                                 for level in self.simplices_by_dim))

    @property
    def dimension(self) -> int:
        return len(self.simplices_by_dim) - 1

    def simplices(self, dim: int) -> tuple[Simplex, ...]:
        if 0 <= dim < len(self.simplices_by_dim):
            return self.simplices_by_dim[dim]
        return ()

    def count(self, dim: int) -> int:
        return len(self.simplices(dim))

    def index(self, s: Sequence[int]) -> int:
        s = tuple(s)
        return self._index[len(s) - 1][s]

    def __contains__(self, s) -> bool:
        s = tuple(s)
        return 0 < len(s) <= len(self._index) and s in self._index[len(s) - 1]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(level) for d, level in enumerate(self.simplices_by_dim))

    def chain_group(self, dim: int, group: FiniteAbelianGroup) -> FiniteAbelianGroup:
        return product_group([group] * self.count(dim))

    def boundary_chain(self, s: Sequence[int], g: Element, group: FiniteAbelianGroup) -> Element:
        """Alternating-sum boundary of ``g`` placed on ``s``, as a flat chain over (dim-1)-simplices.

        The chain has one block of ``group.rank`` residues per face, in complex order.
        """
        s = tuple(s)
        if len(s) < 2:
            raise ValueError("boundary of a vertex is not a chain of simplices")
        if s not in self:
            raise KeyError(f"{s} is not in the complex")
        k = group.rank
        out = [0] * (self.count(len(s) - 2) * k)
        neg = group.neg(g)
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            j = self.index(face)
            val = g if i % 2 == 0 else neg
            for t in range(k):
                out[j * k + t] = (out[j * k + t] + val[t]) % group.invariant_orders[t]
        return tuple(out)

    def subcomplex(self, maximal: Iterable[Sequence[int]]) -> "SimplicialComplex":
        sub = from_maximal(self.vertex_count, maximal)
        for level in sub.simplices_by_dim:
            for s in level:
                if s not in self:
                    raise ValueError(f"{s} is not a simplex of the ambient complex")
        return sub


def from_maximal(vertex_count: int, maximal_simplices: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Face closure of the given simplices, ordered lexicographically within each dimension."""
    levels: list[set] = []
    for raw in maximal_simplices:
        s = tuple(sorted(raw))
        if len(set(s)) != len(s):
            raise ValueError(f"simplex {tuple(raw)} repeats a vertex")
        if not s:
            continue
        if s[0] < 0 or s[-1] >= vertex_count:
            raise ValueError(f"simplex {s} uses a vertex outside 0..{vertex_count - 1}")
        while len(levels) < len(s):
            levels.append(set())
        for k in range(1, len(s) + 1):
            levels[k - 1].update(combinations(s, k))
    if not levels:
        levels.append(set())
    # isolated vertices are still vertices
    levels[0].update((v,) for v in range(vertex_count))
    return SimplicialComplex(vertex_count, tuple(tuple(sorted(level)) for level in levels))


@dataclass(frozen=True)
class CrossingGraph:
    """A graph drawn with crossings: parallel edges allowed, crossing points add support points.

    ``edges`` lists ``(tail, head, crossing_ids)``; crossing ``k`` becomes
    point ``vertex_count + k`` in the support of every edge that passes it.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, tuple[int, ...]], ...]
    crossing_count: int
    edge_labels: tuple[str, ...]


@dataclass(frozen=True)
class Builtin:
    name: str
    p: int
    complex: SimplicialComplex | None = None
    graph: CrossingGraph | None = None
    desk_scale: bool = True
    note: str = ""


def polygon(k: int) -> SimplicialComplex:
    if k < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    return from_maximal(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(n: int) -> SimplicialComplex:
    return from_maximal(n, combinations(range(n), 2))


def complete_bipartite(m: int, n: int) -> SimplicialComplex:
    return from_maximal(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def boundary_simplex(d: int) -> SimplicialComplex:
    """Boundary of the d-simplex: all d-element vertex subsets of d+1 vertices."""
    if d < 1:
        raise ValueError("boundary-simplex needs d >= 1")
    return from_maximal(d + 1, combinations(range(d + 1), d))


def centered_tetrahedron_2skel() -> SimplicialComplex:
    outer = list(combinations(range(4), 3))
    spokes = [(i, j, 4) for i, j in combinations(range(4), 2)]
    return from_maximal(5, outer + spokes)


def torus_7() -> SimplicialComplex:
    """Seven-vertex torus: triangles {i,i+1,i+3} and {i,i+2,i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return from_maximal(7, tris)


def klein_bottle(m: int = 4, n: int = 4) -> SimplicialComplex:
    """Triangulated m x n grid with the sides glued as a Klein bottle.

    (i, j+n) ~ (i, j) and (i+m, j) ~ (i, -j).
    """
    def vid(i: int, j: int) -> int:
        if i >= m:
            i, j = i - m, -j
        return (i % m) * n + j % n

    tris = []
    for i in range(m):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    for t in tris:
        if len(set(t)) != 3:
            raise ValueError(f"grid {m}x{n} is too small for a simplicial Klein bottle")
    return from_maximal(m * n, tris)


def double_arc_chain() -> CrossingGraph:
    # two arcs 0-2 and two arcs 1-3; each upper arc crosses the other upper arc, same below
    return CrossingGraph(
        4,
        ((0, 2, (0,)), (0, 2, (1,)), (1, 3, (0,)), (1, 3, (1,))),
        2,
        ("a02", "b02", "a13", "b13"),
    )


def double_y_graph() -> CrossingGraph:
    # vertices A1=0, A2=1, B=2, C=3, D1=4, D2=5; A1-C crosses D1-B and A2-C crosses D2-B
    return CrossingGraph(
        6,
        ((0, 3, (0,)), (1, 3, (1,)), (0, 1, ()), (2, 4, (0,)), (2, 5, (1,)), (4, 5, ())),
        2,
        ("U[0,3]", "U[1,3]", "U[0,1]", "U[2,4]", "U[2,5]", "U[4,5]"),
    )


BUILTIN_NAMES = ("triangle", "square", "polygon", "centered-triangle", "k5", "k33",
                 "centered-tetrahedron-1skel", "centered-tetrahedron-2skel", "boundary-simplex",
                 "points", "double-arc-chain", "double-y-graph", "torus-7", "klein-bottle")


def builtin(name: str, param: int | None = None) -> Builtin:
    """Look up a builtin; ``name`` may carry its parameter as ``polygon:5`` or ``points:2``."""
    m = re.fullmatch(r"\s*([a-z0-9-]+)\s*(?:[:(]\s*(-?\d+)\s*\)?)?\s*", name.lower())
    if not m:
        raise ValueError(f"bad builtin name {name!r}")
    key = m.group(1)
    if m.group(2) is not None:
        if param is not None and param != int(m.group(2)):
            raise ValueError("parameter given twice")
        param = int(m.group(2))

    def need(default: int | None = None) -> int:
        if param is None:
            if default is None:
                raise ValueError(f"builtin {key} needs a parameter, e.g. {key}:3")
            return default
        return param

    def no_param():
        if param is not None:
            raise ValueError(f"builtin {key} takes no parameter")

    if key == "triangle":
        no_param()
        return Builtin(key, 0, polygon(3))
    if key == "square":
        no_param()
        return Builtin(key, 0, polygon(4))
    if key == "polygon":
        return Builtin(f"polygon:{need()}", 0, polygon(need()))
    if key == "centered-triangle":
        no_param()
        return Builtin(key, 0, complete_graph(4))
    if key == "k5":
        no_param()
        return Builtin(key, 0, complete_graph(5))
    if key == "k33":
        no_param()
        return Builtin(key, 0, complete_bipartite(3, 3))
    if key == "centered-tetrahedron-1skel":
        no_param()
        return Builtin(key, 0, complete_graph(5))
    if key == "centered-tetrahedron-2skel":
        no_param()
        return Builtin(key, 1, centered_tetrahedron_2skel())
    if key == "boundary-simplex":
        d = need()
        return Builtin(f"boundary-simplex:{d}", d - 2, boundary_simplex(d))
    if key == "points":
        n = need()
        if n < 1:
            raise ValueError("points needs n >= 1")
        return Builtin(f"points:{n}", -1, from_maximal(n, []))
    if key == "double-arc-chain":
        no_param()
        return Builtin(key, 0, graph=double_arc_chain())
    if key == "double-y-graph":
        no_param()
        return Builtin(key, 0, graph=double_y_graph())
    if key == "torus-7":
        no_param()
        return Builtin(key, 1, torus_7(), desk_scale=False,
                       note="p=1 statistics at this size is far beyond desk scale")
    if key == "klein-bottle":
        k = need(4)
        return Builtin(key if param is None else f"klein-bottle:{k}", 1, klein_bottle(k, k),
                       desk_scale=False, note="p=1 statistics at this size is far beyond desk scale")
    raise ValueError(f"unknown builtin {key!r}; known: {', '.join(BUILTIN_NAMES)}")
