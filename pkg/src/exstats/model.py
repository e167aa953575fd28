"""Excitation models (A, S, boundary, supports) and their constructions.

Configurations are addressed by dense indices with 0 the trivial
configuration.  Each model keeps a step table ``step[s][a]`` giving the
index of ``a + ∂s``; everything downstream works on indices only.

A model may be a quotient: then the enumerated elements of the ambient
chain group are grouped into classes and a configuration index names a
class.  ``representative(a)`` returns one chain in the class.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .abelian import (DEFAULT_CLOSURE_CAP, CosetPartition, Element, ElementIndex,
                      FiniteAbelianGroup, closure, coset_partition, format_element)
from .complex import Builtin, CrossingGraph, SimplicialComplex
from .linalg import ResourceLimitError

DEFAULT_SET_CAP = 10 ** 6


@dataclass(frozen=True)
class Operator:
    id: int
    label: str
    boundary: Element
    support: frozenset[int]


@dataclass
class ExcitationModel:
    ambient: FiniteAbelianGroup
    elements: ElementIndex
    partition: CosetPartition | None
    operators: list[Operator]
    point_count: int
    name: str = ""
    step: list[list[int]] = field(default_factory=list, repr=False)
    max_support_sets: list[frozenset[int]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        for op in self.operators:
            if not op.support:
                raise ValueError(f"operator {op.label} has empty support")
            if any(not 0 <= x < self.point_count for x in op.support):
                raise ValueError(f"operator {op.label} has a support point outside 0..{self.point_count - 1}")
        if self.partition is None:
            self._reps = list(range(len(self.elements)))
            self._class_of = None
            n = len(self.elements)
        else:
            self._reps = self.partition.representatives()
            self._class_of = self.partition.class_of
            n = self.partition.class_count
        self._n = n
        self.step = [[self._locate(self.ambient.add(self.representative(a), op.boundary)) for a in range(n)]
                     for op in self.operators]
        self._back = None
        self.boundary_index = [self.step[s][0] for s in range(len(self.operators))]
        points: list[set[int]] = [set() for _ in range(self.point_count)]
        for op in self.operators:
            for x in op.support:
                points[x].add(op.id)
        self.point_sets = [frozenset(v) for v in points]
        distinct = {v for v in self.point_sets if v}
        self.max_support_sets = sorted((v for v in distinct if not any(v < w for w in distinct)),
                                       key=lambda v: sorted(v))
        self._labels = {op.label: op.id for op in self.operators}

    # configurations

    @property
    def config_count(self) -> int:
        return self._n

    @property
    def op_count(self) -> int:
        return len(self.operators)

    @property
    def expression_dim(self) -> int:
        return self._n * len(self.operators)

    def representative(self, a: int) -> Element:
        return self.elements[self._reps[a]]

    def _locate(self, element: Element) -> int:
        i = self.elements.position.get(element)
        if i is None:
            raise ValueError(f"{format_element(element)} is not a configuration of this model")
        return i if self._class_of is None else self._class_of[i]

    def config_index(self, element: Sequence[int]) -> int:
        return self._locate(self.ambient.element(element))

    def add(self, a: int, b: int) -> int:
        return self._locate(self.ambient.add(self.representative(a), self.representative(b)))

    def neg(self, a: int) -> int:
        return self._locate(self.ambient.neg(self.representative(a)))

    def back(self, s: int) -> list[int]:
        """Inverse step table: ``back(s)[b]`` is the ``a`` with ``a + ∂s = b``."""
        if self._back is None:
            self._back = [None] * len(self.operators)
        if self._back[s] is None:
            inv = [0] * self._n
            for a, b in enumerate(self.step[s]):
                inv[b] = a
            self._back[s] = inv
        return self._back[s]

    def format_config(self, a: int) -> str:
        return format_element(self.representative(a))

    # operators and supports

    def op_id(self, label: str) -> int:
        return self._labels[label]

    def labels(self) -> list[str]:
        return [op.label for op in self.operators]

    def has_common_support(self, ops: Iterable[int]) -> bool:
        ops = set(ops)
        return any(ops <= v for v in self.max_support_sets)


def _nonzero_unique(operators: list[Operator], zero: Element) -> list[Element]:
    seen: dict[Element, None] = {}
    for op in operators:
        if op.boundary != zero:
            seen.setdefault(op.boundary, None)
    return list(seen)


def from_explicit(ambient: FiniteAbelianGroup, operators: Sequence[tuple[str, Sequence[int], Iterable[int]]],
                  point_count: int, name: str = "", cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    """Abstract model: each operator is ``(label, boundary residues, support points)``."""
    ops = []
    labels = set()
    for i, (label, boundary, support) in enumerate(operators):
        if label in labels:
            raise ValueError(f"duplicate operator label {label!r}")
        labels.add(label)
        b = tuple(boundary)
        if not ambient.contains(b):
            b = ambient.element(b)
        ops.append(Operator(i, label, b, frozenset(support)))
    elements = closure(ambient, _nonzero_unique(ops, ambient.zero()), cap)
    return ExcitationModel(ambient, elements, None, ops, point_count, name)


def _generator_list(group: FiniteAbelianGroup, generating_set) -> list[Element]:
    if generating_set is None:
        return group.standard_generators()
    gens = [group.element(g) for g in generating_set]
    if len(closure(group, gens)) != group.order:
        raise ValueError("generating set does not generate the group")
    return gens


def simplex_label(s: Sequence[int], k: int, multi: bool) -> str:
    body = ",".join(str(v) for v in s)
    return f"U[{body};{k}]" if multi else f"U[{body}]"


def from_simplicial(C: SimplicialComplex, p: int, G: FiniteAbelianGroup, generating_set=None,
                    exclude: Iterable[Sequence[int]] = (), name: str = "",
                    cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    """Operators (σ, g) for (p+1)-simplices σ and g in the generating set; A = B_p(C, G).

    ``p = -1`` is the extended model: A = G and vertex operators ``(v, g)`` with ∂ = g.
    """
    gens = _generator_list(G, generating_set)
    multi = len(gens) > 1
    skip = {tuple(sorted(s)) for s in exclude}
    ops: list[Operator] = []
    if p == -1:
        ambient = G
        for (v,) in C.simplices(0):
            if (v,) in skip:
                continue
            for k, g in enumerate(gens):
                ops.append(Operator(len(ops), simplex_label((v,), k, multi), g, frozenset((v,))))
    elif p >= 0:
        ambient = C.chain_group(p, G)
        for s in C.simplices(p + 1):
            if s in skip:
                continue
            for k, g in enumerate(gens):
                ops.append(Operator(len(ops), simplex_label(s, k, multi), C.boundary_chain(s, g, G), frozenset(s)))
    else:
        raise ValueError("p must be >= -1")
    elements = closure(ambient, _nonzero_unique(ops, ambient.zero()), cap)
    return ExcitationModel(ambient, elements, None, ops, C.vertex_count, name)


def from_crossing_graph(graph: CrossingGraph, G: FiniteAbelianGroup, generating_set=None,
                        name: str = "", cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    """Particle model (p = 0) on a drawn graph whose crossings are shared support points."""
    gens = _generator_list(G, generating_set)
    multi = len(gens) > 1
    ambient = FiniteAbelianGroup(G.invariant_orders * graph.vertex_count)
    r = G.rank
    ops = []
    for (u, v, crossings), label in zip(graph.edges, graph.edge_labels):
        for k, g in enumerate(gens):
            b = [0] * (r * graph.vertex_count)
            for t in range(r):
                b[v * r + t] += g[t]
                b[u * r + t] -= g[t]
            support = {u, v} | {graph.vertex_count + c for c in crossings}
            lab = f"{label[:-1]};{k}]" if multi and label.endswith("]") else (f"{label};{k}" if multi else label)
            ops.append(Operator(len(ops), lab, ambient.element(b), frozenset(support)))
    elements = closure(ambient, _nonzero_unique(ops, ambient.zero()), cap)
    return ExcitationModel(ambient, elements, None, ops, graph.vertex_count + graph.crossing_count, name)


def from_builtin(b: Builtin, G: FiniteAbelianGroup, p: int | None = None, generating_set=None,
                 cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    if b.graph is not None:
        if p not in (None, 0):
            raise ValueError(f"{b.name} is a particle model; p must be 0")
        return from_crossing_graph(b.graph, G, generating_set, name=b.name, cap=cap)
    return from_simplicial(b.complex, b.p if p is None else p, G, generating_set, name=b.name, cap=cap)


def relative_model(C: SimplicialComplex, C_sub: SimplicialComplex, p: int, G: FiniteAbelianGroup,
                   generating_set=None, cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    """A = B_p(C,G) / B_p(C_sub,G), operators on the (p+1)-simplices of C outside C_sub."""
    full = from_simplicial(C, p, G, generating_set, cap=cap)
    inside = set(C_sub.simplices(p + 1))
    for s in inside:
        if s not in C:
            raise ValueError(f"{s} is not a simplex of the ambient complex")
    sub_bounds = [op.boundary for op in full.operators if tuple(sorted(op.support)) in inside]
    part = coset_partition(full.elements, sub_bounds)
    keep = [op for op in full.operators if tuple(sorted(op.support)) not in inside]
    ops = [Operator(i, op.label, op.boundary, op.support) for i, op in enumerate(keep)]
    return ExcitationModel(full.ambient, full.elements, part, ops, full.point_count, "relative")


def _partition_by_ops(m: ExcitationModel, ops: Iterable[int]) -> CosetPartition:
    """Classes of configurations modulo the span of ``{∂s : s in ops}``."""
    n = m.config_count
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in ops:
        row = m.step[s]
        for a in range(n):
            ra, rb = find(a), find(row[a])
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    labels: dict[int, int] = {}
    class_of = []
    for a in range(n):
        root = find(a)
        if root not in labels:
            labels[root] = len(labels)
        class_of.append(labels[root])
    return CosetPartition(tuple(class_of), len(labels))


def restriction_partition(m: ExcitationModel, V: Iterable[int]) -> CosetPartition:
    """Configuration classes of the quotient model at V: A modulo ∂ of the operators outside V."""
    V = set(V)
    return _partition_by_ops(m, [s for s in range(m.op_count) if s not in V])


def _compose(m: ExcitationModel, part: CosetPartition) -> CosetPartition:
    # lift a partition of m's configurations to the enumerated elements
    base = m._class_of
    if base is None:
        return part
    return CosetPartition(tuple(part.class_of[c] for c in base), part.class_count)


@dataclass(frozen=True)
class QuotientMap:
    """q_V on expressions: θ(s,a) ↦ θ(op_map[s], class_of[a]) for s in V, else 0."""

    op_map: dict[int, int]
    class_of: tuple[int, ...]


def quotient_model(m: ExcitationModel, V: Iterable[int]) -> tuple[ExcitationModel, QuotientMap]:
    V = sorted(set(V))
    part = restriction_partition(m, V)
    keep = [m.operators[s] for s in V]
    ops = [Operator(i, op.label, op.boundary, op.support) for i, op in enumerate(keep)]
    q = ExcitationModel(m.ambient, m.elements, _compose(m, part), ops, m.point_count, m.name + "/V")
    return q, QuotientMap({s: i for i, s in enumerate(V)}, part.class_of)


def sub_model(m: ExcitationModel, S_keep: Iterable[int], cap: int = DEFAULT_CLOSURE_CAP) -> ExcitationModel:
    if m.partition is not None:
        raise ValueError("sub_model expects a non-quotient model")
    keep = [m.operators[s] for s in sorted(set(S_keep))]
    ops = [Operator(i, op.label, op.boundary, op.support) for i, op in enumerate(keep)]
    elements = closure(m.ambient, _nonzero_unique(ops, m.ambient.zero()), cap)
    return ExcitationModel(m.ambient, elements, None, ops, m.point_count, m.name + "/sub")


def add_operator(m: ExcitationModel, order: int, label: str = "t") -> ExcitationModel:
    """Add one operator whose boundary generates a fresh Z_order summand, on a fresh point."""
    if m.partition is not None:
        raise ValueError("add_operator expects a non-quotient model")
    ambient = FiniteAbelianGroup(m.ambient.invariant_orders + (order,))
    ops = [(op.label, op.boundary + (0,), op.support) for op in m.operators]
    ops.append((label, (0,) * m.ambient.rank + (1,), {m.point_count}))
    return from_explicit(ambient, ops, m.point_count + 1, m.name + "+t")


def minimal_empty_sets(m: ExcitationModel, cap: int = DEFAULT_SET_CAP) -> list[tuple[int, ...]]:
    """Inclusion-minimal operator sets without a common support point.

    Computed on distinct support sets, then expanded over the operators that
    share each support set.
    """
    classes: dict[frozenset, list[int]] = {}
    for op in m.operators:
        classes.setdefault(op.support, []).append(op.id)
    supports = sorted(classes, key=lambda s: classes[s][0])
    out_classes: list[tuple[int, ...]] = []
    k = len(supports)

    def extend(chosen: list[int], inter: frozenset, start: int):
        for j in range(start, k):
            new = inter & supports[j]
            chosen.append(j)
            if not new:
                if all(_meet([supports[c] for c in chosen if c != x]) for x in chosen):
                    out_classes.append(tuple(chosen))
                    if len(out_classes) > cap:
                        raise ResourceLimitError(f"more than {cap} minimal empty sets")
            else:
                extend(chosen, new, j + 1)
            chosen.pop()

    extend([], frozenset(range(m.point_count)), 0)
    out: list[tuple[int, ...]] = []
    for combo in out_classes:
        for ops in product(*(classes[supports[c]] for c in combo)):
            out.append(tuple(sorted(ops)))
            if len(out) > cap:
                raise ResourceLimitError(f"more than {cap} minimal empty sets")
    out.sort()
    return out


def _meet(sets: list[frozenset]) -> bool:
    if not sets:
        return True
    inter = sets[0]
    for s in sets[1:]:
        inter = inter & s
        if not inter:
            return False
    return bool(inter)


def bfs_paths(m: ExcitationModel, source: int = 0) -> list[list[tuple[int, int]] | None]:
    """Shortest letter sequence from ``source`` to each configuration, in application order.

    Letters are ``(op, ±1)``; neighbours are tried by operator id, forward before inverse,
    so the result is deterministic.
    """
    paths: list[list[tuple[int, int]] | None] = [None] * m.config_count
    paths[source] = []
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for s in range(m.op_count):
            for e, b in ((1, m.step[s][a]), (-1, m.back(s)[a])):
                if paths[b] is None:
                    paths[b] = paths[a] + [(s, e)]
                    queue.append(b)
    return paths
