"""Finite abelian groups given by invariant orders, with explicit enumeration.

Elements are plain tuples of residues.  Subgroups are enumerated by
breadth-first closure, and quotients are realized as partitions of an
already enumerated subgroup.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

from .linalg import ResourceLimitError

DEFAULT_CLOSURE_CAP = 1 << 16

Element = tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """The group Z_{N_1} + ... + Z_{N_k}; the empty list is the trivial group."""

    invariant_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.invariant_orders)
        for n in orders:
            if n < 2:
                raise ValueError(f"invariant orders must be >= 2, got {n}")
        object.__setattr__(self, "invariant_orders", orders)

    @classmethod
    def parse(cls, text: str) -> "FiniteAbelianGroup":
        """Parse a literal such as ``Z2``, ``Z2xZ2`` or ``z4xZ3``; ``1``/``0`` is trivial."""
        t = text.strip()
        if t in ("", "0", "1", "trivial"):
            return cls(())
        parts = re.split(r"\s*[xX]\s*", t)
        orders = []
        for part in parts:
            m = re.fullmatch(r"[zZ]_?(\d+)", part)
            if not m:
                raise ValueError(f"bad group literal {text!r}")
            orders.append(int(m.group(1)))
        return cls(tuple(orders))

    @property
    def rank(self) -> int:
        return len(self.invariant_orders)

    @property
    def order(self) -> int:
        return prod(self.invariant_orders)

    def zero(self) -> Element:
        return (0,) * self.rank

    def element(self, residues: Iterable[int]) -> Element:
        r = tuple(residues)
        if len(r) != self.rank:
            raise ValueError(f"expected {self.rank} residues, got {len(r)}")
        return tuple(x % n for x, n in zip(r, self.invariant_orders))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.invariant_orders))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.invariant_orders))

    def neg(self, a: Element) -> Element:
        return tuple(-x % n for x, n in zip(a, self.invariant_orders))

    def scale(self, k: int, a: Element) -> Element:
        return tuple(k * x % n for x, n in zip(a, self.invariant_orders))

    def contains(self, a: Sequence[int]) -> bool:
        return len(a) == self.rank and all(0 <= x < n for x, n in zip(a, self.invariant_orders))

    def standard_generators(self) -> list[Element]:
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            gens.append(tuple(e))
        return gens

    def elements(self) -> list[Element]:
        out: list[Element] = [()]
        for n in self.invariant_orders:
            out = [e + (x,) for e in out for x in range(n)]
        return out

    def __str__(self) -> str:
        if not self.invariant_orders:
            return "0"
        return "x".join(f"Z{n}" for n in self.invariant_orders)


def product_group(factors: Sequence[FiniteAbelianGroup]) -> FiniteAbelianGroup:
    """Direct sum, keeping the factors' invariant orders unmerged."""
    return FiniteAbelianGroup(tuple(n for f in factors for n in f.invariant_orders))


def format_element(a: Sequence[int]) -> str:
    return "[" + ",".join(str(x) for x in a) + "]"


def parse_element(text: str) -> Element:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"element must look like [r1,r2,...], got {text!r}")
    body = t[1:-1].strip()
    if not body:
        return ()
    return tuple(int(x) for x in body.split(","))


@dataclass
class ElementIndex:
    """Enumerated elements in a fixed order with a reverse lookup."""

    group: FiniteAbelianGroup
    elements: list[Element]
    position: dict[Element, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> Element:
        return self.elements[i]

    def index(self, a: Element) -> int:
        return self.position[a]


def closure(group: FiniteAbelianGroup, generators: Sequence[Element],
            cap: int = DEFAULT_CLOSURE_CAP) -> ElementIndex:
    """Subgroup generated by ``generators``, listed in breadth-first discovery order from 0."""
    for g in generators:
        if not group.contains(g):
            raise ValueError(f"generator {g} is not a reduced element of {group}")
    zero = group.zero()
    elements = [zero]
    position = {zero: 0}
    queue = deque([zero])
    while queue:
        a = queue.popleft()
        for g in generators:
            b = group.add(a, g)
            if b not in position:
                if len(elements) >= cap:
                    raise ResourceLimitError(f"subgroup closure exceeds {cap} elements")
                position[b] = len(elements)
                elements.append(b)
                queue.append(b)
    return ElementIndex(group, elements, position)


@dataclass(frozen=True)
class CosetPartition:
    """``class_of[i]`` is the class of enumerated element ``i``; classes are dense from 0."""

    class_of: tuple[int, ...]
    class_count: int

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.class_count)]
        for i, c in enumerate(self.class_of):
            out[c].append(i)
        return out

    def representatives(self) -> list[int]:
        reps = [-1] * self.class_count
        for i, c in enumerate(self.class_of):
            if reps[c] < 0:
                reps[c] = i
        return reps


def coset_partition(index: ElementIndex, subgroup_generators: Sequence[Element]) -> CosetPartition:
    """Partition the enumerated elements into cosets of the span of ``subgroup_generators``.

    Class numbers follow the first appearance in enumeration order, so the
    class of the identity (index 0) is 0.
    """
    n = len(index)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    group = index.group
    for h in subgroup_generators:
        for i, a in enumerate(index.elements):
            b = group.add(a, h)
            j = index.position.get(b)
            if j is None:
                raise ValueError(f"{format_element(a)} + {format_element(h)} is not in the enumerated set")
            ri, rj = find(i), find(j)
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
    labels: dict[int, int] = {}
    class_of = []
    for i in range(n):
        root = find(i)
        if root not in labels:
            labels[root] = len(labels)
        class_of.append(labels[root])
    return CosetPartition(tuple(class_of), len(labels))
