"""Post-processing of statistics generators: simplification, processes, DOT output."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .expr import Expression, ProcessWord, boundary_0chain, expand_theta, format_word, norm1
from .model import ExcitationModel, bfs_paths
from .statistics import IdentityLattice


@dataclass
class SimplifyResult:
    expression: Expression
    norm: int
    restart: int
    trace: list[int] = field(default_factory=list)
    restart_norms: list[int] = field(default_factory=list)


def restart_seed(seed: int, restart: int) -> str:
    # string seeds go through sha512 in random.Random, so this split is stable across runs
    return f"{seed}/{restart}"


def simplify_randomly(lattice: IdentityLattice, e: Expression, tries: int = 10_000, restarts: int = 1,
                      seed: int = 0, plateau: float = 0.0) -> SimplifyResult:
    """Random descent on the 1-norm by adding ± one identity generator at a time.

    A move is kept when it lowers the norm, or with probability ``plateau``
    when the norm is unchanged.  Restarts all begin from ``e``; the best
    result wins, ties going to the earliest restart.
    """
    if tries < 1 or restarts < 1:
        raise ValueError("tries and restarts must be >= 1")
    cols = [tuple(c.items()) for c in lattice.columns]
    best = None
    norms = []
    for r in range(restarts):
        rng = random.Random(restart_seed(seed, r))
        cur = dict(e.items())
        norm = norm1(e)
        trace = [norm]
        if cols:
            for _ in range(tries):
                if norm == 0:
                    break
                col = cols[rng.randrange(len(cols))]
                sg = 1 if rng.random() < 0.5 else -1
                delta = 0
                for k, v in col:
                    x = cur.get(k, 0)
                    delta += abs(x + sg * v) - abs(x)
                if delta < 0 or (delta == 0 and plateau > 0 and rng.random() < plateau):
                    for k, v in col:
                        x = cur.get(k, 0) + sg * v
                        if x:
                            cur[k] = x
                        else:
                            cur.pop(k, None)
                    if delta:
                        norm += delta
                        trace.append(norm)
        norms.append(norm)
        if best is None or norm < best.norm:
            best = SimplifyResult(Expression(cur), norm, r, trace)
    best.restart_norms = norms
    return best


class ReconstructionError(ValueError):
    pass


def _circuit(start: int, adj: dict[int, list[tuple[int, int, int]]]) -> list[tuple[int, int]]:
    """Hierholzer: Eulerian circuit from ``start`` over the edges reachable from it, as letters."""
    stack: list[tuple[int, tuple[int, int] | None]] = [(start, None)]
    out: list[tuple[int, int]] = []
    while stack:
        v, letter = stack[-1]
        edges = adj.get(v)
        if edges:
            s, sg, w = edges.pop()
            stack.append((w, (s, sg)))
        else:
            stack.pop()
            if letter is not None:
                out.append(letter)
    out.reverse()
    return out


def reconstruct_process(m: ExcitationModel, e: Expression, base: int = 0) -> ProcessWord:
    """A word g with θ(g, base) = e, for closed e.

    Each connected piece of e is an Eulerian circuit; pieces not containing
    ``base`` are reached by a shortest path that is walked back afterwards,
    so its phases cancel.
    """
    if boundary_0chain(m, e):
        raise ReconstructionError("expression is not closed")
    n = m.config_count
    adj: dict[int, list[tuple[int, int, int]]] = {}
    undirected: dict[int, set[int]] = {}
    for k, c in e.items():
        s, a = divmod(k, n)
        b = m.step[s][a]
        if c > 0:
            edge, src = (s, 1, b), a
        else:
            edge, src = (s, -1, a), b
        adj.setdefault(src, []).extend([edge] * abs(c))
        undirected.setdefault(a, set()).add(b)
        undirected.setdefault(b, set()).add(a)
    for v in adj:
        # popping from the end, so sort descending to use low operator ids first
        adj[v].sort(reverse=True)

    paths = bfs_paths(m, base)
    dist = {v: len(p) for v, p in enumerate(paths) if p is not None}
    seen: set[int] = set()
    components = []
    for v in sorted(undirected):
        if v in seen:
            continue
        comp = []
        q = deque([v])
        seen.add(v)
        while q:
            x = q.popleft()
            comp.append(x)
            for y in sorted(undirected[x]):
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        components.append(comp)
    applied: list[tuple[int, int]] = []
    order = []
    for comp in components:
        if any(v not in dist for v in comp):
            raise ReconstructionError("component not reachable from the base configuration")
        start = min(comp, key=lambda v: (dist[v], v))
        order.append((dist[start], start))
    for _, start in sorted(order):
        circ = _circuit(start, adj)
        conn = paths[start]
        applied += conn + circ + [(s, -sg) for s, sg in reversed(conn)]
    if any(adj.values()):
        raise ReconstructionError("edges left over after the circuits; expression is not balanced")
    word = tuple(reversed(applied))
    got, end = expand_theta(m, word, base)
    if got != e or end != base:
        raise ReconstructionError("reconstructed word does not re-expand to the expression")
    return word


def config_words(m: ExcitationModel) -> list[str]:
    """Label of each configuration: a shortest word g with ∂g = a, written left to right."""
    out = []
    for p in bfs_paths(m, 0):
        out.append(format_word(m, tuple(reversed(p))) if p else "1")
    return out


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(m: ExcitationModel, e: Expression, name: str = "expression") -> str:
    """DOT digraph of e on the configuration graph: red edges for n > 0, blue for n < 0."""
    n = m.config_count
    edges = []
    nodes: set[int] = set()
    for k, c in e.items():
        s, a = divmod(k, n)
        b = m.step[s][a]
        nodes.update((a, b))
        edges.append((a, b, c, m.operators[s].label))
    labels = config_words(m) if nodes else []
    lines = [f"digraph {_dot_quote(name)} {{"]
    for v in sorted(nodes):
        lines.append(f"  c{v} [label={_dot_quote(labels[v])}];")
    for a, b, c, lab in edges:
        color = "red" if c > 0 else "blue"
        lines.append(f"  c{a} -> c{b} [label={_dot_quote(f'{c}×{lab}')}, color={color}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
