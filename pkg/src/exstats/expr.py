"""Process words in the free group F(S) and expressions in E = Z^(S x A).

A word is a tuple of letters ``(op, ±1)`` in written order; the rightmost
letter acts first, so ``θ(g1 g2, a) = θ(g2, a) + θ(g1, a + ∂g2)``.

An expression is a sparse integer vector keyed by the flat index
``op * |A| + a``, which is also its row in every lattice matrix.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Sequence

from .abelian import parse_element
from .model import ExcitationModel, restriction_partition

Letter = tuple[int, int]
ProcessWord = tuple[Letter, ...]


class Expression:
    """Immutable sparse integer vector with no stored zeros."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        d: dict[int, int] = {}
        for k, v in items:
            if v:
                d[k] = d.get(k, 0) + v
        self._terms = {k: d[k] for k in sorted(d) if d[k]}
        self._hash = None

    @classmethod
    def _trusted(cls, d: dict[int, int]) -> "Expression":
        e = cls.__new__(cls)
        e._terms = {k: d[k] for k in sorted(d)}
        e._hash = None
        return e

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms.items())

    def get(self, k: int) -> int:
        return self._terms.get(k, 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Expression):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: "Expression") -> "Expression":
        d = dict(self._terms)
        for k, v in other._terms.items():
            x = d.get(k, 0) + v
            if x:
                d[k] = x
            else:
                d.pop(k, None)
        return Expression._trusted(d)

    def __neg__(self) -> "Expression":
        return Expression._trusted({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Expression") -> "Expression":
        return self + (-other)

    def __rmul__(self, n: int) -> "Expression":
        if n == 0:
            return Expression()
        return Expression._trusted({k: n * v for k, v in self._terms.items()})

    def __repr__(self) -> str:
        return f"Expression({self._terms})"


def theta(m: ExcitationModel, s: int, a: int, coeff: int = 1) -> Expression:
    return Expression({s * m.config_count + a: coeff})


def split_index(m: ExcitationModel, k: int) -> tuple[int, int]:
    return divmod(k, m.config_count)


def norm1(e: Expression) -> int:
    return sum(abs(v) for _, v in e.items())


# words

def inverse(word: Sequence[Letter]) -> ProcessWord:
    return tuple((s, -x) for s, x in reversed(word))


def power(word: Sequence[Letter], n: int) -> ProcessWord:
    base = tuple(word) if n >= 0 else inverse(word)
    return base * abs(n)


def commutator(a: Sequence[Letter], b: Sequence[Letter]) -> ProcessWord:
    """[a, b] = a^-1 b^-1 a b."""
    return inverse(a) + inverse(b) + tuple(a) + tuple(b)


def word_boundary(m: ExcitationModel, word: Sequence[Letter], a: int = 0) -> int:
    """Configuration reached from ``a`` after applying the word."""
    cur = a
    for s, x in reversed(word):
        cur = m.step[s][cur] if x > 0 else m.back(s)[cur]
    return cur


def expand_theta(m: ExcitationModel, word: Sequence[Letter], a: int = 0) -> tuple[Expression, int]:
    """θ(word, a) together with the final configuration a + ∂word.

    Inverse letters use θ(s^-1, b) = -θ(s, b - ∂s).
    """
    n = m.config_count
    d: dict[int, int] = {}
    cur = a
    for s, x in reversed(word):
        if x > 0:
            k = s * n + cur
            d[k] = d.get(k, 0) + 1
            cur = m.step[s][cur]
        else:
            cur = m.back(s)[cur]
            k = s * n + cur
            d[k] = d.get(k, 0) - 1
    return Expression._trusted({k: v for k, v in d.items() if v}), cur


def format_word(m: ExcitationModel, word: Sequence[Letter]) -> str:
    parts = []
    for s, x in word:
        lab = m.operators[s].label
        parts.append(lab if x > 0 else f"{lab}^-1")
    return " ".join(parts)


# parsing

class ParseError(ValueError):
    pass


def label_table(m: ExcitationModel) -> dict[str, int]:
    """Operator labels plus the 1-based aliases U1..Un where they do not collide."""
    table = {op.label: op.id for op in m.operators}
    for op in m.operators:
        alias = f"U{op.id + 1}"
        table.setdefault(alias, op.id)
    return table


class _Parser:
    def __init__(self, text: str, labels: Mapping[str, int]):
        self.text = text
        self.pos = 0
        self.labels = sorted(labels, key=len, reverse=True)
        self.table = labels

    def fail(self, msg: str):
        raise ParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def skip(self) -> bool:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.pos > start

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def match_label(self) -> str | None:
        t = self.text
        for lab in self.labels:
            if t.startswith(lab, self.pos):
                end = self.pos + len(lab)
                if (lab[-1].isalnum() or lab[-1] == "_") and end < len(t) and (t[end].isalnum() or t[end] == "_"):
                    continue
                return lab
        return None

    def process(self, stop: str) -> ProcessWord:
        out: ProcessWord = ()
        self.skip()
        if self.peek() in ("", ")", "]", ","):
            self.fail("empty process")
        while True:
            out += self.term()
            self.skip()
            c = self.peek()
            if c == "*":
                self.pos += 1
                self.skip()
                continue
            if c == "" or c in ")],":
                return out

    def term(self) -> ProcessWord:
        w = self.atom()
        self.skip()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            m = re.compile(r"[+-]?\d+").match(self.text, self.pos)
            if not m:
                self.fail("expected an integer exponent")
            self.pos = m.end()
            w = power(w, int(m.group()))
        return w

    def atom(self) -> ProcessWord:
        self.skip()
        lab = self.match_label()
        if lab is not None:
            self.pos += len(lab)
            return ((self.table[lab], 1),)
        c = self.peek()
        if c == "(":
            self.pos += 1
            w = self.process(")")
            self.expect(")")
            return w
        if c == "[":
            self.pos += 1
            a = self.process(",")
            self.expect(",")
            b = self.process("]")
            self.expect("]")
            return commutator(a, b)
        if c == "":
            self.fail("unexpected end of input")
        m = re.compile(r"[A-Za-z_][\w]*(\[[^\]]*\])?").match(self.text, self.pos)
        if m:
            self.fail(f"unknown operator label {m.group()!r}")
        self.fail(f"unexpected character {c!r}")

    def expect(self, c: str):
        self.skip()
        if self.peek() != c:
            self.fail(f"expected {c!r}")
        self.pos += 1


def parse_process(text: str, m: ExcitationModel | None = None, labels: Mapping[str, int] | None = None) -> ProcessWord:
    """Parse a process such as ``[U2, U1^2]`` or ``U[0,1] U[1,2]^-1``.

    ``[a, b]`` is the commutator a^-1 b^-1 a b, and ``1`` or an empty string is the empty word.
    """
    if labels is None:
        if m is None:
            raise ValueError("need a model or a label table")
        labels = label_table(m)
    if text.strip() in ("", "1"):
        return ()
    p = _Parser(text, labels)
    w = p.process("")
    p.skip()
    if p.pos != len(text):
        p.fail("unexpected trailing input")
    return w


# expression-level maps

def boundary_0chain(m: ExcitationModel, e: Expression) -> dict[int, int]:
    n = m.config_count
    out: dict[int, int] = {}
    for k, c in e.items():
        s, a = divmod(k, n)
        b = m.step[s][a]
        if b != a:
            out[b] = out.get(b, 0) + c
            out[a] = out.get(a, 0) - c
    return {k: v for k, v in out.items() if v}


def is_closed(m: ExcitationModel, e: Expression) -> bool:
    return not boundary_0chain(m, e)


def restrict(m: ExcitationModel, e: Expression, V: Iterable[int]) -> Expression:
    """q_V: keep operators in V (renumbered in increasing order) and pass to configuration classes."""
    V = sorted(set(V))
    part = restriction_partition(m, V)
    op_map = {s: i for i, s in enumerate(V)}
    n, nq = m.config_count, part.class_count
    d: dict[int, int] = {}
    for k, c in e.items():
        s, a = divmod(k, n)
        i = op_map.get(s)
        if i is not None:
            key = i * nq + part.class_of[a]
            d[key] = d.get(key, 0) + c
    return Expression(d)


def translate(m: ExcitationModel, e: Expression, b: int) -> Expression:
    """δ_b: θ(s, a) ↦ θ(s, a + b)."""
    n = m.config_count
    shift: dict[int, int] = {}
    d = {}
    for k, c in e.items():
        s, a = divmod(k, n)
        t = shift.get(a)
        if t is None:
            t = shift[a] = m.add(a, b)
        d[s * n + t] = c
    return Expression(d)


# text format

def format_expression(m: ExcitationModel, e: Expression) -> str:
    lines = []
    n = m.config_count
    for k, c in e.items():
        s, a = divmod(k, n)
        lines.append(f"{c} {m.operators[s].label} @ {m.format_config(a)}")
    return "\n".join(lines) + ("\n" if lines else "")


_TERM = re.compile(r"\s*([+-]?\d+)\s+(.+?)\s*@\s*(\[[^\]]*\])\s*")


def parse_expression(m: ExcitationModel, text: str) -> Expression:
    """Parse lines ``<coeff> <label> @ [r1,...,rk]``; ``#`` starts a comment."""
    labels = label_table(m)
    n = m.config_count
    d: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        mt = _TERM.fullmatch(line)
        if not mt:
            raise ParseError(f"line {lineno}: expected '<coeff> <label> @ [residues]', got {raw.strip()!r}")
        coeff, lab, conf = int(mt.group(1)), mt.group(2), mt.group(3)
        if lab not in labels:
            raise ParseError(f"line {lineno}: unknown operator label {lab!r}")
        try:
            a = m.config_index(parse_element(conf))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        key = labels[lab] * n + a
        d[key] = d.get(key, 0) + coeff
    return Expression(d)
