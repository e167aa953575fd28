"""Model files and result reports.

A model file is INI-like::

    [group]
    invariants = 2,2

    [complex]
    vertices = 4
    maximal = 0 1 2 | 0 1 3 | 0 2 3 | 1 2 3

    [excitation]
    p = 1
    generators = standard        # or residue lists: 1 | 3

or, for an abstract model, ``[group]`` (the ambient group of boundaries) plus::

    [abstract]
    points = 2
    a ; 1 ; 0
    b ; 1 ; 1

where each operator line is ``label ; boundary residues ; support point ids``.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .abelian import FiniteAbelianGroup
from .complex import from_maximal
from .expr import Expression, ParseError, format_expression
from .model import ExcitationModel, from_explicit, from_simplicial

REPORT_HEADER = "# exstats-report v1"


def _ints(text: str, sep: str | None = ",") -> list[int]:
    parts = text.split(sep) if sep else text.split()
    try:
        return [int(x) for x in parts if x.strip()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}") from None


def parse_generators(text: str | None, group: FiniteAbelianGroup):
    if text is None or text.strip() in ("", "standard"):
        return None
    return [tuple(_ints(chunk)) for chunk in text.split("|")]


def parse_model(text: str, name: str = "model") -> ExcitationModel:
    cp = configparser.ConfigParser(allow_no_value=True, delimiters=("=",), inline_comment_prefixes=("#",),
                                   comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"model file: {exc}") from None
    if not cp.has_section("group") or "invariants" not in cp["group"]:
        raise ParseError("model file needs [group] with invariants = ...")
    inv = cp["group"]["invariants"].strip()
    group = FiniteAbelianGroup(tuple(_ints(inv))) if inv else FiniteAbelianGroup(())
    if cp.has_section("abstract"):
        sec = cp["abstract"]
        if "points" not in sec:
            raise ParseError("[abstract] needs points = N")
        points = int(sec["points"])
        ops = []
        for key, value in sec.items():
            if key == "points":
                continue
            line = key if value is None else f"{key}={value}"
            parts = [p.strip() for p in line.split(";")]
            if len(parts) != 3:
                raise ParseError(f"operator line must be 'label ; boundary ; support', got {line!r}")
            ops.append((parts[0], _ints(parts[1]), _ints(parts[2], None)))
        for lab, b, _ in ops:
            if len(b) != group.rank:
                raise ParseError(f"operator {lab}: boundary needs {group.rank} residues")
        return from_explicit(group, ops, points, name)
    if not cp.has_section("complex"):
        raise ParseError("model file needs a [complex] or [abstract] section")
    sec = cp["complex"]
    try:
        n = int(sec["vertices"])
    except (KeyError, ValueError):
        raise ParseError("[complex] needs vertices = N") from None
    maximal = [_ints(chunk, None) for chunk in sec.get("maximal", "").split("|") if chunk.strip()]
    C = from_maximal(n, maximal)
    exc = cp["excitation"] if cp.has_section("excitation") else {}
    try:
        p = int(exc.get("p", "0"))
    except ValueError:
        raise ParseError("p must be an integer") from None
    gens = parse_generators(exc.get("generators"), group)
    return from_simplicial(C, p, group, gens, name=name)


def load_model(path: str | Path) -> ExcitationModel:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), path.stem)


def write_expression(path: str | Path, m: ExcitationModel, e: Expression, comment: str = ""):
    head = "".join(f"# {line}\n" for line in comment.splitlines())
    Path(path).write_text(head + format_expression(m, e), encoding="utf-8")


def format_report(fields: list[tuple[str, object]]) -> str:
    lines = [REPORT_HEADER]
    for key, value in fields:
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != REPORT_HEADER:
        raise ParseError("not an exstats report (missing version header)")
    out = {}
    for line in lines[1:]:
        if line.strip():
            key, _, value = line.partition(":")
            out[key.strip()] = value.strip()
    return out
