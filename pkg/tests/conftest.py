from functools import lru_cache

import pytest

from exstats.abelian import FiniteAbelianGroup
from exstats.complex import builtin
from exstats.model import from_builtin
from exstats.statistics import compute_T, identity_generators


@lru_cache(maxsize=None)
def model(name: str, group: str = "Z2", p: int | None = None, gens: tuple | None = None):
    return from_builtin(builtin(name), FiniteAbelianGroup.parse(group), p, gens)


@lru_cache(maxsize=None)
def lattice(name: str, group: str = "Z2", p: int | None = None):
    return identity_generators(model(name, group, p))


@lru_cache(maxsize=None)
def stats(name: str, group: str = "Z2", p: int | None = None):
    return compute_T(model(name, group, p), lattice(name, group, p))


# acceptance bookkeeping: one line per criterion in the terminal summary

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str):
    ACCEPTANCE[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def models():
    return model
