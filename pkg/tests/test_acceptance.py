"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line in the summary."""

import os
import random
import time
from contextlib import contextmanager

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from exstats.abelian import FiniteAbelianGroup
from exstats.complex import builtin
from exstats.expr import Expression, expand_theta, norm1, parse_process, theta, translate
from exstats.linalg import SparseIntMatrix, determinant, same_lattice, snf
from exstats.model import add_operator, from_simplicial
from exstats.proctools import reconstruct_process, simplify_randomly
from exstats.statistics import (compute_T, eliminate_operator, identity_generators, impose, modified_order,
                                naive_identity_generators, order_of_expression)

from conftest import lattice, model, record, stats


@contextmanager
def criterion(number: int, what: str, limit_s: float | None = None):
    notes: list[str] = []
    t0 = time.perf_counter()
    try:
        yield notes
    except BaseException as exc:
        record(number, False, f"{what}: {type(exc).__name__}: {exc}")
        raise
    elapsed = time.perf_counter() - t0
    within = limit_s is None or elapsed <= limit_s
    detail = f"{what} ({elapsed:.1f}s" + (f", limit {limit_s:.0f}s)" if limit_s else ")")
    if notes:
        detail += " " + "; ".join(notes)
    record(number, within, detail)
    assert within, f"took {elapsed:.1f}s, over the {limit_s}s budget"


def factors(name, group="Z2", p=None):
    r = stats(name, group, p)
    assert r.free_rank == 0
    assert r.tf_factors == r.invariant_factors
    return r.invariant_factors


def tjunction(m):
    w = parse_process("U[0,2] U[0,3]^-1 U[0,1] U[0,2]^-1 U[0,3] U[0,1]^-1", m)
    return expand_theta(m, w, m.config_index([0, 1, 1, 0]))[0]


def test_c01_fsymbol_models():
    with criterion(1, "triangle Z2 -> Z2, Z3 -> Z3; square Z2 -> Z2", 15):
        assert factors("triangle", "Z2") == [2]
        assert factors("triangle", "Z3") == [3]
        assert factors("square", "Z2") == [2]


def test_c02_anyons():
    with criterion(2, "centered-triangle Z2 -> Z4, Z3 -> Z3, Z2xZ2 -> Z4+Z4+Z2", 60):
        assert factors("centered-triangle", "Z2") == [4]
        assert factors("centered-triangle", "Z3") == [3]
        assert factors("centered-triangle", "Z2xZ2") == [2, 4, 4]


def test_c03_nonplanar_graphs():
    with criterion(3, "k5, k33, centered-tetrahedron-1skel: Z2 -> Z2, Z3 -> 0", 60):
        for name in ("k5", "k33", "centered-tetrahedron-1skel"):
            assert factors(name, "Z2") == [2], name
            assert factors(name, "Z3") == [], name


@pytest.mark.slow
def test_c04_fermionic_loop():
    with criterion(4, "centered-tetrahedron-2skel p=1: Z2 -> Z2, Z3 -> 0", 600):
        assert factors("centered-tetrahedron-2skel", "Z2") == [2]
        assert factors("centered-tetrahedron-2skel", "Z3") == []


def test_c05_loop_fusion():
    with criterion(5, "boundary-simplex:3 p=1: Z2 -> 0; Z2xZ2 -> Z2^3 (figure) or Z2^2 (H^4 text)", 300) as notes:
        assert factors("boundary-simplex:3", "Z2") == []
        got = factors("boundary-simplex:3", "Z2xZ2")
        assert got in ([2, 2, 2], [2, 2])
        which = "Z2^2, agreeing with the H^4 statement" if got == [2, 2] else "Z2^3, agreeing with the figure"
        notes.append(f"computed {which}; the two source values conflict")


@pytest.mark.skipif(not os.environ.get("EXSTATS_OPTIONAL"), reason="hours-scale; set EXSTATS_OPTIONAL=1")
def test_c05_optional_z2_cubed():
    m = from_simplicial(builtin("boundary-simplex:3").complex, 1, FiniteAbelianGroup((2, 2, 2)))
    assert compute_T(m).invariant_factors == [2] * 8


def test_c06_membrane_statistics():
    with criterion(6, "boundary-simplex:4 p=2 Z2 -> Z2", 600):
        assert factors("boundary-simplex:4", "Z2") == [2]


def test_c07_point_models():
    with criterion(7, "points(1) -> 0; points(2): Z2 -> 0, Z2xZ2 -> Z2; points(3) Z2xZ2 -> 0", 5):
        for g in ("Z2", "Z3", "Z2xZ2"):
            assert factors("points:1", g) == []
        assert factors("points:2", "Z2") == []
        assert factors("points:2", "Z2xZ2") == [2]
        assert factors("points:3", "Z2xZ2") == []


def test_c08_designed_models():
    with criterion(8, "double-arc-chain Z2 -> Z2; double-y-graph Z2 -> Z2^3", 60):
        assert factors("double-arc-chain", "Z2") == [2]
        assert factors("double-y-graph", "Z2") == [2, 2, 2]


def test_c09_fsymbol_expression():
    with criterion(9, "theta([s2,s1^2],0) expands to the four-term form and has order 2", 1):
        m = model("triangle")
        e, end = expand_theta(m, parse_process("[U2,U1^2]", m), 0)
        d1, d2 = m.boundary_index[0], m.boundary_index[1]
        want = theta(m, 0, 0) + theta(m, 0, d1) - theta(m, 0, d2) - theta(m, 0, m.add(d1, d2))
        assert e == want and end == 0
        assert order_of_expression(m, e, lattice("triangle")) == 2


def test_c10_tjunction():
    with criterion(10, "T-junction order 4; permuted form and translates differ by identities", 30):
        m = model("centered-triangle")
        lat, r = lattice("centered-triangle"), stats("centered-triangle")
        th = tjunction(m)
        assert order_of_expression(m, th, lat, r.einv) == 4
        w = parse_process("U[1,3] U[1,2]^-1 U[0,1]^-1 U[1,3]^-1 U[1,2] U[0,1]", m)
        th2, _ = expand_theta(m, w, m.config_index([1, 0, 0, 1]))
        assert order_of_expression(m, th - th2, lat, r.einv) == 1
        for b in range(m.config_count):
            assert order_of_expression(m, th - translate(m, th, b), lat, r.einv) == 1


@pytest.mark.slow
def test_c11_fermionic_loop_simplification():
    with criterion(11, "simplify fermionic loop to norm 20; reconstructed word re-expands", 1800) as notes:
        m = model("centered-tetrahedron-2skel")
        lat, r = lattice("centered-tetrahedron-2skel"), stats("centered-tetrahedron-2skel")
        g = r.generators[0]
        res = simplify_randomly(lat, g, tries=10_000, restarts=200, seed=1, plateau=0.5)
        assert res.norm == 20, res.norm
        assert order_of_expression(m, res.expression - g, lat, r.einv) == 1
        w = reconstruct_process(m, res.expression)
        assert expand_theta(m, w, 0) == (res.expression, 0)
        assert len(w) >= 24
        notes.append(f"start norm {norm1(g)}, best norm {res.norm}, word length {len(w)}")


def test_c12_imposed_identities():
    with criterion(12, "imposing U^n kills the F-symbol; loop fusion needs all three squared membranes", 600):
        for n in (2, 3):
            m, r = model("triangle", f"Z{n}"), stats("triangle", f"Z{n}")
            ext = impose(m, [parse_process(f"U1^{n}", m)], r.identity)
            assert [modified_order(m, ext, g, r.einv) for g in r.generators] == [1]
        m, r = model("boundary-simplex:3", "Z2xZ2"), stats("boundary-simplex:3", "Z2xZ2")
        words = [parse_process(w, m) for w in ("U[0,1,2;0]^2", "U[0,1,2;1]^2", "(U[0,1,2;0] U[0,1,2;1])^2")]
        for pair in ((0, 1), (0, 2), (1, 2)):
            ext = impose(m, [words[i] for i in pair], r.identity)
            assert [modified_order(m, ext, g, r.einv) for g in r.generators] == [2, 2]
        ext = impose(m, words, r.identity)
        assert [modified_order(m, ext, g, r.einv) for g in r.generators] == [1, 1]


def test_c13_membrane_process():
    with criterion(13, "membrane word on boundary-simplex:4 has order 2", 600):
        m = model("boundary-simplex:4")
        g = parse_process("(U4 U3)^-2 (U4 [U2,U1^2]^-1 U3 [U2,U1^2])^2", m)
        e, end = expand_theta(m, g, 0)
        assert end == 0
        assert order_of_expression(m, e, lattice("boundary-simplex:4")) == 2


PROPERTY_MODELS = [("triangle", "Z2"), ("triangle", "Z3"), ("square", "Z2"), ("centered-triangle", "Z2"),
                   ("centered-triangle", "Z3"), ("centered-triangle", "Z2xZ2"), ("k5", "Z2"), ("k5", "Z3"),
                   ("k33", "Z2"), ("k33", "Z3"), ("centered-tetrahedron-1skel", "Z2"),
                   ("centered-tetrahedron-2skel", "Z2"), ("boundary-simplex:3", "Z2"),
                   ("boundary-simplex:3", "Z2xZ2"), ("boundary-simplex:4", "Z2"), ("points:2", "Z2xZ2"),
                   ("points:3", "Z2xZ2"), ("double-arc-chain", "Z2"), ("double-y-graph", "Z2")]


@pytest.mark.slow
def test_c14_lattice_properties():
    with criterion(14, f"E_id in E_inv, T = T_f, orders divide |A| on {len(PROPERTY_MODELS)} models"):
        rng = random.Random(14)
        for name, group in PROPERTY_MODELS:
            m, r = model(name, group), stats(name, group)
            assert all(r.einv.contains(Expression(c)) for c in r.identity.columns)
            assert r.invariant_factors == r.tf_factors and r.free_rank == 0
            basis = r.einv.basis
            for _ in range(100):
                e = Expression()
                for _ in range(3):
                    j = rng.randrange(basis.ncols)
                    e = e + rng.randint(-3, 3) * Expression(basis.column(j))
                n = order_of_expression(m, e, r.identity, r.einv)
                assert n >= 1 and m.config_count % n == 0, (name, group, n)


def test_c15_reduced_vs_naive():
    with criterion(15, "reduced and naive identity lattices agree on triangle, square, points(2), centered-triangle", 120):
        for name, group in (("triangle", "Z2"), ("triangle", "Z3"), ("square", "Z2"), ("points:2", "Z2"),
                            ("points:2", "Z2xZ2"), ("centered-triangle", "Z2")):
            m = model(name, group)
            assert same_lattice(identity_generators(m).matrix, naive_identity_generators(m).matrix), (name, group)


def test_c16_generating_set_invariance():
    with criterion(16, "centered-triangle Z4 with G0={1} and {1,3} agree", 120):
        C = builtin("centered-triangle").complex
        Z4 = FiniteAbelianGroup((4,))
        a = compute_T(from_simplicial(C, 0, Z4, [(1,)]))
        b = compute_T(from_simplicial(C, 0, Z4, [(1,), (3,)]))
        assert a.invariant_factors == b.invariant_factors == [8]


def test_c17_cut_free_part():
    with criterion(17, "a fresh-summand operator leaves T unchanged on triangle and centered-triangle", 60):
        for name in ("triangle", "centered-triangle"):
            base = stats(name).invariant_factors
            for n in (2, 3):
                assert compute_T(add_operator(model(name), n)).invariant_factors == base, (name, n)


def test_c18_operator_elimination():
    with criterion(18, "each spoke can be eliminated from the T-junction expression", 30):
        m = model("centered-triangle")
        lat = lattice("centered-triangle")
        th = tjunction(m)
        for label in ("U[0,1]", "U[0,2]", "U[0,3]"):
            t = m.op_id(label)
            e = eliminate_operator(m, th, t, lat)
            assert all(k // m.config_count != t for k, _ in e.items())
            assert order_of_expression(m, th - e, lat) == 1


def test_c19_random_snf():
    with criterion(19, "1000 random matrices up to 8x8: U M V = D, unimodular, divisibility, sympy agrees", 30):
        rng = random.Random(19)
        for _ in range(1000):
            r, c = rng.randint(1, 8), rng.randint(1, 8)
            rows = [[rng.randint(-9, 9) if rng.random() < 0.6 else 0 for _ in range(c)] for _ in range(r)]
            m = SparseIntMatrix.from_dense(rows, c)
            res = snf(m)
            assert res.verify(m)
            assert abs(determinant(res.U)) == 1 and abs(determinant(res.V)) == 1
            lam = res.invariant_factors
            assert all(lam[i + 1] % lam[i] == 0 for i in range(len(lam) - 1))
            if rng.random() < 0.2:
                d = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
                want = sorted(abs(int(d[i, i])) for i in range(min(r, c)) if d[i, i])
                assert sorted(lam) == want
