"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import time

import numpy as np
import pytest
from scipy.spatial import ConvexHull, Delaunay

from helpers import random_instance, random_lp, scipy_outside, vertex_oracle
from phiconv import boundary as bd
from phiconv import lp, points
from phiconv import phi_space as ps
from phiconv import variational as var
from phiconv.gallery import gallery
from phiconv.ground import ExtendedFunction, build_ground_set
from phiconv.hull import phi_convex_hull


def report(tag: str, ok: bool, detail: str = "") -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}{': ' + detail if detail else ''}")


@pytest.fixture(scope="module")
def family():
    return [random_instance(seed) for seed in range(50)]


@pytest.fixture(scope="module")
def boundary_family():
    """20 instances whose span holds the constants and separates points."""
    return [random_instance(1000 + s, constants=True) for s in range(20)]


def _oracle_hull(inst, P) -> set:
    """Hull of P decided point by point with the HiGHS solver."""
    return {x for x in inst.ground.ids if x in P or scipy_outside(inst.space, P, x) <= 1e-7}


def test_c1_krein_milman(family):
    t0 = time.perf_counter()
    failures = []
    for inst in family:
        ext = points.phi_extremal_points(inst.space, inst.K)
        if len(ext) == 0 or phi_convex_hull(inst.space, ext) != inst.K:
            failures.append(inst.seed)
    elapsed = time.perf_counter() - t0
    for inst in family:
        ext = points.phi_extremal_points(inst.space, inst.K)
        if _oracle_hull(inst, ext) != inst.K.as_set() or _oracle_hull(inst, inst.A) != inst.K.as_set():
            failures.append(("oracle", inst.seed))
    ok = not failures and elapsed < 60
    report("C1 Krein-Milman reconstruction", ok, f"{len(family)} instances, {elapsed:.1f}s, failures={failures}")
    assert not failures
    assert elapsed < 60


def test_c2_exposed_reconstruction(family):
    failures = []
    for inst in family:
        exp = points.exposed_set(inst.space, inst.K, screen=False)
        ext = points.phi_extremal_points(inst.space, inst.K)
        if len(exp) == 0 or phi_convex_hull(inst.space, exp) != inst.K or not exp.issubset(ext):
            failures.append(inst.seed)
        elif _oracle_hull(inst, exp) != inst.K.as_set():
            failures.append(("oracle", inst.seed))
    report("C2 exposed-point reconstruction and Exp within Ext", not failures, f"failures={failures}")
    assert not failures


def _tied_start(space, rng, g):
    """A random table f and c0 such that f - phi_c0 has two tied minimizers."""
    c0 = rng.standard_normal(space.m)
    r = rng.uniform(0, 1, g.n)
    x, y = rng.choice(g.n, 2, replace=False)
    r[x] = r[y] = r.min() - 0.5
    return ExtendedFunction(g, r + space.values(c0)), c0


def test_c3_genericity():
    fractions = []
    for s in range(10):
        inst = random_instance(200 + s)
        f = ExtendedFunction.indicator(inst.ground, inst.K)
        fractions.append(var.ill_posed_fraction(inst.space, f, 1.0, 1000, seed=s).fraction)
    rng = np.random.default_rng(7)
    failed, cases = [], 0
    for s in range(100):
        inst = random_instance(300 + s)
        if s % 2 == 0:
            f, c0 = ExtendedFunction.indicator(inst.ground, inst.K), np.zeros(inst.space.m)
            if len(inst.K) < 2:
                f, c0 = _tied_start(inst.space, rng, inst.ground)
        else:
            f, c0 = _tied_start(inst.space, rng, inst.ground)
        assert not var.well_posedness(inst.space, f, c0).well_posed
        cases += 1
        res = var.exposing_perturbation(inst.space, f, c0, 1e-3, seed=s)
        ok = (res.found and inst.space.norm(res.psi) <= 1e-3 * (1 + 1e-12)
              and var.well_posedness(inst.space, f, c0 + res.psi.coeffs).well_posed)
        if not ok:
            failed.append(s)
    ok = all(fr == 0 for fr in fractions) and not failed
    report("C3 ill-posed fraction zero and exposing perturbations", ok,
           f"fractions={fractions}, perturbation failures={failed}/{cases}")
    assert all(fr == 0 for fr in fractions)
    assert not failed


def _directions(m, rng):
    extra = rng.standard_normal((max(0, 5 - m), m))
    return np.vstack([np.eye(m), extra])[:5] if m <= 5 else rng.standard_normal((5, m))


def test_c4_duality():
    rng = np.random.default_rng(4)
    smooth_bad, kink_bad = [], []
    for s in range(100):
        inst = random_instance(400 + s)
        sp, g = inst.space, inst.ground
        f = ExtendedFunction(g, rng.uniform(0, 1, g.n))
        c = rng.standard_normal(sp.m)
        rep = var.well_posedness(sp, f, c)
        assert rep.well_posed
        for h in _directions(sp.m, rng):
            p = var.gateaux_probe(sp, f, c, h)
            exact = float(h @ sp.eval_matrix[:, rep.minimizer])
            if p.status != "smooth_confirmed" or abs(p.forward[-1] - exact) > 1e-6 * (1 + abs(exact)):
                smooth_bad.append((s, p.forward[-1], exact))
    for s in range(20):
        inst = random_instance(500 + s)
        f, c0 = _tied_start(inst.space, rng, inst.ground)
        h = rng.standard_normal(inst.space.m)
        p = var.gateaux_probe(inst.space, f, c0, h)
        if p.status != "nonsmooth_confirmed" or p.disagreement < 10 * 1e-6 * (1 + abs(p.forward[-1])):
            kink_bad.append((s, p.disagreement))
    ok = not smooth_bad and not kink_bad
    report("C4 derivative is the Dirac pairing iff well-posed", ok,
           f"smooth mismatches={len(smooth_bad)}, undetected kinks={len(kink_bad)}")
    assert not smooth_bad, smooth_bad[:5]
    assert not kink_bad, kink_bad


def test_c5_dual_ball(boundary_family):
    rng = np.random.default_rng(5)
    bad_sets, worst = [], 0.0
    for inst in boundary_family:
        sp = inst.space
        assert sp.has_constants
        poly = bd.dual_ball(sp, inst.K)
        exp = points.exposed_set(sp, inst.K, screen=False)
        want = {(s, k) for k in exp for s in (1, -1)}
        if bd.weakstar_exposed_generators(poly).labels() != want:
            bad_sets.append(inst.seed)
        for c in rng.standard_normal((100, sp.m)):
            worst = max(worst, abs(poly.support(c) - ps.sup_norm(sp, c, inst.K)))
    ok = not bad_sets and worst <= 1e-9
    report("C5 weak*-exposed generators and support identity", ok,
           f"set mismatches={bad_sets}, max support deviation={worst:.2e}")
    assert not bad_sets
    assert worst <= 1e-9


def test_c6_boundaries(boundary_family):
    bad, not_minimal = [], []
    for inst in boundary_family:
        sp = inst.space
        poly = bd.dual_ball(sp, inst.K)
        sh = bd.shilov_boundary(poly)
        ch = bd.choquet_boundary(poly)
        exp = points.exposed_set(sp, inst.K, screen=False)
        if not (sh == ch and ch.as_set() == exp.as_set()):
            bad.append(inst.seed)
        if len(sh) > 1:
            for k in sh:
                if bd.is_norming_subset(poly, [y for y in sh if y != k]):
                    not_minimal.append((inst.seed, k))
    ok = not bad and not not_minimal
    report("C6 Shilov = Choquet = exposed, minimal norming", ok, f"mismatch={bad}, removable={not_minimal}")
    assert not bad
    assert not not_minimal


def test_c7_classical_planar():
    rng = np.random.default_rng(77)
    bad = []
    for s in range(20):
        n = int(rng.integers(6, 30))
        P = rng.uniform(-1, 1, (n, 2))
        # a grid of ambient points for the point-in-polygon comparison
        grid = np.stack(np.meshgrid(np.linspace(-1.1, 1.1, 9), np.linspace(-1.1, 1.1, 9)), -1).reshape(-1, 2)
        g = build_ground_set(points=np.vstack([P, grid]))
        A = g.subset(range(n))
        C = g.subset(range(n))
        cls = points.compare_point_classes(C)
        vertices = sorted(ConvexHull(P).vertices.tolist())
        if not (list(cls.exp) == list(cls.aexp) == list(cls.ext) == vertices):
            bad.append((s, "classes"))
        aff = ps.affine(g)
        H = phi_convex_hull(aff, A)
        tri = Delaunay(P)
        ch = ConvexHull(P)
        dist = np.max(grid @ ch.equations[:, :2].T + ch.equations[:, 2], axis=1)
        for j, q in enumerate(grid):
            if abs(dist[j]) < 1e-6:
                continue
            if (tri.find_simplex(q) >= 0) != ((n + j) in H):
                bad.append((s, "membership", j))
        m = points.milman_converse_check(aff, A)
        if not m.passed:
            bad.append((s, "milman"))
    report("C7 classical planar agreement and Milman converse", not bad, f"failures={bad}")
    assert not bad


def test_c8_gallery():
    cube = gallery("truncated_cube(3)")
    wf = cube.results["weighted_functional"]
    stad = gallery("stadium")
    corner = stad.results["corner"]
    ok = (cube.passed and wf["margin"] > 0 and stad.passed and corner["extreme"]
          and not corner["exposed"] and corner["min_touching_diameter"] >= 0.5)
    report("C8 truncated cube and stadium", ok,
           f"cube margin={wf['margin']}, stadium min diameter={corner['min_touching_diameter']}")
    assert ok


def test_c9_conjugate_analytics():
    rng = np.random.default_rng(9)
    worst_lip, worst_cvx, count = 0.0, 0.0, 0
    for s in range(20):
        inst = random_instance(600 + s)
        sp, g = inst.space, inst.ground
        vals = rng.uniform(-1, 1, g.n)
        inf = rng.choice(g.n, g.n // 3, replace=False)
        f = ExtendedFunction.from_table(g, vals, [i for i in inf if i not in inst.K][:max(0, g.n - 1)])
        for _ in range(50):
            c1, c2 = rng.standard_normal((2, sp.m)) * rng.uniform(0.1, 3)
            a, b = var.conjugate(sp, f, c1), var.conjugate(sp, f, c2)
            worst_lip = max(worst_lip, abs(a - b) - ps.sup_norm(sp, c1 - c2))
            lam = rng.uniform()
            worst_cvx = max(worst_cvx, var.conjugate(sp, f, lam * c1 + (1 - lam) * c2) - lam * a - (1 - lam) * b)
            count += 1
    ok = count == 1000 and worst_lip <= 1e-9 and worst_cvx <= 1e-9
    report("C9 conjugate is 1-Lipschitz and convex", ok,
           f"{count} pairs, worst Lipschitz excess={worst_lip:.2e}, worst convexity excess={worst_cvx:.2e}")
    assert ok


def test_c10_lp_kernel():
    rng = np.random.default_rng(10)
    mismatches, nondet = [], []
    for i in range(500):
        c, rows, rels, rhs, lo, hi = random_lp(rng)
        prog = lp.LinearProgram(c, [(np.array(r), rel, v) for r, rel, v in zip(rows, rels, rhs)], list(lo), list(hi))
        out = lp.solve(prog)
        again = lp.solve(prog)
        status, value = vertex_oracle(c, rows, rels, rhs, lo, hi)
        if out.status != status or (value is not None and abs(out.value - value) > 1e-6):
            mismatches.append(i)
        if out.status != again.status or (out.optimal and not np.array_equal(out.solution, again.solution)):
            nondet.append(i)
    ok = not mismatches and not nondet
    report("C10 LP kernel vs vertex oracle", ok, f"mismatches={mismatches}, nondeterministic={nondet}")
    assert ok
