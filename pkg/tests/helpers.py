"""Seeded instance generators and independent oracles shared by the tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from phiconv import phi_space as ps
from phiconv.ground import GroundSet, PointSubset, build_ground_set
from phiconv.hull import phi_convex_hull

KINDS = ("affine", "distance", "rbf")


@dataclass
class Instance:
    ground: GroundSet
    space: ps.PhiSpace
    A: PointSubset
    K: PointSubset
    kind: str
    seed: int


def make_space(g: GroundSet, kind: str, rng, constants: bool = False) -> ps.PhiSpace:
    if kind == "affine":
        return ps.affine(g)
    n_anchors = min(g.n, g.dim)
    anchors = sorted(rng.choice(g.n, n_anchors, replace=False).tolist())
    if kind == "distance":
        return ps.distance(g, anchors, constants=constants)
    return ps.rbf(g, anchors, gamma=1.0, constants=constants)


def random_instance(seed: int, kind: str = None, constants: bool = False, n_range=(5, 40)) -> Instance:
    """5-40 points in R^2 or R^3, a separating dictionary, K = hull of a random subset."""
    rng = np.random.default_rng(seed)
    kind = kind or KINDS[seed % 3]
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        d = int(rng.choice([2, 3]))
        g = build_ground_set(points=rng.uniform(-1, 1, (n, d)))
        space = make_space(g, kind, rng, constants)
        if ps.separates_points(space, tol=1e-6):
            break
    k = int(rng.integers(2, max(2, n // 2) + 1))
    A = g.subset(rng.choice(n, k, replace=False).tolist())
    return Instance(g, space, A, phi_convex_hull(space, A), kind, seed)


def scipy_outside(space: ps.PhiSpace, A, x: int) -> float:
    """Max-margin LP solved by HiGHS: > 0 means x is outside the hull of A."""
    D = space.duals
    A = list(A)
    m = space.m
    res = linprog(np.r_[np.zeros(m), -1.0],
                  A_ub=np.c_[-(D[x] - D[A]), np.ones(len(A))], b_ub=np.zeros(len(A)),
                  bounds=[(-1, 1)] * m + [(None, None)], method="highs")
    assert res.status == 0
    return -res.fun


# --- brute-force LP oracle -----------------------------------------------------------

def random_lp(rng):
    """Small LP with box bounds: up to 6 variables and 10 constraints of mixed relations."""
    n = int(rng.integers(1, 7))
    k = int(rng.integers(0, 11))
    lo = rng.uniform(-3, 0, n).round(3)
    hi = (lo + rng.uniform(0.5, 4, n)).round(3)
    x0 = rng.uniform(lo, hi)
    feasible = rng.uniform() < 0.8
    rows, rels, rhs = [], [], []
    for _ in range(k):
        a = rng.integers(-4, 5, n).astype(float)
        rel = rng.choice(["<=", ">=", "="], p=[0.5, 0.35, 0.15])
        v = float(a @ x0)
        if rel == "<=":
            b = v + rng.uniform(0, 2) if feasible else rng.uniform(-6, 6)
        elif rel == ">=":
            b = v - rng.uniform(0, 2) if feasible else rng.uniform(-6, 6)
        else:
            b = v if feasible else rng.uniform(-6, 6)
        rows.append(a)
        rels.append(str(rel))
        rhs.append(round(b, 6) if rel != "=" else b)
    c = rng.integers(-5, 6, n).astype(float)
    return c, rows, rels, rhs, lo, hi


def vertex_oracle(c, rows, rels, rhs, lo, hi, tol=1e-7):
    """Enumerate basic points of a bounded LP; returns ("optimal", value) or ("infeasible", None)."""
    n = len(c)
    H = list(rows)
    b = list(rhs)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        H += [e, e]
        b += [lo[j], hi[j]]
    H, b = np.array(H), np.array(b)
    combos = np.array(list(itertools.combinations(range(len(H)), n)))
    M = H[combos]
    ok = np.abs(np.linalg.det(M)) > 1e-9
    X = np.linalg.solve(M[ok], b[combos][ok][..., None])[..., 0]
    A = np.array(rows).reshape(len(rows), n)
    feas = np.all(X >= lo - tol, axis=1) & np.all(X <= hi + tol, axis=1)
    for a, r, v in zip(A, rels, rhs):
        val = X @ a
        scale = tol * max(1.0, abs(v))
        if r == "<=":
            feas &= val <= v + scale
        elif r == ">=":
            feas &= val >= v - scale
        else:
            feas &= np.abs(val - v) <= scale
    if not feas.any():
        return "infeasible", None
    return "optimal", float(np.max(X[feas] @ c))
