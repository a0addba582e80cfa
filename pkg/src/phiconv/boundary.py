"""The dual unit ball of (span, sup norm on K) and its boundaries.

On a finite K the dual ball is the polytope ``conv(+-delta_x : x in K)`` in
dual coordinates.  Its vertices give the Choquet boundary; the smallest
norming subset (the Shilov boundary) coincides with it.  For infinite K the
inclusion of exposed points in the Choquet boundary can be strict; on the
finite instances handled here the two sets are equal once the span contains
the constants and separates points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import lp
from .errors import EmptySet, HypothesisViolated, NotSubset, PhiConvexError
from .ground import PointSubset, as_subset
from .hull import STRICT_TOL
from .phi_space import DualVector, PhiSpace, PhiVector, separates_points

DUP_TOL = 1e-12


@dataclass(frozen=True)
class Generator:
    sign: int  # +1 or -1
    point: int
    vector: DualVector

    @property
    def label(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.point}"


@dataclass(frozen=True)
class ExposedGenerator:
    sign: int
    point: int
    direction: PhiVector
    margin: float

    def to_dict(self) -> dict:
        return {"sign": self.sign, "point": self.point,
                "direction": self.direction.coeffs.tolist(), "margin": self.margin}


@dataclass(frozen=True, eq=False)
class DualPolytope:
    space: PhiSpace
    K: PointSubset
    generators: Tuple[Generator, ...]

    @property
    def dimension(self) -> int:
        return self.space.m

    @property
    def matrix(self) -> np.ndarray:
        """``(2|K|, m)`` array of generator coordinates (all + first, then all -)."""
        return np.array([g.vector.coords for g in self.generators])

    def support(self, c) -> float:
        """max over generators of <g, c>; equals the sup norm of phi_c on K."""
        return float(np.max(self.matrix @ self.space.coeffs(c)))

    def _distinct(self, i: int) -> np.ndarray:
        G = self.matrix
        return np.flatnonzero(np.max(np.abs(G - G[i]), axis=1) > DUP_TOL)

    def duplicates(self) -> List[Tuple[str, str]]:
        """Pairs of generators that coincide as vectors."""
        G = self.matrix
        out = []
        for i in range(len(G)):
            for j in range(i + 1, len(G)):
                if np.max(np.abs(G[i] - G[j])) <= DUP_TOL:
                    out.append((self.generators[i].label, self.generators[j].label))
        return out


def dual_ball(space: PhiSpace, K=None) -> DualPolytope:
    K = as_subset(space.ground, K)
    if len(K) == 0:
        raise EmptySet("dual ball of an empty set")
    if not space.has_constants:
        warnings.warn("span does not contain the constants", stacklevel=2)
    if not separates_points(space, K):
        warnings.warn("span does not separate the points of K", stacklevel=2)
    D = space.duals
    gens = tuple(Generator(s, k, DualVector(s * D[k])) for s in (1, -1) for k in K)
    return DualPolytope(space, K, gens)


def _in_hull(target: np.ndarray, points: np.ndarray) -> bool:
    """Is ``target`` a convex combination of the rows of ``points``?"""
    if points.shape[0] == 0:
        return False
    r = points.shape[0]
    prog = lp.LinearProgram(np.zeros(r), [], [0.0] * r, [None] * r)
    for j in range(points.shape[1]):
        prog.add(points[:, j], lp.EQ, target[j])
    prog.add(np.ones(r), lp.EQ, 1.0)
    out = lp.solve(prog)
    if out.status == "unbounded":
        raise PhiConvexError("feasibility LP reported unbounded")
    return out.optimal


def vertex_flags(poly: DualPolytope) -> List[bool]:
    G = poly.matrix
    return [not _in_hull(G[i], G[poly._distinct(i)]) for i in range(len(G))]


def choquet_boundary(poly: DualPolytope) -> PointSubset:
    """Points whose Dirac is a vertex of the dual ball."""
    n = len(poly.K)
    flags = vertex_flags(poly)
    # the ball is symmetric, so +delta and -delta are vertices together
    pts = [g.point for g, v in zip(poly.generators[:n], flags[:n]) if v]
    return PointSubset(poly.space.ground, tuple(pts))


def is_norming_subset(poly: DualPolytope, L) -> bool:
    L = as_subset(poly.space.ground, L)
    if len(L) == 0:
        raise EmptySet("norming subset must be nonempty")
    if not L.issubset(poly.K):
        raise NotSubset(f"{sorted(set(L) - set(poly.K))} not in K")
    D = poly.space.duals
    sub = np.vstack([D[L.index], -D[L.index]])
    return all(k in L or _in_hull(D[k], sub) for k in poly.K)


def shilov_boundary(poly: DualPolytope) -> PointSubset:
    """The smallest norming subset of K."""
    space = poly.space
    if not space.has_constants:
        raise HypothesisViolated("Shilov boundary requires the constants in the span")
    sep = separates_points(space, poly.K)
    if not sep:
        raise HypothesisViolated(f"span does not separate points {sep.witness}")
    S = choquet_boundary(poly)
    if not is_norming_subset(poly, S):
        raise PhiConvexError("Choquet boundary failed the norming test")
    return S


@dataclass
class WeakStarExposure:
    exposed: List[ExposedGenerator]
    degenerate: List[Tuple[str, str]]

    def labels(self) -> set:
        return {(e.sign, e.point) for e in self.exposed}


def _exposure_lp(poly: DualPolytope, i: int):
    """max t s.t. <g_i - g', c> >= t for distinct g', |phi_c| <= 1 on K."""
    G = poly.matrix
    m = poly.dimension
    others = G[poly._distinct(i)]
    if others.shape[0] == 0:
        return np.inf, np.zeros(m)
    diffs = np.unique(G[i] - others, axis=0)
    prog = lp.LinearProgram(np.r_[np.zeros(m), 1.0], [], [None] * (m + 1), [None] * (m + 1))
    for row in diffs:
        prog.add(np.r_[-row, 1.0], lp.LE, 0.0)
    for k in poly.K:
        d = poly.space.duals[k]
        prog.add(np.r_[d, 0.0], lp.LE, 1.0)
        prog.add(np.r_[-d, 0.0], lp.LE, 1.0)
    out = lp.solve(prog)
    if not out.optimal:
        raise PhiConvexError(f"weak* exposure LP ended with status {out.status}")
    return float(out.value), out.solution[:m]


def weakstar_exposed_generators(poly: DualPolytope) -> WeakStarExposure:
    exposed = []
    for i, g in enumerate(poly.generators):
        t, c = _exposure_lp(poly, i)
        if t > STRICT_TOL:
            exposed.append(ExposedGenerator(g.sign, g.point, PhiVector(c), t))
    return WeakStarExposure(exposed, poly.duplicates())
