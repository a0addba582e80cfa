"""Phi-convex hulls over a finite ambient set.

Over a span of dictionary functions the hull of A is
``{x : phi(x) <= max_A phi for every phi in the span}``.  Whether x belongs
to it is decided by one LP over coefficient vectors in the box
``|c_i| <= 1``::

    maximize t  s.t.  phi_c(x) - phi_c(a) >= t  for all a in A

x is outside exactly when the optimum exceeds ``STRICT_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import lp
from .errors import EmptySet, NotSeparable, NotSubset, PhiConvexError
from .ground import PointSubset, as_subset
from .phi_space import PhiSpace, PhiVector

STRICT_TOL = 1e-7


@dataclass(frozen=True)
class SeparationCertificate:
    """phi_direction <= threshold - margin on the set, >= threshold + margin at the point."""

    point: int
    direction: PhiVector
    threshold: float
    margin: float

    def verify(self, space: PhiSpace, A) -> bool:
        vals = space.values(self.direction)
        idx = as_subset(space.ground, A).index
        slack = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
        return bool(
            np.all(vals[idx] <= self.threshold - self.margin + slack)
            and vals[self.point] >= self.threshold + self.margin - slack
        )

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "direction": self.direction.coeffs.tolist(),
            "threshold": self.threshold,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class Membership:
    inside: bool
    t_star: float
    certificate: Optional[SeparationCertificate] = None

    def __bool__(self):
        return self.inside


def max_margin(space: PhiSpace, k: int, competitors) -> tuple:
    """Solve ``max t`` s.t. ``phi_c(k) - phi_c(y) >= t`` for all competitors, ``|c|_inf <= 1``.

    Returns ``(t_star, c_star)``.  With no competitors the program is
    unbounded and ``(inf, 0)`` is returned.
    """
    duals = space.duals
    comp = np.asarray(list(competitors), dtype=int)
    if comp.size == 0:
        return float("inf"), np.zeros(space.m)
    diffs = duals[k] - duals[comp]
    # identical difference rows add nothing but degeneracy
    diffs = np.unique(diffs, axis=0)
    m = space.m
    prog = lp.LinearProgram(np.r_[np.zeros(m), 1.0], [], [-1.0] * m + [None], [1.0] * m + [None])
    for row in diffs:
        prog.add(np.r_[-row, 1.0], lp.LE, 0.0)
    out = lp.solve(prog)
    if not out.optimal:
        raise PhiConvexError(f"margin LP ended with status {out.status}")
    return float(out.value), out.solution[:m]


def _check_nonempty(A: PointSubset) -> None:
    if len(A) == 0:
        raise EmptySet("set must be nonempty")


def hull_membership(space: PhiSpace, A, x: int) -> Membership:
    g = space.ground
    A = as_subset(g, A)
    _check_nonempty(A)
    x = g.check_id(x)
    if x in A:
        return Membership(True, 0.0)
    t, c = max_margin(space, x, A)
    if t <= STRICT_TOL:
        return Membership(True, t)
    vals = c @ space.eval_matrix
    sup_a = float(np.max(vals[A.index]))
    cert = SeparationCertificate(x, PhiVector(c), 0.5 * (sup_a + float(vals[x])), 0.5 * t)
    if not cert.verify(space, A):
        raise PhiConvexError("separation certificate failed re-evaluation")
    return Membership(False, t, cert)


def phi_convex_hull(space: PhiSpace, A, ambient=None) -> PointSubset:
    g = space.ground
    A = as_subset(g, A)
    _check_nonempty(A)
    ambient = as_subset(g, ambient)
    if not A.issubset(ambient):
        raise NotSubset(f"{sorted(set(A) - set(ambient))} not in the ambient set")
    inside = [x for x in ambient if x in A or hull_membership(space, A, x).inside]
    return PointSubset(g, tuple(inside))


def is_phi_convex(space: PhiSpace, X, ambient=None) -> bool:
    """True iff X equals its own hull inside ``ambient`` (the ambient set itself always is)."""
    g = space.ground
    X = as_subset(g, X)
    ambient = as_subset(g, ambient)
    if not X.issubset(ambient):
        raise NotSubset(f"{sorted(set(X) - set(ambient))} not in the ambient set")
    _check_nonempty(X)
    if len(X) == len(ambient):
        return True
    return phi_convex_hull(space, X, ambient) == X


def separate_from_hull(space: PhiSpace, A, x: int) -> SeparationCertificate:
    res = hull_membership(space, A, x)
    if res.inside:
        raise NotSeparable(f"point {x} lies in the hull (t*={res.t_star:.3g})")
    return res.certificate
