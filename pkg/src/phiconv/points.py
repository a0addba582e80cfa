"""Betweenness, extremal and exposed points, and reconstruction checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from . import lp
from .errors import EmptySet, HypothesisViolated, PhiConvexError
from .ground import PointSubset, as_subset
from .hull import STRICT_TOL, hull_membership, is_phi_convex, max_margin, phi_convex_hull
from .phi_space import PhiSpace, PhiVector, affine, linear, separates_points

# a cheap feasible witness must beat the LP threshold by this factor to skip the LP
_SCREEN_FACTOR = 2.0


@dataclass(frozen=True)
class ExposureWitness:
    point: int
    direction: PhiVector
    margin: float
    vacuous: bool = False

    def verify(self, space: PhiSpace, C, tol: float = 1e-9) -> bool:
        if self.vacuous:
            return True
        vals = space.values(self.direction)
        others = [y for y in as_subset(space.ground, C) if y != self.point]
        return bool(np.all(vals[self.point] >= vals[others] + self.margin - tol))

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "direction": self.direction.coeffs.tolist(),
            "margin": None if math.isinf(self.margin) else self.margin,
            "vacuous": self.vacuous,
        }


def _nonempty(S: PointSubset, what: str = "set") -> PointSubset:
    if len(S) == 0:
        raise EmptySet(f"{what} must be nonempty")
    return S


# --- betweenness ----------------------------------------------------------------

def _between_lp(space: PhiSpace, a: int, x: int, y: int, target: int) -> float:
    """max phi_c(a) - phi_c(target) s.t. phi_c(x) <= phi_c(a), phi_c(y) <= phi_c(a), |c|_inf <= 1."""
    D = space.duals
    m = space.m
    prog = lp.LinearProgram(D[a] - D[target], [], [-1.0] * m, [1.0] * m)
    prog.add(D[x] - D[a], lp.LE, 0.0)
    prog.add(D[y] - D[a], lp.LE, 0.0)
    out = lp.solve(prog)
    if not out.optimal:
        raise PhiConvexError(f"betweenness LP ended with status {out.status}")
    return float(out.value)


def is_phi_between(space: PhiSpace, a: int, x: int, y: int) -> bool:
    """True iff every phi with phi(x) <= phi(a) and phi(y) <= phi(a) takes one value at a, x, y."""
    g = space.ground
    a, x, y = g.check_id(a), g.check_id(x), g.check_id(y)
    return _between_lp(space, a, x, y, x) <= STRICT_TOL and _between_lp(space, a, x, y, y) <= STRICT_TOL


def _screen_pairs(duals: np.ndarray, a: int, cand: np.ndarray):
    """Pairs (x, y) of ``cand`` for which no cheap witness rules out betweenness of a.

    For u = delta_x - delta_a and v = delta_y - delta_a the direction
    c = -(u/|u| + v/|v|), rescaled into the unit box, satisfies both LP
    constraints; its objective values lower-bound the two LP optima.
    """
    U = duals[cand] - duals[a]
    norms = np.linalg.norm(U, axis=1)
    Uh = np.divide(U, norms[:, None], out=np.zeros_like(U), where=norms[:, None] > 0)
    i, j = np.triu_indices(len(cand))
    W = -(Uh[i] + Uh[j])
    scale = np.max(np.abs(W), axis=1)
    ok = scale > 0
    C = np.zeros_like(W)
    C[ok] = W[ok] / scale[ok, None]
    obj1 = -np.einsum("ij,ij->i", C, U[i])
    obj2 = -np.einsum("ij,ij->i", C, U[j])
    ruled_out = np.maximum(obj1, obj2) > _SCREEN_FACTOR * STRICT_TOL
    keep = ~ruled_out
    return cand[i[keep]], cand[j[keep]]


def _is_extremal(space: PhiSpace, a: int, B: np.ndarray, screen: bool) -> bool:
    if screen:
        xs, ys = _screen_pairs(space.duals, a, B)
    else:
        i, j = np.triu_indices(len(B))
        xs, ys = B[i], B[j]
    for x, y in zip(xs.tolist(), ys.tolist()):
        if x == a and y == a:
            continue
        if is_phi_between(space, a, x, y):
            return False
    return True


def phi_extremal_points(space: PhiSpace, B=None, screen: bool = True) -> PointSubset:
    """Points a of B such that a is Phi-between x, y in B only when x = y = a.

    Exposed points are extremal (their witness is feasible for the betweenness
    LP with objective equal to the exposure margin), so only the remaining
    candidates go through the pair scan.  ``screen`` additionally discards
    pairs that a closed-form feasible direction already rules out.
    """
    g = space.ground
    B = _nonempty(as_subset(g, B))
    idx = B.index
    exposed = set(exposure_margins(space, B)) if screen else set()
    out = [a for a in B if a in exposed or _is_extremal(space, a, idx, screen)]
    return PointSubset(g, tuple(out))


# --- exposure -----------------------------------------------------------------------

def _screen_exposure(duals: np.ndarray, idx: np.ndarray):
    """Cheap exposure candidates: c_k = delta_k - mean(delta_C), rescaled into the unit box.

    Returns the candidates and their margins min_{y != k} <c_k, delta_k - delta_y>.
    """
    D = duals[idx]
    W = D - D.mean(axis=0)
    scale = np.max(np.abs(W), axis=1)
    W = np.divide(W, scale[:, None], out=np.zeros_like(W), where=scale[:, None] > 0)
    vals = W @ D.T  # vals[k, y] = <c_k, delta_y>
    gaps = np.diag(vals)[:, None] - vals
    np.fill_diagonal(gaps, np.inf)
    return W, gaps.min(axis=1)


def exposure_margins(space: PhiSpace, C=None, screen: bool = True) -> Dict[int, ExposureWitness]:
    """Exposure witnesses for every Phi-exposed point of C, keyed by point id.

    With ``screen`` a closed-form candidate direction is tried first; when
    its margin clears the threshold it is kept as the witness (the LP
    optimum can only be larger), otherwise the max-margin LP decides.
    """
    g = space.ground
    C = _nonempty(as_subset(g, C))
    if len(C) == 1:
        k = C.members[0]
        return {k: ExposureWitness(k, PhiVector(np.zeros(space.m)), math.inf, vacuous=True)}
    if screen:
        W, margins = _screen_exposure(space.duals, C.index)
    out = {}
    for i, k in enumerate(C):
        if screen and margins[i] > _SCREEN_FACTOR * STRICT_TOL:
            t, c = float(margins[i]), W[i]
        else:
            t, c = max_margin(space, k, [y for y in C if y != k])
        if t > STRICT_TOL:
            w = ExposureWitness(k, PhiVector(c), t)
            if not w.verify(space, C):
                raise PhiConvexError(f"exposure witness for {k} failed re-evaluation")
            out[k] = w
    return out


def phi_exposed_points(space: PhiSpace, C=None, screen: bool = False) -> List[ExposureWitness]:
    """Exposure witnesses; by default each margin is the LP optimum t*."""
    return list(exposure_margins(space, C, screen).values())


def exposed_set(space: PhiSpace, C=None, screen: bool = True) -> PointSubset:
    return PointSubset(space.ground, tuple(exposure_margins(space, C, screen)))


def affine_exposed_points(C) -> List[ExposureWitness]:
    """Exposure by affine functions (constants plus coordinate functionals)."""
    g = C.parent if isinstance(C, PointSubset) else None
    if g is None:
        raise TypeError("affine_exposed_points needs a PointSubset")
    return phi_exposed_points(affine(g), C)


def extreme_points_by_deletion(space: PhiSpace, B=None) -> PointSubset:
    """Points k of B with k outside the Phi-convex hull of B minus k.

    With the affine dictionary these are the classical extreme points
    (vertices of the convex hull) of a finite point set.
    """
    g = space.ground
    B = _nonempty(as_subset(g, B))
    if len(B) == 1:
        return B
    out = [k for k in B if not hull_membership(space, [y for y in B if y != k], k).inside]
    return PointSubset(g, tuple(out))


@dataclass
class PointClassReport:
    exp: PointSubset
    aexp: PointSubset
    ext: PointSubset

    @property
    def chain_holds(self) -> bool:
        return self.exp.issubset(self.aexp) and self.aexp.issubset(self.ext)

    def to_dict(self) -> dict:
        return {
            "exp": list(self.exp),
            "aexp": list(self.aexp),
            "ext": list(self.ext),
            "chain_holds": self.chain_holds,
        }


def compare_point_classes(C) -> PointClassReport:
    """Exp (linear functionals), AExp (affine functions) and Ext (hull deletion)."""
    if not isinstance(C, PointSubset):
        raise TypeError("compare_point_classes needs a PointSubset")
    g = C.parent
    g.require_coords()
    aff = affine(g)
    return PointClassReport(
        exp=exposed_set(linear(g), C),
        aexp=exposed_set(aff, C),
        ext=extreme_points_by_deletion(aff, C),
    )


# --- reconstruction -------------------------------------------------------------------

@dataclass
class ReconstructionReport:
    mode: str
    K: PointSubset
    generators: PointSubset
    hull: PointSubset
    witnesses: list = field(default_factory=list)

    @property
    def missing(self) -> list:
        return sorted(set(self.K) - set(self.hull))

    @property
    def extra(self) -> list:
        return sorted(set(self.hull) - set(self.K))

    @property
    def passed(self) -> bool:
        return len(self.generators) > 0 and not self.missing and not self.extra

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "K": list(self.K),
            "generators": list(self.generators),
            "hull": list(self.hull),
            "missing": self.missing,
            "extra": self.extra,
            "passed": self.passed,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def reconstruction_check(space: PhiSpace, K, ambient=None, mode: str = "exposed") -> ReconstructionReport:
    """Recover K as the hull of its extremal (or exposed) points."""
    g = space.ground
    K = _nonempty(as_subset(g, K), "K")
    ambient = as_subset(g, ambient)
    if mode not in ("extremal", "exposed"):
        raise ValueError(f"mode must be 'extremal' or 'exposed', got {mode!r}")
    sep = separates_points(space, K)
    if not sep:
        raise HypothesisViolated(f"dictionary does not separate points {sep.witness} of K")
    if not is_phi_convex(space, K, ambient):
        raise HypothesisViolated("K is not Phi-convex in the ambient set")
    witnesses = []
    if mode == "exposed":
        witnesses = phi_exposed_points(space, K)
        P = PointSubset(g, tuple(w.point for w in witnesses))
    else:
        P = phi_extremal_points(space, K)
    hull = phi_convex_hull(space, P, ambient) if len(P) else PointSubset(g, ())
    return ReconstructionReport(mode, K, P, hull, witnesses)


@dataclass
class MilmanReport:
    A: PointSubset
    K: PointSubset
    extreme: PointSubset
    pair_extremal: PointSubset

    @property
    def outside(self) -> list:
        return sorted(set(self.extreme) - set(self.A))

    @property
    def passed(self) -> bool:
        return not self.outside

    def to_dict(self) -> dict:
        return {
            "A": list(self.A),
            "K": list(self.K),
            "extreme": list(self.extreme),
            "pair_extremal": list(self.pair_extremal),
            "extreme_outside_A": self.outside,
            "passed": self.passed,
        }


def milman_converse_check(space: PhiSpace, A, ambient=None) -> MilmanReport:
    """With K = hull(A), every extreme point of K lies in A.

    Extreme points are taken by deletion (k not in the hull of K minus k).
    The pair-scan Phi-extremal set is reported alongside; on finite sets it
    can contain hull-interior points lying on no segment, so it is
    informational only.
    """
    g = space.ground
    A = _nonempty(as_subset(g, A))
    K = phi_convex_hull(space, A, ambient)
    return MilmanReport(A, K, extreme_points_by_deletion(space, K), phi_extremal_points(space, K))


# --- the stadium: extreme but not exposed --------------------------------------------------

STADIUM_CORNERS = ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))


def stadium_contains(p, tol: float = 0.0) -> bool:
    """The stadium is every point within distance 1 of the segment [(-1,0), (1,0)]."""
    x, y = float(p[0]), float(p[1])
    dx = max(abs(x) - 1.0, 0.0)
    return math.hypot(dx, y) <= 1.0 + tol


def _stadium_pieces():
    # ("seg", p, q) or ("arc", center, start_angle, end_angle)
    return [
        ("seg", (-1.0, 1.0), (1.0, 1.0)),
        ("seg", (-1.0, -1.0), (1.0, -1.0)),
        ("arc", (1.0, 0.0), -math.pi / 2, math.pi / 2),
        ("arc", (-1.0, 0.0), math.pi / 2, 3 * math.pi / 2),
    ]


def stadium_maximizers(theta: float, tol: float = 1e-12) -> list:
    """Maximizer set of <(cos t, sin t), .> over the stadium.

    Returned as a list of pieces: ``[p]`` for a single point, ``[p, q]`` for a
    whole boundary segment.
    """
    u = np.array([math.cos(theta), math.sin(theta)])
    cands = []  # (value, [points])
    for piece in _stadium_pieces():
        if piece[0] == "seg":
            p, q = np.array(piece[1]), np.array(piece[2])
            vp, vq = u @ p, u @ q
            if abs(vp - vq) <= tol:
                cands.append((max(vp, vq), [p, q]))
            else:
                cands.append((vp, [p]) if vp > vq else (vq, [q]))
        else:
            o, s0, s1 = np.array(piece[1]), piece[2], piece[3]
            s = (theta - s0) % (2 * math.pi) + s0
            if s <= s1:
                cands.append((u @ o + 1.0, [o + np.array([math.cos(s), math.sin(s)])]))
            else:
                for e in (s0, s1):
                    pt = o + np.array([math.cos(e), math.sin(e)])
                    cands.append((u @ pt, [pt]))
    best = max(v for v, _ in cands)
    return [ps for v, ps in cands if v >= best - tol]


def _diameter(pieces) -> float:
    P = np.array([p for ps in pieces for p in ps])
    return float(np.max(np.linalg.norm(P[:, None] - P[None], axis=-1)))


def _on_piece(p: np.ndarray, piece) -> bool:
    if len(piece) == 1:
        return bool(np.linalg.norm(piece[0] - p) <= 1e-9)
    a, b = piece
    t = np.clip((p - a) @ (b - a) / ((b - a) @ (b - a)), 0.0, 1.0)
    return bool(np.linalg.norm(a + t * (b - a) - p) <= 1e-9)


def midpoint_extreme(p, n_dirs: int = 720, radii=(1e-1, 1e-2, 1e-3)) -> bool:
    """True iff no sampled chord through p has both endpoints inside the stadium."""
    p = np.asarray(p, dtype=float)
    for k in range(n_dirs):
        ang = math.pi * k / n_dirs
        w = np.array([math.cos(ang), math.sin(ang)])
        for r in radii:
            if stadium_contains(p + r * w) and stadium_contains(p - r * w):
                return False
    return True


@dataclass
class StadiumReport:
    point: tuple
    n_angles: int
    extreme: bool
    touching_angles: list
    min_touching_diameter: float
    exposing_angles: list

    @property
    def exposed(self) -> bool:
        return bool(self.exposing_angles)

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "n_angles": self.n_angles,
            "extreme": self.extreme,
            "touching_angles": self.touching_angles,
            "min_touching_diameter": self.min_touching_diameter,
            "exposing_angles": self.exposing_angles,
            "exposed": self.exposed,
        }


def stadium_diagnostic(point=(1.0, 1.0), n_angles: int = 10_000, min_diameter: float = 0.5,
                       tol: float = 1e-12) -> StadiumReport:
    """Angular sampling of support directions for one boundary point of the stadium.

    A direction "touches" the point when the point lies in its maximizer set;
    it exposes the point when, in addition, the maximizer set has diameter
    below ``min_diameter``.  The corners (+-1, +-1) are extreme but every
    touching direction has the whole flat edge as maximizer set.
    """
    p = np.asarray(point, dtype=float)
    touching, diams, exposing = [], [], []
    for k in range(n_angles):
        theta = 2 * math.pi * k / n_angles
        pieces = stadium_maximizers(theta, tol)
        if any(_on_piece(p, piece) for piece in pieces):
            d = _diameter(pieces)
            touching.append(theta)
            diams.append(d)
            if d < min_diameter:
                exposing.append(theta)
    return StadiumReport(
        point=tuple(float(v) for v in p),
        n_angles=n_angles,
        extreme=midpoint_extreme(p),
        touching_angles=touching,
        min_touching_diameter=min(diams) if diams else math.inf,
        exposing_angles=exposing,
    )
