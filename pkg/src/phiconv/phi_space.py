"""Finite-dimensional function classes on a ground set.

A ``PhiSpace`` is the span of ``m`` dictionary functions, stored as an
``(m, n)`` evaluation matrix.  A coefficient vector ``c`` names the function
``phi_c(x) = sum_i c_i * eval_matrix[i, x]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, PhiConvexError
from .ground import GroundSet, as_subset

NORM_KINDS = ("sup_on_K", "coeff_l1", "coeff_l2")
NORM_ALIASES = {"sup": "sup_on_K", "l1": "coeff_l1", "l2": "coeff_l2"}
RANK_TOL = 1e-9
SEPARATION_TOL = 1e-9


@dataclass(frozen=True)
class PhiVector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise DimensionMismatch("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.coeffs.size

    def __add__(self, other: "PhiVector") -> "PhiVector":
        return PhiVector(self.coeffs + _coeffs(other))

    def __neg__(self) -> "PhiVector":
        return PhiVector(-self.coeffs)

    def __mul__(self, s: float) -> "PhiVector":
        return PhiVector(self.coeffs * s)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PhiVector) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())


@dataclass(frozen=True)
class DualVector:
    """A functional on the span, in coordinates dual to the dictionary."""

    coords: np.ndarray

    def __post_init__(self):
        q = np.array(self.coords, dtype=float).ravel()
        if not np.all(np.isfinite(q)):
            raise DimensionMismatch("dual coordinates must be finite")
        q.setflags(write=False)
        object.__setattr__(self, "coords", q)

    def pair(self, c) -> float:
        c = _coeffs(c)
        if c.size != self.coords.size:
            raise DimensionMismatch(f"pairing needs {self.coords.size} coefficients, got {c.size}")
        return float(self.coords @ c)

    def __neg__(self) -> "DualVector":
        return DualVector(-self.coords)

    def __eq__(self, other):
        return isinstance(other, DualVector) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


CoeffLike = Union[PhiVector, Sequence[float], np.ndarray]


def _coeffs(c: CoeffLike) -> np.ndarray:
    if isinstance(c, PhiVector):
        return c.coeffs
    arr = np.asarray(c, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"coefficient vector must be 1-D, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class PhiSpace:
    ground: GroundSet
    eval_matrix: np.ndarray
    norm_kind: str = "sup_on_K"
    alpha: Optional[float] = None
    kind: str = "table"
    has_constants: bool = field(init=False)
    rank: int = field(init=False)

    def __post_init__(self):
        M = np.array(self.eval_matrix, dtype=float)
        if M.ndim == 1:
            M = M[None, :]
        if M.ndim != 2 or M.shape[1] != self.ground.n or M.shape[0] < 1:
            raise DimensionMismatch(
                f"eval_matrix must be (m, {self.ground.n}), got shape {M.shape}"
            )
        if not np.all(np.isfinite(M)):
            raise DimensionMismatch("eval_matrix has non-finite entries")
        M.setflags(write=False)
        object.__setattr__(self, "eval_matrix", M)
        kind = NORM_ALIASES.get(self.norm_kind, self.norm_kind)
        if kind not in NORM_KINDS:
            raise PhiConvexError(f"unknown norm kind {self.norm_kind!r}")
        object.__setattr__(self, "norm_kind", kind)
        if self.alpha is None:
            object.__setattr__(self, "alpha", default_alpha(M, kind))
        elif self.alpha < 0:
            raise PhiConvexError("alpha must be nonnegative")
        rank = _rank(M)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "has_constants", _rank(np.vstack([M, np.ones(M.shape[1])])) == rank)
        self._check_alpha()

    @property
    def m(self) -> int:
        return self.eval_matrix.shape[0]

    @property
    def n(self) -> int:
        return self.eval_matrix.shape[1]

    @property
    def duals(self) -> np.ndarray:
        """``(n, m)`` array; row x holds the dual coordinates of the Dirac at x."""
        return self.eval_matrix.T

    def coeffs(self, c: CoeffLike) -> np.ndarray:
        c = _coeffs(c)
        if c.size != self.m:
            raise DimensionMismatch(f"expected {self.m} coefficients, got {c.size}")
        return c

    def values(self, c: CoeffLike) -> np.ndarray:
        """phi_c evaluated at every ground point."""
        return self.coeffs(c) @ self.eval_matrix

    def norm(self, c: CoeffLike) -> float:
        c = self.coeffs(c)
        if self.norm_kind == "sup_on_K":
            return float(np.max(np.abs(c @ self.eval_matrix)))
        if self.norm_kind == "coeff_l1":
            return float(np.sum(np.abs(c)))
        return float(np.linalg.norm(c))

    def _check_alpha(self, n_random: int = 32) -> None:
        rng = np.random.default_rng(0)
        probes = np.vstack([np.eye(self.m), rng.standard_normal((n_random, self.m))])
        for c in probes:
            sup = float(np.max(np.abs(c @ self.eval_matrix)))
            if sup > self.alpha * self.norm(c) + 1e-9 * max(1.0, sup):
                raise PhiConvexError(
                    f"alpha={self.alpha} violates alpha*||c|| >= sup|phi_c| ({sup} > {self.alpha * self.norm(c)})"
                )


def _rank(M: np.ndarray) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > RANK_TOL * max(1.0, s[0] if s.size else 0.0)))


def default_alpha(M: np.ndarray, norm_kind: str) -> float:
    """Smallest alpha with alpha * ||c|| >= max_x |phi_c(x)| for the given norm."""
    if norm_kind == "sup_on_K":
        return 1.0
    if norm_kind == "coeff_l1":
        # |sum c_i phi_i(x)| <= ||c||_1 * max_i |phi_i(x)|
        return float(np.max(np.abs(M)))
    # Cauchy-Schwarz per column: |<c, M[:, x]>| <= ||c||_2 * ||M[:, x]||_2
    return float(np.max(np.linalg.norm(M, axis=0)))


def evaluate(space: PhiSpace, c: CoeffLike, x: int) -> float:
    x = space.ground.check_id(x)
    return float(space.coeffs(c) @ space.eval_matrix[:, x])


def sup_norm(space: PhiSpace, c: CoeffLike, K=None) -> float:
    """max over K (default: every ground point) of |phi_c(x)|."""
    vals = space.values(c)
    if K is not None:
        vals = vals[as_subset(space.ground, K).index]
    return float(np.max(np.abs(vals)))


def dirac(space: PhiSpace, x: int) -> DualVector:
    x = space.ground.check_id(x)
    return DualVector(space.eval_matrix[:, x])


@dataclass(frozen=True)
class Separation:
    separates: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.separates


def separates_points(space: PhiSpace, K=None, tol: float = SEPARATION_TOL) -> Separation:
    """Check that some dictionary function tells apart every pair of points of K."""
    idx = as_subset(space.ground, K).index
    cols = space.eval_matrix[:, idx].T
    for i in range(len(idx)):
        gap = np.max(np.abs(cols[i + 1:] - cols[i]), axis=1) if i + 1 < len(idx) else np.array([])
        bad = np.flatnonzero(gap <= tol)
        if bad.size:
            return Separation(False, (int(idx[i]), int(idx[i + 1 + bad[0]])))
    return Separation(True)


# --- dictionary constructors -------------------------------------------------

def linear(g: GroundSet, norm_kind: str = "sup_on_K") -> PhiSpace:
    """Coordinate functionals x -> x_j."""
    X = g.require_coords()
    return PhiSpace(g, X.T.copy(), norm_kind, kind="linear")


def affine(g: GroundSet, norm_kind: str = "sup_on_K") -> PhiSpace:
    """The constant function followed by the coordinate functionals."""
    X = g.require_coords()
    return PhiSpace(g, np.vstack([np.ones(g.n), X.T]), norm_kind, kind="affine")


def _anchors(g: GroundSet, anchors: Optional[Iterable[int]]) -> list:
    return list(g.ids) if anchors is None else [g.check_id(k) for k in anchors]


def distance(g: GroundSet, anchors=None, constants: bool = False, norm_kind: str = "sup_on_K") -> PhiSpace:
    """Rows x -> -d(x, k) for each anchor k."""
    rows = [-g.dist[:, k] for k in _anchors(g, anchors)]
    if constants:
        rows.insert(0, np.ones(g.n))
    return PhiSpace(g, np.array(rows), norm_kind, kind="distance")


def rbf(g: GroundSet, anchors=None, gamma: float = 1.0, constants: bool = False,
        norm_kind: str = "sup_on_K") -> PhiSpace:
    """Rows x -> exp(-gamma * d(x, k)^2) for each anchor k."""
    rows = [np.exp(-gamma * g.dist[:, k] ** 2) for k in _anchors(g, anchors)]
    if constants:
        rows.insert(0, np.ones(g.n))
    return PhiSpace(g, np.array(rows), norm_kind, kind="rbf")


def table(g: GroundSet, rows, norm_kind: str = "sup_on_K") -> PhiSpace:
    return PhiSpace(g, np.array(rows, dtype=float), norm_kind, kind="table")


def indicators(g: GroundSet, norm_kind: str = "sup_on_K") -> PhiSpace:
    """The full dictionary of point indicators (the whole of C(K) on finite K)."""
    return PhiSpace(g, np.eye(g.n), norm_kind, kind="table")


def constants_only(g: GroundSet, norm_kind: str = "sup_on_K") -> PhiSpace:
    return PhiSpace(g, np.ones((1, g.n)), norm_kind, kind="table")
