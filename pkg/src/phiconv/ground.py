"""Finite metric spaces, point subsets and extended real-valued functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ImproperFunction, MetricViolation, MissingCoords, NotSubset, UnknownPoint

METRIC_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GroundSet:
    """A finite metric space with points ``0..n-1``.

    ``coords`` is an ``(n, d)`` array when the points live in R^d, else None.
    ``dist`` always holds the full distance matrix.
    """

    dist: np.ndarray
    coords: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def ids(self) -> range:
        return range(self.n)

    @property
    def dim(self) -> Optional[int]:
        return None if self.coords is None else self.coords.shape[1]

    def check_id(self, k) -> int:
        if isinstance(k, (bool, np.bool_)) or not isinstance(k, (int, np.integer)):
            raise UnknownPoint(f"point id must be an integer, got {k!r}")
        if not 0 <= k < self.n:
            raise UnknownPoint(f"point {k} not in ground set of size {self.n}")
        return int(k)

    def require_coords(self) -> np.ndarray:
        if self.coords is None:
            raise MissingCoords("operation needs point coordinates")
        return self.coords

    def subset(self, members: Iterable[int]) -> "PointSubset":
        return PointSubset.of(self, members)

    def all(self) -> "PointSubset":
        return PointSubset(self, tuple(range(self.n)))

    def to_dict(self) -> dict:
        d: dict = {"metric": self.dist.tolist()}
        if self.coords is not None:
            d["points"] = self.coords.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GroundSet":
        return build_ground_set(d.get("points"), d.get("metric"))


def _check_metric(D: np.ndarray, tol: float = METRIC_TOL) -> None:
    n = D.shape[0]
    if D.ndim != 2 or D.shape != (n, n):
        raise MetricViolation(f"distance matrix must be square, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise MetricViolation("distance matrix has non-finite entries")
    if np.any(D < 0):
        i, j = np.argwhere(D < 0)[0]
        raise MetricViolation(f"negative distance d({i},{j})={D[i, j]}")
    asym = np.abs(D - D.T)
    if np.any(asym > tol):
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise MetricViolation(f"asymmetric distance: d({i},{j})={D[i, j]} but d({j},{i})={D[j, i]}")
    if np.any(np.abs(np.diag(D)) > tol):
        i = int(np.argmax(np.abs(np.diag(D))))
        raise MetricViolation(f"nonzero self-distance d({i},{i})={D[i, i]}")
    coincident = (D <= tol) & ~np.eye(n, dtype=bool)
    if np.any(coincident):
        i, j = np.argwhere(coincident)[0]
        raise MetricViolation(f"distinct points {i},{j} at distance {D[i, j]}")
    # d(i,j) <= d(i,k) + d(k,j) for every k, checked one k at a time to bound memory
    for k in range(n):
        excess = D - (D[:, k][:, None] + D[k, :][None, :])
        if np.any(excess > tol):
            i, j = np.unravel_index(np.argmax(excess), excess.shape)
            raise MetricViolation(
                f"triangle inequality fails: d({i},{j})={D[i, j]} > d({i},{k})+d({k},{j})"
            )


def build_ground_set(points=None, metric=None) -> GroundSet:
    """Build and validate a ground set.

    Pass ``points`` (coordinates, euclidean metric), ``metric`` (explicit
    distance matrix), or both when they agree within 1e-9.
    """
    if points is None and metric is None:
        raise MissingCoords("ground set needs points or an explicit metric")
    coords = None
    if points is not None:
        coords = np.array(points, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] < 1:
            raise MetricViolation(f"points must be an (n, d) array, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise MetricViolation("coordinates must be finite")
    if metric is not None:
        D = np.array(metric, dtype=float)
        if D.ndim != 2 or D.shape[0] < 1:
            raise MetricViolation(f"metric must be an (n, n) matrix, got shape {D.shape}")
        if coords is not None:
            if D.shape[0] != coords.shape[0]:
                raise MetricViolation("points and metric disagree on the number of points")
            E = euclidean_matrix(coords)
            if D.shape != E.shape or np.any(np.abs(D - E) > METRIC_TOL):
                raise MetricViolation("explicit metric is inconsistent with euclidean coordinates")
    else:
        D = euclidean_matrix(coords)
    _check_metric(D)
    return GroundSet(_frozen(D), None if coords is None else _frozen(coords))


def euclidean_matrix(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True, eq=False)
class PointSubset:
    """A subset of a ground set, iterated in ascending id order."""

    parent: GroundSet
    members: tuple

    @classmethod
    def of(cls, parent: GroundSet, members: Iterable[int]) -> "PointSubset":
        ids = sorted({parent.check_id(k) for k in members})
        return cls(parent, tuple(ids))

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, k) -> bool:
        return k in self.members

    def __eq__(self, other) -> bool:
        if isinstance(other, PointSubset):
            return self.parent is other.parent and self.members == other.members
        return NotImplemented

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        return f"PointSubset({list(self.members)})"

    def as_set(self) -> frozenset:
        return frozenset(self.members)

    def issubset(self, other: "PointSubset") -> bool:
        return set(self.members) <= set(other.members)

    @property
    def index(self) -> np.ndarray:
        return np.array(self.members, dtype=int)


def as_subset(g: GroundSet, A) -> PointSubset:
    """Coerce ``A`` (a PointSubset or an iterable of ids) to a PointSubset of ``g``."""
    if A is None:
        return g.all()
    if isinstance(A, PointSubset):
        if A.parent is not g:
            raise NotSubset("subset belongs to a different ground set")
        return A
    return PointSubset.of(g, A)


@dataclass(frozen=True, eq=False)
class ExtendedFunction:
    """f: K -> R u {+inf}; +inf is marked by ``finite_mask == False``."""

    parent: GroundSet
    values: np.ndarray
    finite_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        mask = np.isfinite(vals) if self.finite_mask is None else np.array(self.finite_mask, dtype=bool)
        if vals.shape != (self.parent.n,) or mask.shape != (self.parent.n,):
            raise ImproperFunction(
                f"function table needs {self.parent.n} entries, got {vals.shape[0] if vals.ndim else 0}"
            )
        if np.any(mask & ~np.isfinite(vals)):
            raise ImproperFunction("finite entries must hold finite numbers")
        if not mask.any():
            raise ImproperFunction("function has empty domain (no finite value)")
        vals = np.where(mask, vals, 0.0)
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "finite_mask", _frozen(mask))

    @property
    def domain(self) -> np.ndarray:
        return np.flatnonzero(self.finite_mask)

    def __call__(self, k: int) -> float:
        k = self.parent.check_id(k)
        return float(self.values[k]) if self.finite_mask[k] else float("inf")

    def as_array(self) -> np.ndarray:
        """Values with +inf written out (for display; arithmetic uses the mask)."""
        return np.where(self.finite_mask, self.values, np.inf)

    @classmethod
    def from_table(cls, g: GroundSet, values: Sequence[float], infinite: Iterable[int] = ()) -> "ExtendedFunction":
        mask = np.ones(g.n, dtype=bool)
        for k in infinite:
            mask[g.check_id(k)] = False
        vals = np.array(values, dtype=float)
        if vals.shape != (g.n,):
            raise ImproperFunction(f"expected {g.n} values, got {vals.size}")
        return cls(g, np.where(mask, vals, 0.0), mask)

    @classmethod
    def zero(cls, g: GroundSet) -> "ExtendedFunction":
        return cls(g, np.zeros(g.n), np.ones(g.n, dtype=bool))

    @classmethod
    def indicator(cls, g: GroundSet, K) -> "ExtendedFunction":
        """0 on K, +inf elsewhere."""
        K = as_subset(g, K)
        mask = np.zeros(g.n, dtype=bool)
        mask[K.index] = True
        return cls(g, np.zeros(g.n), mask)


def distance_function(g: GroundSet, k: int) -> ExtendedFunction:
    """x -> -d(x, k); attains its strict maximum 0 exactly at k."""
    k = g.check_id(k)
    return ExtendedFunction(g, -g.dist[:, k].copy(), np.ones(g.n, dtype=bool))
