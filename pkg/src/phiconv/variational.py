"""Conjugate transform, well-posedness and exposing perturbations.

For f: K -> R u {+inf} the conjugate ``f^x(c) = max_x phi_c(x) - f(x)`` is a
convex, 1-Lipschitz (for the sup norm) function of the coefficients.  It is
differentiable at c exactly when ``f - phi_c`` has a unique minimizer x^,
and then its derivative is the Dirac pairing ``h -> h(x^)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import EmptySet, ImproperFunction
from .ground import ExtendedFunction
from .hull import STRICT_TOL, max_margin
from .phi_space import PhiSpace, PhiVector

GAP_TOL = 1e-9
DEFAULT_STEPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
FD_TOL = 1e-6


def _check(space: PhiSpace, f: ExtendedFunction) -> None:
    if not isinstance(f, ExtendedFunction):
        raise ImproperFunction("expected an ExtendedFunction")
    if f.parent is not space.ground:
        raise ImproperFunction("function lives on a different ground set")
    if not f.finite_mask.any():
        raise ImproperFunction("function has empty domain")


def _objective(space: PhiSpace, f: ExtendedFunction, c) -> np.ndarray:
    """phi_c(x) - f(x) on the domain of f, -inf elsewhere."""
    vals = space.values(c) - f.values
    return np.where(f.finite_mask, vals, -np.inf)


def conjugate(space: PhiSpace, f: ExtendedFunction, c) -> float:
    _check(space, f)
    return float(np.max(_objective(space, f, c)))


def argmax_set(space: PhiSpace, f: ExtendedFunction, c, tol: float = GAP_TOL) -> List[int]:
    _check(space, f)
    obj = _objective(space, f, c)
    return np.flatnonzero(obj >= obj.max() - tol).tolist()


@dataclass(frozen=True)
class WellPosednessReport:
    perturbation: PhiVector
    minimizers: tuple
    gap: float
    value: float

    @property
    def well_posed(self) -> bool:
        return len(self.minimizers) == 1

    @property
    def minimizer(self) -> Optional[int]:
        return self.minimizers[0] if self.well_posed else None

    def to_dict(self) -> dict:
        return {
            "perturbation": self.perturbation.coeffs.tolist(),
            "minimizers": list(self.minimizers),
            "gap": None if math.isinf(self.gap) else self.gap,
            "value": self.value,
            "well_posed": self.well_posed,
        }


def well_posedness(space: PhiSpace, f: ExtendedFunction, c) -> WellPosednessReport:
    """Minimizers of f - phi_c and the gap between the two lowest values.

    On a finite set strict and strong minima coincide, so ``well_posed``
    just means a unique minimizer (gap above 1e-9).
    """
    _check(space, f)
    c = space.coeffs(c)
    dom = f.domain
    vals = (f.values - space.values(c))[dom]
    order = np.argsort(vals, kind="stable")
    low = vals[order[0]]
    gap = float(vals[order[1]] - low) if vals.size > 1 else math.inf
    mins = tuple(int(dom[i]) for i in np.flatnonzero(vals - low <= GAP_TOL))
    return WellPosednessReport(PhiVector(c), mins, gap, float(low))


# --- sampling -------------------------------------------------------------------------

def _row_space_projector(space: PhiSpace) -> np.ndarray:
    # coefficient directions in ker(M^T) do not change phi_c
    U, s, _ = np.linalg.svd(space.eval_matrix, full_matrices=False)
    U = U[:, s > 1e-9 * max(1.0, s[0])]
    return U @ U.T


def sample_sphere(space: PhiSpace, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` coefficient vectors with ||c||_Phi = 1.

    l2: normalized gaussians (uniform on the sphere).  l1 / sup: uniform
    draws from the coefficient box rescaled radially; an absolutely
    continuous law on the sphere, not the uniform one.
    """
    m = space.m
    if space.norm_kind == "coeff_l2":
        raw = rng.standard_normal((size, m))
    else:
        raw = rng.uniform(-1.0, 1.0, (size, m))
    if space.norm_kind == "sup_on_K":
        raw = raw @ _row_space_projector(space)
    out = np.empty_like(raw)
    for i, c in enumerate(raw):
        nrm = space.norm(c)
        while nrm <= 1e-12:
            c = rng.uniform(-1.0, 1.0, m)
            if space.norm_kind == "sup_on_K":
                c = _row_space_projector(space) @ c
            nrm = space.norm(c)
        out[i] = c / nrm
    return out


def sample_ball(space: PhiSpace, rng: np.random.Generator, size: int, radius: float) -> np.ndarray:
    """Coefficient vectors in the ||.||_Phi ball: radius * U^(1/m) along sphere directions."""
    dirs = sample_sphere(space, rng, size)
    r = radius * rng.uniform(0.0, 1.0, size) ** (1.0 / space.m)
    return dirs * r[:, None]


# --- exposing perturbations -----------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationResult:
    found: bool
    psi: Optional[PhiVector]
    report: Optional[WellPosednessReport]
    strategy: str
    trials: int

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "psi": None if self.psi is None else self.psi.coeffs.tolist(),
            "report": None if self.report is None else self.report.to_dict(),
            "strategy": self.strategy,
            "trials": self.trials,
        }


def _bump_directions(space: PhiSpace, f: ExtendedFunction, c0: np.ndarray, x0: int, ties) -> list:
    """Candidate unit directions that favour x0 among the tied minimizers."""
    dirs = []
    g = space.ground
    # least-squares projection of the distance bump -d(., x0) onto the span
    bump = -g.dist[:, x0]
    coef, *_ = np.linalg.lstsq(space.eval_matrix.T, bump, rcond=None)
    for d in (coef, -coef):
        if space.norm(d) > 1e-12:
            dirs.append(("distance_bump", d / space.norm(d)))
    # a direction exposing x0 inside the tied set
    others = [y for y in ties if y != x0]
    if others:
        t, c = max_margin(space, x0, others)
        if t > STRICT_TOL and space.norm(c) > 1e-12:
            dirs.append(("tie_exposure", c / space.norm(c)))
    return dirs


def exposing_perturbation(space: PhiSpace, f: ExtendedFunction, c0, epsilon: float,
                          budget: int = 1000, seed: int = 0, halvings: int = 40) -> PerturbationResult:
    """Find psi with ||psi||_Phi <= epsilon such that f - phi_(c0+psi) has a strict minimum.

    Deterministic tie-breaking comes first: for each tied minimizer x0, try
    the projected distance bump at x0 and an LP direction exposing x0 within
    the tie, at scales epsilon, epsilon/2, ...  Then up to ``budget`` seeded
    random directions on the norm sphere, at the same scales.
    """
    _check(space, f)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c0 = space.coeffs(c0)
    rep = well_posedness(space, f, c0)
    if rep.well_posed:
        return PerturbationResult(True, PhiVector(np.zeros(space.m)), rep, "already_well_posed", 0)

    scales = [epsilon * 0.5 ** k for k in range(halvings)]
    trials = 0

    def attempt(direction):
        nonlocal trials
        for s in scales:
            psi = s * direction
            if space.norm(psi) > epsilon * (1 + 1e-12):
                continue
            trials += 1
            r = well_posedness(space, f, c0 + psi)
            if r.well_posed:
                return psi, r
        return None

    for x0 in rep.minimizers:
        for name, d in _bump_directions(space, f, c0, x0, rep.minimizers):
            hit = attempt(d)
            if hit:
                return PerturbationResult(True, PhiVector(hit[0]), hit[1], name, trials)

    rng = np.random.default_rng(seed)
    for d in sample_sphere(space, rng, budget):
        hit = attempt(d)
        if hit:
            return PerturbationResult(True, PhiVector(hit[0]), hit[1], "random", trials)
    return PerturbationResult(False, None, None, "exhausted", trials)


# --- ill-posed set ----------------------------------------------------------------------------

@dataclass
class IllPosedStatistic:
    fraction: float
    n_samples: int
    radius: float
    seed: int
    ill_posed: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "n_samples": self.n_samples,
            "radius": self.radius,
            "seed": self.seed,
            "ill_posed": [c.tolist() for c in self.ill_posed],
        }


def ill_posed_fraction(space: PhiSpace, f: ExtendedFunction, radius: float, n_samples: int,
                       seed: int = 0, chunk: int = 256) -> IllPosedStatistic:
    """Fraction of sampled c in the radius ball for which f - phi_c has no strict minimum.

    Chunks draw from independent child streams of one SeedSequence, so the
    aggregate does not depend on how chunks are scheduled.
    """
    _check(space, f)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    children = np.random.SeedSequence(seed).spawn(-(-n_samples // chunk))
    bad = []
    done = 0
    for child in children:
        size = min(chunk, n_samples - done)
        for c in sample_ball(space, np.random.default_rng(child), size, radius):
            if not well_posedness(space, f, c).well_posed:
                bad.append(c)
        done += size
    return IllPosedStatistic(len(bad) / n_samples, n_samples, radius, seed, bad)


# --- Gateaux probes ---------------------------------------------------------------------------

@dataclass
class GateauxReport:
    status: str  # smooth_confirmed | smooth_mismatch | nonsmooth_confirmed | nonsmooth_undetected
    direction: list
    steps: list
    forward: list
    backward: list
    expected: Optional[float]
    minimizers: list
    tolerance: float

    @property
    def disagreement(self) -> float:
        return abs(self.forward[-1] - self.backward[-1])

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "direction": self.direction,
            "steps": self.steps,
            "forward": self.forward,
            "backward": self.backward,
            "expected": self.expected,
            "minimizers": self.minimizers,
            "tolerance": self.tolerance,
            "disagreement": self.disagreement,
        }


def gateaux_probe(space: PhiSpace, f: ExtendedFunction, c, h, steps: Sequence[float] = DEFAULT_STEPS,
                  tol: float = FD_TOL) -> GateauxReport:
    """One-sided difference quotients of the conjugate at c along h.

    Well-posed c: the forward quotient at the smallest step must match
    h(x^) within ``tol * (1 + |h(x^)|)``.  Ill-posed c: forward and
    backward quotients are compared, and a disagreement of at least
    ten times the tolerance confirms the kink.
    """
    _check(space, f)
    c = space.coeffs(c)
    h = space.coeffs(h)
    base = conjugate(space, f, c)
    fwd = [(conjugate(space, f, c + t * h) - base) / t for t in steps]
    bwd = [(base - conjugate(space, f, c - t * h)) / t for t in steps]
    rep = well_posedness(space, f, c)
    if rep.well_posed:
        expected = float(h @ space.eval_matrix[:, rep.minimizer])
        bound = tol * (1 + abs(expected))
        status = "smooth_confirmed" if abs(fwd[-1] - expected) <= bound else "smooth_mismatch"
    else:
        expected = None
        bound = tol * (1 + abs(fwd[-1]))
        status = "nonsmooth_confirmed" if abs(fwd[-1] - bwd[-1]) >= 10 * bound else "nonsmooth_undetected"
    return GateauxReport(status, h.tolist(), list(steps), fwd, bwd, expected, list(rep.minimizers), tol)


def directional_derivative(space: PhiSpace, f: ExtendedFunction, c, h, tol: float = GAP_TOL) -> float:
    """Exact one-sided derivative of the conjugate: max of h over the active set."""
    act = argmax_set(space, f, c, tol)
    return float(np.max(space.coeffs(h) @ space.eval_matrix[:, act]))


# --- the max rule -----------------------------------------------------------------------------

@dataclass
class MaxRuleReport:
    differentiable: bool
    active: list
    derivative: Optional[list]
    agrees_with: list
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _fd_gradient(F, c: np.ndarray, dirs: np.ndarray, t: float):
    base = F(c)
    fwd = np.array([(F(c + t * d) - base) / t for d in dirs])
    bwd = np.array([(base - F(c - t * d)) / t for d in dirs])
    return fwd, bwd


def max_rule_check(space: PhiSpace, f1: ExtendedFunction, f2: ExtendedFunction, c, directions=None,
                   step: float = 1e-6, tol: float = FD_TOL) -> MaxRuleReport:
    """If L = max(f1^x, f2^x) is differentiable at c, its derivative is that of an active piece."""
    c = space.coeffs(c)
    dirs = np.eye(space.m) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))
    H = lambda z: conjugate(space, f1, z)
    G = lambda z: conjugate(space, f2, z)
    L = lambda z: max(H(z), G(z))
    lf, lb = _fd_gradient(L, c, dirs, step)
    scale = tol * (1 + np.abs(lf))
    if np.any(np.abs(lf - lb) > scale):
        return MaxRuleReport(False, [], None, [], True)
    lv = L(c)
    active = [name for name, F in (("f1", H), ("f2", G)) if F(c) >= lv - 1e-12 * max(1.0, abs(lv))]
    agrees = []
    for name in active:
        F = H if name == "f1" else G
        ff, fb = _fd_gradient(F, c, dirs, step)
        if np.all(np.abs(ff - fb) <= scale) and np.all(np.abs(ff - lf) <= scale):
            agrees.append(name)
    return MaxRuleReport(True, active, lf.tolist(), agrees, bool(agrees))


def sup_norm_via_conjugates(space: PhiSpace, c) -> float:
    """max(0^x(c), 0^x(-c)) where 0^x is the conjugate of the zero function."""
    zero = ExtendedFunction.zero(space.ground)
    c = space.coeffs(c)
    return max(conjugate(space, zero, c), conjugate(space, zero, -c))


# --- support functions and inf-convolution ------------------------------------------------------

def support_function(C, x) -> float:
    """sigma_C(x) = max over the rows q of C of <q, x>."""
    C = np.atleast_2d(np.asarray([getattr(q, "coords", q) for q in C], dtype=float))
    if C.size == 0:
        raise EmptySet("support function of an empty set")
    x = np.asarray(x, dtype=float).ravel()
    if C.shape[1] != x.size:
        raise ValueError(f"dual vectors have dimension {C.shape[1]}, point has {x.size}")
    return float(np.max(C @ x))


def _grid_lookup(coords: np.ndarray, decimals: int = 9) -> dict:
    return {tuple(np.round(p, decimals) + 0.0): i for i, p in enumerate(coords)}


def inf_convolution_terms(f: ExtendedFunction, C, x: int) -> np.ndarray:
    """f(x - y) + sigma_C(y) for every grid point y (+inf when x - y is off grid or outside dom f)."""
    g = f.parent
    coords = g.require_coords()
    x = g.check_id(x)
    Cm = np.atleast_2d(np.asarray([getattr(q, "coords", q) for q in C], dtype=float))
    if Cm.size == 0:
        raise EmptySet("inf-convolution with the support function of an empty set")
    lookup = _grid_lookup(coords)
    out = np.full(g.n, np.inf)
    for j in range(g.n):
        k = lookup.get(tuple(np.round(coords[x] - coords[j], 9) + 0.0))
        if k is not None and f.finite_mask[k]:
            out[j] = f.values[k] + float(np.max(Cm @ coords[j]))
    return out


def inf_convolution(f: ExtendedFunction, C, x: int) -> float:
    """min over grid points y of f(x - y) + sigma_C(y)."""
    if not f.finite_mask.any():
        raise ImproperFunction("function has empty domain")
    return float(np.min(inf_convolution_terms(f, C, x)))


def inf_convolution_minimizers(f: ExtendedFunction, C, x: int, tol: float = GAP_TOL) -> list:
    terms = inf_convolution_terms(f, C, x)
    best = terms.min()
    if not np.isfinite(best):
        return []
    return np.flatnonzero(terms <= best + tol).tolist()
