"""Dense two-phase simplex with Bland's anti-cycling rule.

Small, deterministic, dependency-free apart from numpy.  Every decision
procedure in the package (separation, betweenness, exposure, polytope
membership) goes through :func:`solve`.

Variable bounds default to ``[0, +inf)``; pass ``None`` for a missing bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import IllFormed

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
COST_TOL = 1e-10

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = {"<=": LE, "≤": LE, "=": EQ, "==": EQ, ">=": GE, "≥": GE}


@dataclass
class LinearProgram:
    """maximize ``objective @ x`` subject to row constraints and bounds."""

    objective: np.ndarray
    constraints: List[Tuple[np.ndarray, str, float]] = field(default_factory=list)
    lower: Optional[Sequence[Optional[float]]] = None
    upper: Optional[Sequence[Optional[float]]] = None

    @property
    def n(self) -> int:
        return len(self.objective)

    def add(self, row, relation: str, rhs: float) -> "LinearProgram":
        self.constraints.append((np.asarray(row, dtype=float), relation, float(rhs)))
        return self

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.zeros(self.n) if self.lower is None else np.array(
            [-np.inf if v is None else v for v in self.lower], dtype=float)
        hi = np.full(self.n, np.inf) if self.upper is None else np.array(
            [np.inf if v is None else v for v in self.upper], dtype=float)
        return lo, hi


@dataclass
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    solution: Optional[np.ndarray] = None
    value: Optional[float] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _validate(lp: LinearProgram):
    c = np.asarray(lp.objective, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise IllFormed("objective must be a non-empty vector")
    if not np.all(np.isfinite(c)):
        raise IllFormed("objective has non-finite entries")
    rows, rels, rhs = [], [], []
    for k, (row, rel, b) in enumerate(lp.constraints):
        row = np.asarray(row, dtype=float)
        if row.shape != c.shape:
            raise IllFormed(f"constraint {k} has {row.size} coefficients, expected {c.size}")
        if not (np.all(np.isfinite(row)) and np.isfinite(b)):
            raise IllFormed(f"constraint {k} has non-finite data")
        if rel not in _RELATIONS:
            raise IllFormed(f"constraint {k} has unknown relation {rel!r}")
        rows.append(row)
        rels.append(_RELATIONS[rel])
        rhs.append(float(b))
    lo, hi = lp.bounds()
    if lo.shape != c.shape or hi.shape != c.shape:
        raise IllFormed("bounds must match the number of variables")
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo == np.inf) or np.any(hi == -np.inf):
        raise IllFormed("invalid variable bounds")
    A = np.array(rows).reshape(len(rows), c.size)
    return c, A, rels, np.array(rhs), lo, hi


def solve(lp: LinearProgram) -> LpOutcome:
    c, A, rels, b, lo, hi = _validate(lp)
    n = c.size
    if np.any(lo > hi + FEAS_TOL):
        return LpOutcome("infeasible")

    # x = x0 + D z with z >= 0
    cols, x0 = [], np.zeros(n)
    extra_rows = []  # (column index in z, bound width)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo[j]):
            x0[j] = lo[j]
            cols.append(e)
            if np.isfinite(hi[j]):
                extra_rows.append((len(cols) - 1, hi[j] - lo[j]))
        elif np.isfinite(hi[j]):
            x0[j] = hi[j]
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    D = np.array(cols).T
    nz = D.shape[1]

    A_z = A @ D if A.size else np.zeros((0, nz))
    b_z = b - (A @ x0 if A.size else 0.0)
    rels = list(rels)
    for col, width in extra_rows:
        row = np.zeros(nz)
        row[col] = 1.0
        A_z = np.vstack([A_z, row])
        b_z = np.append(b_z, width)
        rels.append(LE)
    c_z = D.T @ c

    z, status, iters = _two_phase(A_z, rels, b_z, c_z)
    if status != "optimal":
        return LpOutcome(status, iterations=iters)
    x = x0 + D @ z
    x = np.clip(x, lo, hi)
    return LpOutcome("optimal", x, float(c @ x), iters)


def _two_phase(A: np.ndarray, rels: list, b: np.ndarray, c: np.ndarray):
    m, n = A.shape
    A = A.copy()
    b = b.astype(float).copy()
    rels = list(rels)
    for i in range(m):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            rels[i] = {LE: GE, GE: LE, EQ: EQ}[rels[i]]

    n_slack = sum(r != EQ for r in rels)
    n_art = sum(r != LE for r in rels)
    N = n + n_slack + n_art
    T = np.zeros((m + 1, N + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=int)
    s = n
    a = n + n_slack
    art_cols = []
    for i, r in enumerate(rels):
        if r == LE:
            T[i, s] = 1.0
            basis[i] = s
            s += 1
        elif r == GE:
            T[i, s] = -1.0
            s += 1
            T[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1
        else:
            T[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1

    iters = 0
    allowed = np.ones(N, dtype=bool)
    if art_cols:
        # phase 1: maximize -(sum of artificials)
        cost = np.zeros(N)
        cost[art_cols] = -1.0
        _set_objective(T, basis, cost)
        status, k = _iterate(T, basis, allowed)
        iters += k
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.max(np.abs(b)) if m else 1.0):
            return None, "infeasible", iters
        # drive artificials out of the basis
        is_art = np.zeros(N, dtype=bool)
        is_art[art_cols] = True
        keep = np.ones(m + 1, dtype=bool)
        for i in range(m):
            if is_art[basis[i]]:
                cand = np.flatnonzero((np.abs(T[i, :N]) > PIVOT_TOL) & ~is_art)
                if cand.size:
                    _pivot(T, basis, i, cand[0])
                else:
                    keep[i] = False  # redundant row
        T = T[keep]
        basis = basis[keep[:m]]
        allowed = ~is_art
        T[:-1, :N][:, is_art] = 0.0

    cost = np.zeros(N)
    cost[:n] = c
    _set_objective(T, basis, cost)
    status, k = _iterate(T, basis, allowed)
    iters += k
    if status == "unbounded":
        return None, "unbounded", iters
    z = np.zeros(N)
    z[basis] = T[:-1, -1]
    z = _refine(A, b, rels, basis, z, n, n_slack)
    return z[:n], "optimal", iters


def _set_objective(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> None:
    # reduced costs r_j = c_B B^-1 A_j - c_j; optimal (for max) when all r_j >= 0
    cb = cost[basis]
    T[-1, :-1] = cb @ T[:-1, :-1] - cost
    T[-1, -1] = cb @ T[:-1, -1]


def _iterate(T: np.ndarray, basis: np.ndarray, allowed: np.ndarray):
    k = 0
    limit = 50 * (T.shape[0] + T.shape[1]) + 1000
    while k < limit:
        red = T[-1, :-1]
        entering = np.flatnonzero((red < -COST_TOL) & allowed)
        if entering.size == 0:
            return "optimal", k
        j = entering[0]  # Bland: lowest index
        col = T[:-1, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", k
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        i = ties[np.argmin(basis[ties])]  # Bland: lowest basic index leaves
        _pivot(T, basis, i, j)
        k += 1
    raise RuntimeError("simplex iteration limit reached")


def _pivot(T: np.ndarray, basis: np.ndarray, i: int, j: int) -> None:
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])
    basis[i] = j


def _refine(A, b, rels, basis, z, n, n_slack):
    """Recompute basic values from the original columns to shed pivot round-off."""
    m = A.shape[0]
    if m == 0:
        return z
    S = np.zeros((m, n_slack))
    s = 0
    for i, r in enumerate(rels):
        if r != EQ:
            S[i, s] = 1.0 if r == LE else -1.0
            s += 1
    full = np.hstack([A, S])
    nb = [j for j in basis if j < n + n_slack]
    if len(nb) != len(basis):
        return z
    B = full[:, nb]
    try:
        xb = np.linalg.lstsq(B, b, rcond=None)[0]
    except np.linalg.LinAlgError:
        return z
    if np.all(xb >= -FEAS_TOL) and np.allclose(B @ xb, b, atol=FEAS_TOL * 1e-2, rtol=0):
        out = np.zeros_like(z)
        out[nb] = np.maximum(xb, 0.0)
        return out
    return z


def max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest constraint or bound violation of ``x`` (0 when feasible)."""
    worst = 0.0
    for row, rel, b in lp.constraints:
        v = float(np.dot(row, x))
        rel = _RELATIONS[rel]
        if rel == LE:
            worst = max(worst, v - b)
        elif rel == GE:
            worst = max(worst, b - v)
        else:
            worst = max(worst, abs(v - b))
    lo, hi = lp.bounds()
    worst = max(worst, float(np.max(lo - x, initial=0.0)), float(np.max(x - hi, initial=0.0)))
    return worst


def maximize(objective, le=(), ge=(), eq=(), lower=None, upper=None) -> LpOutcome:
    """Convenience wrapper: ``le``/``ge``/``eq`` are ``(A, b)`` pairs or empty."""
    lp = LinearProgram(np.asarray(objective, dtype=float), [], lower, upper)
    for rel, block in ((LE, le), (GE, ge), (EQ, eq)):
        if len(block):
            A, b = block
            for row, rhs in zip(np.atleast_2d(A), np.atleast_1d(b)):
                lp.add(row, rel, rhs)
    return solve(lp)
