"""Generated demonstration instances, each with its canonical checks."""

from __future__ import annotations

import inspect
import itertools
import re
import time

import numpy as np

from . import boundary as bd
from . import points
from . import phi_space as ps
from .errors import UnknownGallery
from .ground import build_ground_set
from .problem import Problem, problem_dict
from .report import Report
from .tasks import Options, run_boundary, run_check

NAMES = ("line3", "square", "truncated_cube", "stadium", "two_point_algebra", "random_polytope")
MAX_CUBE_DIM = 8


def _problem(coords, phi: dict, space, sets=None) -> tuple:
    g = space.ground
    prob = Problem(g, space, sets={k: g.subset(v) for k, v in (sets or {}).items()}, source="gallery")
    return prob, problem_dict(g, phi, sets)


def _absorb(rep: Report, sub: Report, prefix: str) -> None:
    rep.results[prefix] = sub.results
    for c in sub.checks:
        c.name = f"{prefix}.{c.name}"
        rep.checks.append(c)


def _reconstruction(rep: Report, prob: Problem) -> None:
    for mode in ("exposed", "extremal"):
        _absorb(rep, run_check(prob, Options(mode=mode)), f"check_{mode}")


def line3(rep: Report) -> None:
    g = build_ground_set(points=[[0.0], [1.0], [2.0]])
    prob, rep.inputs["problem"] = _problem(g.coords, {"kind": "affine"}, ps.affine(g))
    exp = points.exposed_set(prob.space)
    rep.check("exposed_is_endpoints", list(exp) == [0, 2], exposed=list(exp))
    sh = bd.shilov_boundary(bd.dual_ball(prob.space))
    rep.check("shilov_is_endpoints", list(sh) == [0, 2], shilov=list(sh))
    _reconstruction(rep, prob)


def square(rep: Report) -> None:
    g = build_ground_set(points=[[x, y] for y in (0.0, 1.0, 2.0) for x in (0.0, 1.0, 2.0)])
    prob, rep.inputs["problem"] = _problem(g.coords, {"kind": "affine"}, ps.affine(g))
    exp = points.exposed_set(prob.space)
    rep.check("exposed_are_corners", list(exp) == [0, 2, 6, 8], exposed=list(exp))
    _reconstruction(rep, prob)
    _absorb(rep, run_boundary(prob, Options()), "boundary")


def truncated_cube(rep: Report, n: int = 3) -> None:
    """Vertices of [-1, 1]^n; the weights 2^-j make the all-ones vertex the unique maximizer."""
    if not 1 <= n <= MAX_CUBE_DIM:
        raise UnknownGallery(f"truncated_cube needs 1 <= n <= {MAX_CUBE_DIM}, got {n}")
    rep.inputs["n"] = n
    V = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    g = build_ground_set(points=V)
    prob, rep.inputs["problem"] = _problem(V, {"kind": "affine"}, ps.affine(g))
    exp = points.exposed_set(prob.space)
    rep.check("all_vertices_exposed", len(exp) == 2 ** n, exposed=len(exp))
    weights = 0.5 ** np.arange(n)
    c = np.r_[0.0, weights]
    vals = prob.space.values(c)
    top = int(np.flatnonzero(np.all(V == 1.0, axis=1))[0])
    margin = float(vals[top] - np.max(np.delete(vals, top)))
    rep.results["weighted_functional"] = {"coefficients": c, "vertex": top, "margin": margin,
                                         "expected_margin": 2 * weights[-1]}
    rep.check("weighted_functional_exposes_all_ones", margin > 0, margin=margin)
    rep.check("weighted_margin_value", abs(margin - 2 * weights[-1]) <= 1e-12, 1e-12, margin=margin)


def stadium(rep: Report, n_angles: int = 10_000) -> None:
    r = points.stadium_diagnostic((1.0, 1.0), n_angles, 0.5)
    rep.results["corner"] = {**r.to_dict(), "touching_angles": len(r.touching_angles)}
    rep.check("corner_is_extreme", r.extreme)
    rep.check("corner_not_exposed", not r.exposed, exposing_angles=r.exposing_angles[:10],
              min_touching_diameter=r.min_touching_diameter)
    rep.check("corner_maximizer_diameter_at_least_half", r.min_touching_diameter >= 0.5,
              min_touching_diameter=r.min_touching_diameter)
    cap = points.stadium_diagnostic((2.0, 0.0), n_angles, 0.5)
    rep.results["cap_point"] = {"point": [2.0, 0.0], "exposed": cap.exposed}
    rep.check("cap_point_is_exposed", cap.exposed)


def two_point_algebra(rep: Report) -> None:
    g = build_ground_set(points=[[0.0], [1.0]])
    prob, rep.inputs["problem"] = _problem(g.coords, {"kind": "indicators"}, ps.indicators(g))
    poly = bd.dual_ball(prob.space)
    gens = sorted(tuple(v.vector.coords) for v in poly.generators)
    cross = sorted([(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (-0.0, -1.0)])
    rep.results["generators"] = gens
    rep.check("dual_ball_is_cross_polytope", np.allclose(gens, cross), generators=gens)
    _absorb(rep, run_boundary(prob, Options()), "boundary")
    ws = bd.weakstar_exposed_generators(poly)
    rep.check("all_four_generators_exposed", len(ws.exposed) == 4, exposed=sorted(ws.labels()))


def _hull_vertices_2d(P: np.ndarray) -> list:
    """Monotone chain; strict turns only, so collinear boundary points are dropped."""
    order = sorted(range(len(P)), key=lambda i: (P[i, 0], P[i, 1]))

    def chain(idx):
        out = []
        for i in idx:
            while len(out) >= 2:
                a, b = P[out[-2]], P[out[-1]]
                if (b[0] - a[0]) * (P[i, 1] - a[1]) - (b[1] - a[1]) * (P[i, 0] - a[0]) > 1e-12:
                    break
                out.pop()
            out.append(i)
        return out[:-1]

    return sorted(chain(order) + chain(order[::-1]))


def random_polytope(rep: Report, d: int = 2, n: int = 20, seed: int = 0) -> None:
    if d < 1 or n < 1:
        raise UnknownGallery("random_polytope needs d >= 1 and n >= 1")
    rep.inputs.update(d=d, n=n, seed=seed)
    P = np.random.default_rng(seed).standard_normal((n, d))
    g = build_ground_set(points=P)
    prob, rep.inputs["problem"] = _problem(P, {"kind": "affine"}, ps.affine(g))
    cls = points.compare_point_classes(g.all())
    rep.results["classes"] = cls
    rep.check("exp_equals_aexp_equals_ext", cls.exp == cls.aexp == cls.ext, **cls.to_dict())
    if d == 2:
        hv = _hull_vertices_2d(P)
        rep.check("ext_equals_planar_hull_vertices", list(cls.ext) == hv, classical=hv, ext=list(cls.ext))
    _reconstruction(rep, prob)
    m = points.milman_converse_check(prob.space, cls.ext)
    rep.check("milman_converse", m.passed, outside=m.outside)


_BUILDERS = {
    "line3": line3,
    "square": square,
    "truncated_cube": truncated_cube,
    "stadium": stadium,
    "two_point_algebra": two_point_algebra,
    "random_polytope": random_polytope,
}


def parse_name(text: str) -> tuple:
    """``"truncated_cube(3)"`` -> ``("truncated_cube", [3])``."""
    m = re.fullmatch(r"\s*([a-z_0-9]+)\s*(?:\(([^)]*)\))?\s*", text)
    if not m or m.group(1) not in _BUILDERS:
        raise UnknownGallery(f"unknown gallery instance {text!r}; choose from {', '.join(NAMES)}")
    args = [int(a) for a in m.group(2).split(",") if a.strip()] if m.group(2) else []
    return m.group(1), args


def gallery(name: str, **params) -> Report:
    base, args = parse_name(name)
    rep = Report("gallery", seed=params.get("seed"))
    rep.inputs["name"] = base
    t0 = time.perf_counter()
    build = _BUILDERS[base]
    accepted = inspect.signature(build).parameters
    kwargs = {k: v for k, v in params.items() if v is not None and k in accepted}
    try:
        build(rep, *args, **kwargs)
    except TypeError as e:
        raise UnknownGallery(f"bad parameters for {base}: {e}") from None
    rep.timing = {"seconds": time.perf_counter() - t0}
    return rep
