"""Task runners shared by the command line and the gallery.

Each runner takes a :class:`~phiconv.problem.Problem` plus :class:`Options`
and returns a :class:`~phiconv.report.Report`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import boundary as bd
from . import hull, points
from . import variational as var
from .errors import ValidationError
from .ground import ExtendedFunction
from .phi_space import separates_points, sup_norm
from .problem import Problem
from .report import Report

TASKS = ("hull", "exposed", "extremal", "compare", "check", "variational", "boundary")


@dataclass
class Options:
    set: Optional[str] = None
    ambient: Optional[str] = None
    mode: str = "exposed"
    tol: float = 1e-9
    seed: int = 0
    samples: int = 1000
    epsilon: float = 1e-3
    budget: int = 1000
    radius: float = 1.0
    c: Optional[list] = None
    h: Optional[list] = None

    @classmethod
    def merged(cls, task: dict, **flags) -> "Options":
        """Problem-file task parameters, overridden by any flag that is not None."""
        vals = {k: v for k, v in task.items()}
        vals.update({k: v for k, v in flags.items() if v is not None})
        return cls(**vals)


def _base(name: str, prob: Problem, opt: Options) -> Report:
    rep = Report(name, seed=opt.seed)
    rep.inputs = {
        "source": prob.source,
        "n_points": prob.ground.n,
        "phi_kind": prob.space.kind,
        "phi_dim": prob.space.m,
        "norm": prob.space.norm_kind,
        "set": opt.set,
    }
    return rep


def run_hull(prob: Problem, opt: Options) -> Report:
    rep = _base("hull", prob, opt)
    sp = prob.space
    A = prob.subset(opt.set)
    amb = prob.subset(opt.ambient)
    H = hull.phi_convex_hull(sp, A, amb)
    certs = [hull.hull_membership(sp, A, x).certificate for x in amb if x not in H]
    rep.results = {"hull": list(H), "certificates": certs}
    rep.check("contains_input", A.issubset(H), missing=sorted(set(A) - set(H)))
    rep.check("idempotent", hull.phi_convex_hull(sp, H, amb) == H)
    bad = [c.point for c in certs if not c.verify(sp, A)]
    rep.check("certificates_verify", not bad, counterexample={"points": bad} if bad else None)
    return rep


def run_exposed(prob: Problem, opt: Options) -> Report:
    rep = _base("exposed", prob, opt)
    K = prob.subset(opt.set)
    wits = points.phi_exposed_points(prob.space, K)
    rep.results = {"exposed": sorted(w.point for w in wits), "witnesses": wits}
    rep.check("nonempty", bool(wits))
    bad = [w.point for w in wits if not w.verify(prob.space, K)]
    rep.check("witnesses_verify", not bad, counterexample={"points": bad} if bad else None)
    return rep


def run_extremal(prob: Problem, opt: Options) -> Report:
    rep = _base("extremal", prob, opt)
    K = prob.subset(opt.set)
    ext = points.phi_extremal_points(prob.space, K)
    exp = points.exposed_set(prob.space, K)
    rep.results = {"extremal": list(ext), "exposed": list(exp)}
    rep.check("nonempty", len(ext) > 0)
    rep.check("exposed_subset_of_extremal", exp.issubset(ext), outside=sorted(set(exp) - set(ext)))
    return rep


def run_compare(prob: Problem, opt: Options) -> Report:
    rep = _base("compare", prob, opt)
    r = points.compare_point_classes(prob.subset(opt.set))
    rep.results = r.to_dict()
    rep.check("exp_aexp_ext_chain", r.chain_holds, **r.to_dict())
    return rep


def run_check(prob: Problem, opt: Options) -> Report:
    rep = _base("check", prob, opt)
    rep.inputs["mode"] = opt.mode
    sp = prob.space
    if opt.mode == "milman":
        m = points.milman_converse_check(sp, prob.subset(opt.set), prob.subset(opt.ambient))
        rep.results = m.to_dict()
        rep.check("extreme_points_in_A", m.passed, counterexample={"outside": m.outside} if not m.passed else None)
        return rep
    if opt.mode not in ("exposed", "extremal"):
        raise ValidationError(f"unknown mode {opt.mode!r}", "task.mode")
    r = points.reconstruction_check(sp, prob.subset(opt.set), prob.subset(opt.ambient), opt.mode)
    rep.results = r.to_dict()
    rep.check(f"{opt.mode}_points_nonempty", len(r.generators) > 0)
    rep.check(f"hull_of_{opt.mode}_points_equals_K", not r.missing and not r.extra,
              counterexample={"missing": r.missing, "extra": r.extra} if (r.missing or r.extra) else None)
    if opt.mode == "exposed":
        ext = points.phi_extremal_points(sp, r.K)
        rep.check("exposed_subset_of_extremal", r.generators.issubset(ext),
                  outside=sorted(set(r.generators) - set(ext)))
    return rep


def _function(prob: Problem, opt: Options) -> ExtendedFunction:
    if prob.f is not None:
        return prob.f
    return ExtendedFunction.indicator(prob.ground, prob.subset(opt.set))


def run_variational(prob: Problem, opt: Options) -> Report:
    rep = _base("variational", prob, opt)
    sp = prob.space
    f = _function(prob, opt)
    c0 = np.zeros(sp.m) if opt.c is None else sp.coeffs(opt.c)
    rep.inputs.update(epsilon=opt.epsilon, budget=opt.budget, radius=opt.radius, samples=opt.samples,
                      c0=c0, f="table" if prob.f is not None else "indicator")
    start = var.well_posedness(sp, f, c0)
    pert = var.exposing_perturbation(sp, f, c0, opt.epsilon, opt.budget, opt.seed)
    stat = var.ill_posed_fraction(sp, f, opt.radius, opt.samples, opt.seed)
    rep.results = {
        "start": start,
        "perturbation": pert,
        "ill_posed_fraction": stat.fraction,
        "ill_posed_samples": len(stat.ill_posed),
    }
    if pert.found:
        c1 = c0 + pert.psi.coeffs
        ok = var.well_posedness(sp, f, c1).well_posed and sp.norm(pert.psi) <= opt.epsilon * (1 + 1e-12)
        rep.check("perturbation_well_posed", ok, 1e-12, norm=sp.norm(pert.psi))
        dirs = np.eye(sp.m) if opt.h is None else [sp.coeffs(opt.h)]
        probes = [var.gateaux_probe(sp, f, c1, h, tol=max(opt.tol, var.FD_TOL)) for h in dirs]
        rep.results["gateaux"] = probes
        bad = [p.to_dict() for p in probes if p.status != "smooth_confirmed"]
        rep.check("derivative_is_dirac", not bad, max(opt.tol, var.FD_TOL), counterexample=bad or None)
    else:
        sep = separates_points(sp, f.domain.tolist())
        # without separation an exhausted search is expected, not a failure
        rep.check("perturbation_found", not sep, note="budget exhausted", separates=bool(sep))

    rng = np.random.default_rng(np.random.SeedSequence(opt.seed).spawn(2)[1])
    pairs = rng.standard_normal((100, 2, sp.m))
    worst_lip, worst_cvx = 0.0, 0.0
    for c1, c2 in pairs:
        a, b = var.conjugate(sp, f, c1), var.conjugate(sp, f, c2)
        worst_lip = max(worst_lip, abs(a - b) - sup_norm(sp, c1 - c2))
        lam = rng.uniform()
        worst_cvx = max(worst_cvx, var.conjugate(sp, f, lam * c1 + (1 - lam) * c2) - lam * a - (1 - lam) * b)
    rep.check("conjugate_1_lipschitz", worst_lip <= 1e-9, 1e-9, worst_excess=worst_lip)
    rep.check("conjugate_convex", worst_cvx <= 1e-9, 1e-9, worst_excess=worst_cvx)
    dev = max(abs(var.sup_norm_via_conjugates(sp, c) - sup_norm(sp, c)) for c in pairs[:, 0])
    rep.check("sup_norm_decomposition", dev <= 1e-9, 1e-9, max_deviation=dev)
    return rep


def run_boundary(prob: Problem, opt: Options) -> Report:
    rep = _base("boundary", prob, opt)
    sp = prob.space
    K = prob.subset(opt.set)
    poly = bd.dual_ball(sp, K)
    flags = bd.vertex_flags(poly)
    ws = bd.weakstar_exposed_generators(poly)
    ch = bd.choquet_boundary(poly)
    exp = points.exposed_set(sp, K)
    hyp = sp.has_constants and bool(separates_points(sp, K))
    rep.results = {
        "generators": [{"sign": g.sign, "point": g.point, "vector": g.vector.coords, "vertex": v}
                       for g, v in zip(poly.generators, flags)],
        "weakstar_exposed": ws.exposed,
        "degenerate": ws.degenerate,
        "choquet": list(ch),
        "exposed": list(exp),
        "hypotheses_hold": hyp,
        "shilov": None,
    }
    rng = np.random.default_rng(opt.seed)
    cs = rng.standard_normal((min(opt.samples, 100), sp.m))
    dev = max(abs(poly.support(c) - sup_norm(sp, c, K)) for c in cs)
    rep.check("support_function_identity", dev <= 1e-9 * max(1.0, float(np.abs(cs).max())), 1e-9,
              max_deviation=dev)
    if not hyp:
        return rep
    sh = bd.shilov_boundary(poly)
    rep.results["shilov"] = list(sh)
    want = {(s, k) for k in exp for s in (1, -1)}
    got = ws.labels()
    rep.check("weakstar_exposed_equals_pm_dirac_of_exposed", got == want,
              counterexample={"only_weakstar": sorted(got - want), "only_exposed": sorted(want - got)}
              if got != want else None)
    rep.check("shilov_equals_choquet_equals_exposed", sh == ch and ch.as_set() == exp.as_set(),
              shilov=list(sh), choquet=list(ch), exposed=list(exp))
    rep.check("shilov_is_norming", bd.is_norming_subset(poly, sh))
    redundant = [k for k in sh if len(sh) > 1 and bd.is_norming_subset(poly, [y for y in sh if y != k])]
    rep.check("shilov_is_minimal", not redundant, counterexample={"removable": redundant} if redundant else None)
    return rep


RUNNERS = {
    "hull": run_hull,
    "exposed": run_exposed,
    "extremal": run_extremal,
    "compare": run_compare,
    "check": run_check,
    "variational": run_variational,
    "boundary": run_boundary,
}


def run(task: str, prob: Problem, opt: Options) -> Report:
    if task not in RUNNERS:
        raise ValidationError(f"unknown task {task!r}", "task")
    t0 = time.perf_counter()
    rep = RUNNERS[task](prob, opt)
    rep.timing = {"seconds": time.perf_counter() - t0}
    return rep
