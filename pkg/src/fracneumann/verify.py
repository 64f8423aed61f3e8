"""Invariant suites run by the ``verify`` command.

Each suite returns ``{"status": "pass" | "fail" | "skipped", ...measured}``.
Random inputs come from one seeded generator, so results are reproducible.
"""
from __future__ import annotations

import math

import numpy as np

from .assembly import AssembledSystem, assemble, assemble_load
from .config import RunConfig, function_preset
from .elliptic import omega_mean, solve
from .errors import CompatibilityError, FinitenessError
from .extension import continuity_probe, extend, minimality_check
from .heat import evolve
from .kernel import KernelContext, c_ns
from .measure import from_atoms
from .mesh import build_mesh
from .perimeter import METHODS, superposed_perimeter
from .spectral import eigenpairs


def build_system(cfg: RunConfig) -> AssembledSystem:
    mesh = build_mesh(cfg.a, cfg.b, cfg.R, cfg.n_interior, cfg.n_collar, cfg.grading)
    return assemble(mesh, cfg.measure, cfg.alpha)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def suite_constants():
    e1 = abs(c_ns(1, 0.5) - 1 / (2 * math.pi))
    e2 = abs(c_ns(1, 0.25) - 2 ** -0.5 / (4 * math.sqrt(math.pi)))
    grid = np.linspace(0.005, 0.995, 100)
    cmin = min(c_ns(N, s) for N in (1, 2, 3) for s in grid)
    return {"status": _status(e1 < 1e-12 and e2 < 1e-12 and cmin > 0),
            "err_c_1_half": e1, "err_c_1_quarter": e2, "min_c_on_grid": cmin}


def suite_structure(sys: AssembledSystem, rng):
    A = sys.A
    nA = float(np.linalg.norm(A, 2))
    ones = np.ones(sys.n)
    kern = float(np.linalg.norm(A @ ones) / nA)
    flux = 0.0
    quad_min = math.inf
    for _ in range(20):
        u = rng.standard_normal(sys.n)
        nu = float(np.linalg.norm(u))
        flux = max(flux, abs(ones @ A @ u) / (nA * nu))
        quad_min = min(quad_min, float(u @ A @ u) / (nA * nu * nu))
    sym = float(np.abs(A - A.T).max() / np.abs(A).max())
    ok = kern <= 1e-10 and flux <= 1e-10 and quad_min >= -1e-12 and sym <= 1e-12
    return {"status": _status(ok), "kernel_residual": kern, "max_flux": flux,
            "min_rayleigh": quad_min, "asymmetry": sym}


def suite_solvability(sys: AssembledSystem, rng):
    mesh = sys.mesh
    F1 = assemble_load(mesh, sys.alpha, f=lambda x: np.ones_like(x))
    try:
        solve(sys, F1)
        rejected, defect = False, float("nan")
    except CompatibilityError as exc:
        rejected, defect = True, float(exc.defect)
    F = rng.standard_normal(sys.n)
    F[mesh.exterior] = 0.0
    c = sys.M.sum(axis=1)
    F -= F.sum() / c.sum() * c
    r0 = solve(sys, F, pin=0.0)
    r1 = solve(sys, F, pin=1.5)
    diff = r1.solution - r0.solution
    spread = float(np.ptp(diff))
    scale = float(np.linalg.norm(sys.A, 2) * np.linalg.norm(r0.solution) + np.linalg.norm(F))
    rel_res = r0.residual_norm / scale
    ok = (rejected and abs(defect - mesh.length) < 1e-12 * mesh.length
          and rel_res <= 1e-9 and spread <= 1e-10 and abs(omega_mean(sys, r0.solution)) <= 1e-10)
    return {"status": _status(ok), "unit_load_defect": defect, "relative_residual": rel_res,
            "pin_difference_spread": spread}


def suite_spectrum(sys: AssembledSystem, k: int):
    k = max(2, min(k, len(sys.mesh.interior)))
    dec = eigenpairs(sys, k)
    i = sys.mesh.interior
    M = sys.M[np.ix_(i, i)]
    ortho = float(np.abs(dec.modes.T @ M @ dec.modes - np.eye(k)).max())
    m1 = dec.modes[:, 0]
    var = float(np.ptp(m1) / np.abs(m1).max())
    lam = dec.lambdas
    ok = lam[1] > 0 and abs(lam[0]) <= 1e-8 * lam[1] and ortho <= 1e-8 and var < 1e-6
    return {"status": _status(ok), "lambdas": lam.tolist(), "orthonormality_error": ortho,
            "mode1_variation": var}


def suite_heat(sys: AssembledSystem, cfg: RunConfig, seed: int):
    u0f = function_preset(cfg.heat_u0, cfg.a, cfg.b, seed)
    x = sys.mesh.nodes[sys.mesh.interior]
    u0 = u0f(x) if u0f is not None else np.zeros_like(x)
    tr = evolve(sys, u0, cfg.heat_dt, cfg.heat_T_end, cfg.heat_scheme)
    # relative to int |u0|, since the mass itself may vanish
    size = float(sys.M.sum(axis=1)[sys.mesh.interior] @ np.abs(u0))
    drift = float(np.abs(tr.mass - tr.mass[0]).max() / max(size, 1e-300))
    e_up = float(np.max(np.diff(tr.energy) - 1e-12 * np.abs(tr.energy[:-1])))
    d_up = float(np.max(np.diff(tr.deviation) - 1e-12 * np.abs(tr.deviation[:-1])))
    ok = drift < 1e-10 and e_up <= 0 and d_up <= 0
    return {"status": _status(ok), "steps": len(tr.times) - 1, "mass_drift": drift,
            "max_energy_increase": max(e_up, 0.0), "max_deviation_increase": max(d_up, 0.0),
            "final_deviation": float(tr.deviation[-1])}


def suite_extension(sys: AssembledSystem, cfg: RunConfig, seed: int):
    if cfg.measure.is_zero:
        return {"status": "skipped", "reason": "no exterior coupling without a measure"}
    ctx = KernelContext(cfg.a, cfg.b)
    u = function_preset(cfg.extend_u0, cfg.a, cfg.b, seed) or (lambda z: np.zeros_like(z))
    probe = extend(u, cfg.extend_points, ctx, cfg.measure)
    zz = np.linspace(cfg.a, cfg.b, 2001)
    uz = u(zz)
    lo, hi = float(uz.min()), float(uz.max())
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    inside = bool(np.all((probe.values >= lo - slack) & (probe.values <= hi + slack)))
    nn = float(np.abs(probe.normalized_neumann).max())
    far = abs(probe.far_limit - probe.interior_mean)
    u_int = u(sys.mesh.nodes[sys.mesh.interior])
    mini = minimality_check(u_int, 20, sys, seed)
    ok = inside and nn <= 1e-8 and far <= 1e-3 and mini.violations == 0
    return {"status": _status(ok), "values": probe.values.tolist(), "max_normalized_neumann": nn,
            "far_limit_gap": far, "minimality_violations": mini.violations,
            "minimality_min_gap": mini.min_gap}


def suite_continuity(cfg: RunConfig, seed: int):
    if cfg.measure.is_zero:
        return {"status": "skipped", "reason": "no exterior coupling without a measure"}
    ctx = KernelContext(cfg.a, cfg.b)
    _, gaps = continuity_probe(lambda z: z, ctx, cfg.measure, J=12)
    tail = gaps[2:]
    ok = bool(np.all(np.diff(tail) < 0)) and gaps[-1] < 1e-2 * cfg.length
    return {"status": _status(ok), "gaps": gaps.tolist()}


def suite_perimeter(cfg: RunConfig):
    m = cfg.measure
    if m.is_zero or not m.support_below(0.5):
        return {"status": "skipped", "reason": "perimeter infinite unless all orders < 1/2"}
    vals = {meth: superposed_perimeter(cfg.a, cfg.b, m, meth).superposed for meth in METHODS}
    ref = vals["analytic"]
    spread = max(abs(v - ref) for v in vals.values()) / ref
    try:
        superposed_perimeter(cfg.a, cfg.b, m + from_atoms([(0.5, 1.0)]), "analytic")
        raised = False
    except FinitenessError:
        raised = True
    return {"status": _status(spread < 1e-6 and raised), "values": vals,
            "relative_spread": spread}


def run_verify(cfg: RunConfig, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    sys = build_system(cfg)
    suites = {
        "constants": suite_constants(),
        "structure": suite_structure(sys, rng),
        "solvability": suite_solvability(sys, rng),
        "spectrum": suite_spectrum(sys, cfg.eigs_k),
        "heat": suite_heat(sys, cfg, seed),
        "extension": suite_extension(sys, cfg, seed),
        "continuity": suite_continuity(cfg, seed),
        "perimeter": suite_perimeter(cfg),
    }
    failed = [k for k, v in suites.items() if v["status"] == "fail"]
    return {"seed": seed, "all_passed": not failed, "failed": failed, "suites": suites}
