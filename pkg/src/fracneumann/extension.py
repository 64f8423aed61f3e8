"""Exterior extension E_u / E_1: probes, minimality, continuity, far field."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import AssembledSystem, gagliardo_seminorm_sq
from .elliptic import schur_interior_operator
from .kernel import (KernelContext, MIN_DEPTH, extension_ratio, neumann_residual,
                     superposed_weight)
from .measure import SpectralMeasure

FAR_FACTOR = 100.0
FAR_LEVELS = 4


@dataclass(frozen=True)
class ExtensionProbe:
    sample_points: np.ndarray
    values: np.ndarray
    normalized_neumann: np.ndarray
    far_limit: float
    far_limit_error: float
    interior_mean: float


def nodal_function(nodes, values) -> Callable:
    """Piecewise-linear interpolant of nodal data."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    return lambda x: np.interp(x, nodes, values)


def interior_mean(ctx: KernelContext, u: Callable, panels: int = 64) -> float:
    t, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(ctx.a, ctx.b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    z = (0.5 * (lo + hi) + 0.5 * (hi - lo) * t).ravel()
    wz = (0.5 * (hi - lo) * w).ravel()
    return float(wz @ (np.asarray(u(z), dtype=float) * np.ones_like(z)) / ctx.length)


def normalized_neumann(ctx: KernelContext, m: SpectralMeasure, u: Callable, x,
                       min_depth: int = MIN_DEPTH):
    """``int N_s u dmu / int w_{s,Omega} dmu`` at exterior points.

    The denominator is the closed-form kernel mass, so for any u this
    equals ``u(x) - extension(x)`` only up to the quadrature error of the
    numerator; that makes the identity a genuine accuracy check.
    """
    return neumann_residual(ctx, m, u, x, min_depth) / superposed_weight(ctx, m, x)


def _neville_at_zero(t, y):
    """Value at t=0 of the interpolating polynomial through (t_j, y_j)."""
    p = list(map(float, y))
    t = list(map(float, t))
    n = len(t)
    prev = None
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (t[i] * p[i + 1] - t[i + k] * p[i]) / (t[i] - t[i + k])
        if k == n - 2:
            prev = p[0]
    return p[0], abs(p[0] - prev) if prev is not None else float("nan")


def far_field_limit(ctx: KernelContext, m: SpectralMeasure, u: Callable,
                    levels: int = FAR_LEVELS):
    """Limit of the extension as x -> +inf, from samples starting at b + 100|Omega|.

    The extension tends to the interior mean at rate 1/x, so the samples
    ``x_j = b + 100 |Omega| 2^j`` are extrapolated polynomially in 1/x.
    Returns ``(limit, error estimate)``.
    """
    xs = ctx.b + FAR_FACTOR * ctx.length * 2.0 ** np.arange(levels)
    vals = extension_ratio(ctx, m, u, xs)
    return _neville_at_zero(1.0 / xs, vals)


def extend(u0, points, ctx: KernelContext, m: SpectralMeasure) -> ExtensionProbe:
    """Extension values and normalized Neumann residual at exterior points.

    ``u0`` is a callable on Omega or a ``(nodes, values)`` pair.
    """
    u = nodal_function(*u0) if isinstance(u0, tuple) else u0
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    vals = extension_ratio(ctx, m, u, pts)
    out = dict(zip(pts.tolist(), vals.tolist()))

    def extended(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= ctx.a) & (x <= ctx.b)
        res = np.empty_like(x)
        res[inside] = np.asarray(u(x[inside]), dtype=float) * np.ones(inside.sum())
        res[~inside] = [out[xi] for xi in x[~inside].tolist()]
        return res

    nn = normalized_neumann(ctx, m, extended, pts)
    lim, err = far_field_limit(ctx, m, u)
    return ExtensionProbe(pts, vals, nn, lim, err, interior_mean(ctx, u))


def probe_csv(p: ExtensionProbe) -> str:
    lines = ["x,value,normalized_neumann"]
    for row in zip(p.sample_points, p.values, p.normalized_neumann):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MinimalityReport:
    trials: int
    violations: int
    min_gap: float
    tolerance: float
    energy_extension: float
    energy_schur_lift: float
    field: np.ndarray = field(repr=False)


def extension_field(sys: AssembledSystem, u_int) -> np.ndarray:
    """Interior values ``u_int`` with exterior nodes set by the continuum extension."""
    mesh = sys.mesh
    ctx = KernelContext(mesh.a, mesh.b)
    u_int = np.asarray(u_int, dtype=float)
    inner = mesh.nodes[mesh.interior]
    ext_vals = extension_ratio(ctx, sys.measure, nodal_function(inner, u_int),
                               mesh.nodes[mesh.exterior])
    u = np.empty(sys.n)
    u[mesh.interior] = u_int
    u[mesh.exterior] = ext_vals
    return u


def minimality_check(u_int, trials: int, sys: AssembledSystem, seed: int = 0) -> MinimalityReport:
    """Random exterior perturbations of the extension never lower the energy."""
    if trials < 1:
        raise ValueError("need at least one trial")
    u = extension_field(sys, u_int)
    mesh = sys.mesh
    e = mesh.exterior
    base = gagliardo_seminorm_sq(sys, u)
    span = float(np.ptp(u_int))
    scale = span if span > 0 else 1.0
    tol = 1e-8 * max(base, scale ** 2 * float(np.abs(sys.A).max()))
    rng = np.random.default_rng(seed)
    gaps = []
    for _ in range(trials):
        phi = np.zeros(sys.n)
        phi[e] = scale * rng.standard_normal(len(e))
        gaps.append(gagliardo_seminorm_sq(sys, u + phi) - base)
    gaps = np.array(gaps)
    _, lift = schur_interior_operator(sys)
    v = u.copy()
    v[e] = lift @ np.asarray(u_int, dtype=float)
    return MinimalityReport(trials, int(np.sum(gaps < -tol)), float(gaps.min()), tol,
                            base, gagliardo_seminorm_sq(sys, v), u)


def continuity_probe(u0: Callable, ctx: KernelContext, m: SpectralMeasure, J: int = 12):
    """Gaps ``|extension(b + |Omega| 2^-j) - u0(b)|`` for j = 1..J.

    Quadrature depth grows with j so the ratio stays resolved near the boundary.
    """
    ub = float(np.asarray(u0(np.array([ctx.b])), dtype=float).ravel()[0])
    js = np.arange(1, J + 1)
    xs = ctx.b + ctx.length * 2.0 ** (-js.astype(float))
    gaps = np.array([abs(extension_ratio(ctx, m, u0, x, min_depth=MIN_DEPTH + j) - ub)
                     for x, j in zip(xs, js)])
    return xs, gaps
