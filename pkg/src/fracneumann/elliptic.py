"""Neumann problems: compatibility, mean-pinned solves, exterior elimination."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import AssembledSystem
from .errors import CompatibilityError, SingularityError

COMPAT_RTOL = 1e-8


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray = field(repr=False)
    compatibility_defect: float
    constraint: float
    residual_norm: float
    multiplier: float


def check_compatibility(F) -> float:
    """Total load ``sum F = int f + int g + alpha int h``; zero iff solvable."""
    return float(np.sum(F))


def default_tolerance(F) -> float:
    return COMPAT_RTOL * max(float(np.sum(np.abs(F))), 1.0)


def omega_mean(sys: AssembledSystem, u) -> float:
    c = sys.M.sum(axis=1)
    return float(c @ u / c.sum())


def _mean_extension(sys: AssembledSystem, u_int: np.ndarray) -> np.ndarray:
    """Full field from interior values, exterior set to the Omega-mean."""
    mesh = sys.mesh
    u = np.empty(sys.n)
    u[mesh.interior] = u_int
    c = sys.M.sum(axis=1)[mesh.interior]
    u[mesh.exterior] = c @ u_int / c.sum()
    return u


def solve(sys: AssembledSystem, F, tol_compat: float | None = None,
          pin: float = 0.0) -> SolveReport:
    """Solve ``A u = F`` with ``int_Omega u = pin |Omega|``.

    The singular symmetric matrix is bordered by the Omega-mass row and
    factorized with a symmetric indefinite (Bunch-Kaufman) solver.  With
    the zero measure the exterior decouples; those nodes then receive the
    Omega-mean of the solution.
    """
    F = np.asarray(F, dtype=float)
    if F.shape != (sys.n,):
        raise ValueError(f"load has shape {F.shape}, expected ({sys.n},)")
    defect = check_compatibility(F)
    tol = default_tolerance(F) if tol_compat is None else tol_compat
    if abs(defect) > tol:
        raise CompatibilityError(defect, tol)
    c = sys.M.sum(axis=1)
    area = c.sum()
    if sys.measure.is_zero:
        idx = sys.mesh.interior
    else:
        idx = np.arange(sys.n)
    A = sys.A[np.ix_(idx, idx)]
    cc = c[idx]
    m = len(idx)
    B = np.zeros((m + 1, m + 1))
    B[:m, :m] = A
    B[:m, m] = cc
    B[m, :m] = cc
    rhs = np.concatenate([F[idx], [pin * area]])
    try:
        sol = sla.solve(B, rhs, assume_a="sym")
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularityError(f"bordered system is singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularityError("non-finite solution")
    if sys.measure.is_zero:
        u = _mean_extension(sys, sol[:m])
    else:
        u = sol[:m]
    # F minus its component along the mass row: the part A can reach
    F_proj = F - (defect / area) * c
    res = float(np.linalg.norm(sys.A @ u - F_proj))
    return SolveReport(u, defect, pin, res, float(sol[m]))


def schur_interior_operator(sys: AssembledSystem):
    """Interior operator after eliminating exterior DOFs under homogeneous data.

    Returns ``(A_tilde, lift)``; ``lift`` maps interior values to exterior
    values.  For the zero measure there is no exterior coupling, so
    ``A_tilde = A_ii`` and the lift is the constant Omega-mean.
    """
    mesh = sys.mesh
    i, e = mesh.interior, mesh.exterior
    A_ii = sys.A[np.ix_(i, i)]
    if sys.measure.is_zero:
        c = sys.M.sum(axis=1)[i]
        lift = np.tile(c / c.sum(), (len(e), 1))
        return A_ii, lift
    A_ie = sys.A[np.ix_(i, e)]
    A_ee = sys.A[np.ix_(e, e)]
    try:
        fac = sla.cho_factor(A_ee)
    except sla.LinAlgError as exc:
        raise SingularityError(f"exterior block not positive definite: {exc}") from exc
    lift = -sla.cho_solve(fac, A_ie.T)
    At = A_ii + A_ie @ lift
    return 0.5 * (At + At.T), lift


def full_field(sys: AssembledSystem, u_int, lift) -> np.ndarray:
    u = np.empty(sys.n)
    u[sys.mesh.interior] = u_int
    u[sys.mesh.exterior] = lift @ u_int
    return u
