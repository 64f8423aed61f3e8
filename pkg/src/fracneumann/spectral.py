"""Neumann eigenpairs and the Poincare constant."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import AssembledSystem, mass_matrix, omega_form
from .elliptic import schur_interior_operator
from .errors import MeasureError
from .measure import SpectralMeasure
from .mesh import DomainMesh


@dataclass(frozen=True)
class EigenDecomposition:
    lambdas: np.ndarray
    modes: np.ndarray = field(repr=False)  # interior values, one column per mode
    lifts: np.ndarray = field(repr=False)  # exterior values, one column per mode

    def full_modes(self, sys: AssembledSystem) -> np.ndarray:
        out = np.empty((sys.n, len(self.lambdas)))
        out[sys.mesh.interior] = self.modes
        out[sys.mesh.exterior] = self.lifts
        return out


def eigenpairs(sys: AssembledSystem, k: int | None = None) -> EigenDecomposition:
    """The k smallest pairs of ``A_tilde u = lambda M u`` on interior DOFs.

    Modes are M-orthonormal; the first is normalized to be positive.
    """
    At, lift = schur_interior_operator(sys)
    i = sys.mesh.interior
    M = sys.M[np.ix_(i, i)]
    n = len(i)
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, {n}]")
    lam, V = sla.eigh(At, M, subset_by_index=[0, k - 1])
    # fix the sign of each mode deterministically
    piv = np.argmax(np.abs(V), axis=0)
    V = V * np.sign(V[piv, np.arange(k)])
    return EigenDecomposition(lam, V, lift @ V)


def poincare_constant(mesh: DomainMesh, m: SpectralMeasure) -> float:
    """``1 / lambda_2(B, M)`` with B the Omega x Omega superposed form."""
    if m.is_zero:
        raise MeasureError("the Poincare constant needs a nontrivial measure")
    B = omega_form(mesh, m)
    i = mesh.interior
    M = mass_matrix(mesh)[np.ix_(i, i)]
    lam = sla.eigh(B[np.ix_(i, i)], M, eigvals_only=True, subset_by_index=[0, 1])
    return float(1.0 / lam[1])
