"""1D geometry: the interval, a truncated exterior collar, P1 hat functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeshError

INTERIOR = "interior"
EXTERIOR = "exterior"
GRADINGS = ("uniform", "boundary-graded")
GRADING_RATIO = 1.2


@dataclass(frozen=True)
class DomainMesh:
    """Nodes on ``[a - R, b + R]`` with ``a`` and ``b`` among them.

    Elements are consecutive node pairs; none straddles the boundary.
    Nodes in the closed interval ``[a, b]`` are interior DOFs.
    """
    a: float
    b: float
    R: float
    nodes: np.ndarray = field(repr=False)
    grading: str = "uniform"

    def __post_init__(self):
        x = self.nodes
        if np.any(np.diff(x) <= 0):
            raise MeshError("nodes must be strictly increasing")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def elements(self) -> np.ndarray:
        n = self.n_nodes
        return np.column_stack([np.arange(n - 1), np.arange(1, n)])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def interior_mask(self) -> np.ndarray:
        return (self.nodes >= self.a) & (self.nodes <= self.b)

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(self.interior_mask)

    @property
    def exterior(self) -> np.ndarray:
        return np.flatnonzero(~self.interior_mask)

    @property
    def ia(self) -> int:
        return int(self.interior[0])

    @property
    def ib(self) -> int:
        return int(self.interior[-1])

    @property
    def element_in_omega(self) -> np.ndarray:
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        return (mids > self.a) & (mids < self.b)

    def dof_class(self) -> list[str]:
        return [INTERIOR if m else EXTERIOR for m in self.interior_mask]

    def hat_values(self, x) -> np.ndarray:
        """Matrix ``H[p, i] = phi_i(x_p)`` for points inside the mesh span."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        nodes = self.nodes
        if np.any((x < nodes[0]) | (x > nodes[-1])):
            raise MeshError("evaluation point outside the mesh span")
        k = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, self.n_nodes - 2)
        t = (x - nodes[k]) / (nodes[k + 1] - nodes[k])
        H = np.zeros((len(x), self.n_nodes))
        rows = np.arange(len(x))
        H[rows, k] = 1.0 - t
        H[rows, k + 1] += t
        return H

    def interpolate(self, u: np.ndarray, x) -> np.ndarray:
        return np.interp(x, self.nodes, u)


def _collar_offsets(R: float, n: int, grading: str) -> np.ndarray:
    """Distances from the boundary of the collar nodes, ascending, excluding 0."""
    if grading == "uniform":
        return R * np.arange(1, n + 1) / n
    h0 = R * (GRADING_RATIO - 1.0) / (GRADING_RATIO ** n - 1.0)
    steps = h0 * GRADING_RATIO ** np.arange(n)
    offs = np.cumsum(steps)
    offs[-1] = R
    return offs


def build_mesh(a: float, b: float, R: float | None = None, n_interior: int = 16,
               n_collar: int = 16, grading: str = "uniform") -> DomainMesh:
    """Uniform mesh of ``[a, b]`` plus a collar of width R on each side.

    With ``grading="boundary-graded"`` collar element widths grow by a
    factor 1.2 away from the interval.
    """
    if R is None:
        R = 10.0 * (b - a)
    vals = (a, b, R)
    if not all(math.isfinite(v) for v in vals):
        raise MeshError("mesh parameters must be finite")
    if not b > a:
        raise MeshError(f"need a < b, got ({a}, {b})")
    if R < b - a:
        raise MeshError(f"collar R={R} thinner than the interval length {b - a}")
    if int(n_interior) != n_interior or int(n_collar) != n_collar:
        raise MeshError("element counts must be integers")
    if n_interior < 4 or n_collar < 4:
        raise MeshError("need at least 4 elements in the interval and in each collar")
    if grading not in GRADINGS:
        raise MeshError(f"unknown grading {grading!r}")
    n_interior, n_collar = int(n_interior), int(n_collar)
    inner = a + (b - a) * np.arange(n_interior + 1) / n_interior
    inner[-1] = b
    offs = _collar_offsets(R, n_collar, grading)
    nodes = np.concatenate([(a - offs)[::-1], inner, b + offs])
    return DomainMesh(a=float(a), b=float(b), R=float(R), nodes=nodes, grading=grading)


def mesh_csv(mesh: DomainMesh) -> str:
    lines = ["node,x,class"]
    for i, (x, c) in enumerate(zip(mesh.nodes, mesh.dof_class())):
        lines.append(f"{i},{x!r},{c}")
    return "\n".join(lines) + "\n"
