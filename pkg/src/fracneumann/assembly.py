"""Galerkin matrices for the local and superposed fractional forms.

The fractional form of order s on P1 hats is

    G_s[i, j] = iint_Q (phi_i(x) - phi_i(y)) (phi_j(x) - phi_j(y)) |x - y|^{-1-2s}

with Q the set of pairs having at least one point in Omega, and
``A_frac = (c_{1,s} / 2) G_s``.  The two end nodes of the collar carry
hats that stay equal to 1 out to infinity, so constants are represented
exactly on the whole line; their far-field interaction with Omega is
integrated in closed form in y.

Element pairs are classified and integrated as follows:

* same element: closed form (the integrand only depends on x - y);
* touching elements: the integrand is homogeneous in the offsets from
  the shared node, so the nested L-shaped layers form a geometric series
  and only the outermost layer is integrated numerically;
* disjoint elements: tensor Gauss on panels graded toward the gap, so
  every panel pair is at least one panel width apart;
* interval element x tail: Gauss in x of the exact y-integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import MeasureError, MeshError
from .kernel import c_ns
from .measure import SpectralMeasure, zero_measure
from .mesh import DomainMesh

PAIR_POINTS = 8
TAIL_POINTS = 16
LOAD_POINTS = 6


@lru_cache(maxsize=8)
def _gauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _graded_panels(length: float, gap: float) -> np.ndarray:
    """Panel edges (offsets from the near end) with width <= distance to the target."""
    edges = [0.0]
    while edges[-1] < length:
        width = gap + edges[-1]
        edges.append(min(edges[-1] + width, length))
    if len(edges) > 2 and edges[-1] - edges[-2] < 0.25 * (edges[-2] - edges[-3]):
        # fold a sliver into its neighbour
        edges.pop(-2)
    return np.asarray(edges)


def _panel_nodes(lo: float, hi: float, toward_hi: bool, gap: float, n: int):
    """Gauss nodes on [lo, hi] over panels graded toward one end."""
    edges = _graded_panels(hi - lo, gap)
    t, w = _gauss01(n)
    p0, p1 = edges[:-1], edges[1:]
    offs = (p0[:, None] + (p1 - p0)[:, None] * t).ravel()
    wts = ((p1 - p0)[:, None] * w).ravel()
    pts = hi - offs if toward_hi else lo + offs
    return pts, wts


def _separated_rule(x0, x1, y0, y1, n=PAIR_POINTS):
    """Tensor rule on [x0,x1] x [y0,y1] for x1 <= y0 (gap may be tiny, not 0)."""
    gap = y0 - x1
    xs, wx = _panel_nodes(x0, x1, True, gap, n)
    ys, wy = _panel_nodes(y0, y1, False, gap, n)
    X = np.repeat(xs, len(ys))
    Y = np.tile(ys, len(xs))
    W = np.repeat(wx, len(ys)) * np.tile(wy, len(xs))
    return X, Y, W


def _local_from_points(D, r, W, orders):
    """Local matrices sum_q W_q r_q^{-1-2s} D_iq D_jq for every order s."""
    kern = W[None, :] * r[None, :] ** (-1.0 - 2.0 * orders[:, None])
    return np.einsum("aq,iq,jq->aij", kern, D, D)


def _self_local(h: float, orders: np.ndarray) -> np.ndarray:
    # iint_{E^2} |x-y|^{1-2s} / h^2 = 2 h^{1-2s} / ((2-2s)(3-2s))
    val = 2.0 * h ** (1.0 - 2.0 * orders) / ((2.0 - 2.0 * orders) * (3.0 - 2.0 * orders))
    base = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return val[:, None, None] * base


def _touching_local(h1: float, h2: float, orders: np.ndarray) -> np.ndarray:
    """Pair [x0-h1, x0] x [x0, x0+h2]; DOFs (left, shared, right)."""
    pieces = [
        (h1 / 2, h1, 0.0, h2 / 2),
        (0.0, h1 / 2, h2 / 2, h2),
        (h1 / 2, h1, h2 / 2, h2),
    ]
    total = np.zeros((len(orders), 3, 3))
    for u0, u1, v0, v1 in pieces:
        # u = x0 - x increases leftward, so x-interval is [-u1, -u0]
        X, Y, W = _separated_rule(-u1, -u0, v0, v1)
        u, v = -X, Y
        d_left = u / h1
        d_right = -v / h2
        D = np.vstack([d_left, -(d_left + d_right), d_right])
        total += _local_from_points(D, u + v, W, orders)
    # remaining corner box is a scaled copy: factor 2^{-(3-2s)} per level
    series = 1.0 / (1.0 - 2.0 ** (-(3.0 - 2.0 * orders)))
    return total * series[:, None, None]


def _disjoint_local(e, f, nodes, orders) -> np.ndarray:
    """Element e left of element f with a positive gap; DOFs (e0, e1, f0, f1)."""
    x0, x1 = nodes[e], nodes[e + 1]
    y0, y1 = nodes[f], nodes[f + 1]
    X, Y, W = _separated_rule(x0, x1, y0, y1)
    hx, hy = x1 - x0, y1 - y0
    D = np.vstack([(x1 - X) / hx, (X - x0) / hx, -(y1 - Y) / hy, -(Y - y0) / hy])
    return _local_from_points(D, Y - X, W, orders)


def _far_locals(E, F, nodes, orders) -> np.ndarray:
    """Batched 8x8 rule for well-separated pairs (gap >= both widths)."""
    t, w = _gauss01(PAIR_POINTS)
    tx = np.repeat(t, PAIR_POINTS)
    ty = np.tile(t, PAIR_POINTS)
    ww = np.repeat(w, PAIR_POINTS) * np.tile(w, PAIR_POINTS)
    x0, x1 = nodes[E][:, None], nodes[E + 1][:, None]
    y0, y1 = nodes[F][:, None], nodes[F + 1][:, None]
    hx, hy = x1 - x0, y1 - y0
    X = x0 + hx * tx
    Y = y0 + hy * ty
    W = hx * hy * ww
    D = np.stack([1.0 - tx, tx, -(1.0 - ty), -ty])  # (4, Q), same for every pair
    D = np.broadcast_to(D[None], (len(E), 4, len(tx)))
    r = Y - X
    out = np.empty((len(orders), len(E), 4, 4))
    for a, s in enumerate(orders):
        kern = W * r ** (-1.0 - 2.0 * s)
        out[a] = np.einsum("pq,piq,pjq->pij", kern, D, D)
    return out


def _tail_local(e, nodes, end_x, orders) -> np.ndarray:
    """Interval element e against the constant tail beyond collar end ``end_x``.

    DOFs (e0, e1, end).  The y-integral over the tail is exact:
    int |x - y|^{-1-2s} dy = |end_x - x|^{-2s} / (2s).
    """
    t, w = _gauss01(TAIL_POINTS)
    x0, x1 = nodes[e], nodes[e + 1]
    h = x1 - x0
    X = x0 + h * t
    D = np.vstack([1.0 - t, t, -np.ones_like(t)])
    dist = np.abs(end_x - X)
    kern = (h * w)[None, :] * dist[None, :] ** (-2.0 * orders[:, None]) / (2.0 * orders[:, None])
    return np.einsum("aq,iq,jq->aij", kern, D, D)


def raw_fractional_forms(mesh: DomainMesh, orders: Sequence[float],
                         omega_only: bool = False) -> np.ndarray:
    """Stack of G_s matrices (no constant c_{1,s}), one per order.

    ``omega_only`` restricts the double integral to Omega x Omega and
    drops the tails.
    """
    orders = np.asarray(orders, dtype=float)
    if np.any((orders <= 0) | (orders >= 1)):
        raise MeasureError("orders must lie in (0, 1)")
    nodes = mesh.nodes
    n = mesh.n_nodes
    ne = n - 1
    in_om = mesh.element_in_omega
    G = np.zeros((len(orders), n, n))
    if len(orders) == 0:
        return G
    widths = mesh.widths

    def scatter(dofs, local, factor):
        idx = np.asarray(dofs)
        G[:, idx[:, None], idx[None, :]] += factor * local

    for e in range(ne):
        if in_om[e]:
            scatter([e, e + 1], _self_local(widths[e], orders), 1.0)
    for e in range(ne - 1):
        f = e + 1
        if in_om[e] or in_om[f]:
            if omega_only and not (in_om[e] and in_om[f]):
                continue
            scatter([e, e + 1, f + 1], _touching_local(widths[e], widths[f], orders), 2.0)

    E, F = np.triu_indices(ne, k=2)
    keep = in_om[E] & in_om[F] if omega_only else in_om[E] | in_om[F]
    E, F = E[keep], F[keep]
    gap = nodes[F] - nodes[E + 1]
    far = gap >= np.maximum(widths[E], widths[F])
    if np.any(far):
        locs = _far_locals(E[far], F[far], nodes, orders)
        dofs = np.stack([E[far], E[far] + 1, F[far], F[far] + 1], axis=1)
        for a in range(len(orders)):
            # np.add.at applies updates in index order: deterministic sums
            np.add.at(G[a], (dofs[:, :, None], dofs[:, None, :]), 2.0 * locs[a])
    for e, f in zip(E[~far], F[~far]):
        scatter([e, e + 1, f, f + 1], _disjoint_local(e, f, nodes, orders), 2.0)

    if not omega_only:
        for e in np.flatnonzero(in_om):
            scatter([e, e + 1, 0], _tail_local(e, nodes, nodes[0], orders), 2.0)
            scatter([e, e + 1, n - 1], _tail_local(e, nodes, nodes[-1], orders), 2.0)
    return G


def mass_matrix(mesh: DomainMesh) -> np.ndarray:
    """P1 mass matrix over Omega only (rows of exterior DOFs vanish)."""
    n = mesh.n_nodes
    M = np.zeros((n, n))
    for e in np.flatnonzero(mesh.element_in_omega):
        h = mesh.widths[e]
        M[e:e + 2, e:e + 2] += h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    return M


def stiffness_matrix(mesh: DomainMesh) -> np.ndarray:
    """P1 stiffness ``int_Omega phi_i' phi_j'``."""
    n = mesh.n_nodes
    K = np.zeros((n, n))
    for e in np.flatnonzero(mesh.element_in_omega):
        h = mesh.widths[e]
        K[e:e + 2, e:e + 2] += np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
    return K


@dataclass(frozen=True)
class AssembledSystem:
    mesh: DomainMesh
    measure: SpectralMeasure
    alpha: float
    M: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)
    A_frac: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.mesh.n_nodes

    @property
    def constants(self) -> np.ndarray:
        return np.array([c_ns(1, s) for s in self.measure.orders])


def assemble(mesh: DomainMesh, m: SpectralMeasure | None, alpha: float) -> AssembledSystem:
    """Mass, stiffness, per-atom fractional matrices and the combined operator."""
    if m is None:
        m = zero_measure()
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ValueError(f"alpha must be finite and >= 0, got {alpha}")
    if alpha == 0 and m.is_zero:
        raise MeasureError("alpha = 0 with the zero measure gives the trivial operator")
    orders = m.orders
    G = raw_fractional_forms(mesh, orders)
    c = np.array([c_ns(1, s) for s in orders])
    A_frac = 0.5 * c[:, None, None] * G
    M = mass_matrix(mesh)
    K = stiffness_matrix(mesh)
    A = alpha * K + np.einsum("a,aij->ij", m.weights, A_frac)
    A = 0.5 * (A + A.T)
    return AssembledSystem(mesh, m, float(alpha), M, K, A_frac, A)


def omega_form(mesh: DomainMesh, m: SpectralMeasure) -> np.ndarray:
    """``sum_k w_k c_k G_{s_k}`` restricted to Omega x Omega."""
    G = raw_fractional_forms(mesh, m.orders, omega_only=True)
    c = np.array([c_ns(1, s) for s in m.orders])
    return np.einsum("a,aij->ij", m.weights * c, G)


def _element_integrals(mesh, func, elements):
    """Vector of ``int func * phi_i`` over the listed elements."""
    F = np.zeros(mesh.n_nodes)
    t, w = _gauss01(LOAD_POINTS)
    for e in elements:
        x0, h = mesh.nodes[e], mesh.widths[e]
        vals = np.asarray(func(x0 + h * t), dtype=float) * np.ones_like(t)
        F[e] += h * np.dot(w * (1.0 - t), vals)
        F[e + 1] += h * np.dot(w * t, vals)
    return F


def assemble_load(mesh: DomainMesh, alpha: float, f: Callable | None = None,
                  g: Callable | None = None, h: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """``F_i = int_Omega f phi_i + int_collar g phi_i + alpha (h_a phi_i(a) + h_b phi_i(b))``.

    g is only integrated over the meshed collar.
    """
    F = np.zeros(mesh.n_nodes)
    in_om = mesh.element_in_omega
    if f is not None:
        F += _element_integrals(mesh, f, np.flatnonzero(in_om))
    if g is not None:
        F += _element_integrals(mesh, g, np.flatnonzero(~in_om))
    F[mesh.ia] += alpha * h[0]
    F[mesh.ib] += alpha * h[1]
    return F


def _check_dim(sys, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (sys.n,):
        raise MeshError(f"field has shape {u.shape}, mesh has {sys.n} nodes")
    return u


def energy(sys: AssembledSystem, u, F=None) -> float:
    """``(alpha/2) u'Ku + (1/2) sum_k w_k u'A_k u - F.u``."""
    u = _check_dim(sys, u)
    quad = 0.5 * sys.alpha * u @ sys.K @ u
    for w, Ak in zip(sys.measure.weights, sys.A_frac):
        quad += 0.5 * w * u @ Ak @ u
    if F is None:
        return float(quad)
    return float(quad - _check_dim(sys, F) @ u)


def gagliardo_seminorm_sq(sys: AssembledSystem, u) -> float:
    """``int c_{1,s} [u]_s^2 dmu(s)`` over Q for the nodal field u."""
    u = _check_dim(sys, u)
    return float(sum(2.0 * w * u @ Ak @ u for w, Ak in zip(sys.measure.weights, sys.A_frac)))


def matrix_coo_text(A: np.ndarray, tol: float = 0.0) -> str:
    """Coordinate dump ``row col value`` of the entries with |a| > tol."""
    rows, cols = np.nonzero(np.abs(A) > tol)
    return "".join(f"{i} {j} {float(A[i, j])!r}\n" for i, j in zip(rows, cols))
