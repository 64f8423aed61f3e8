"""Nonnegative finite measures on (0, 1) reduced to weighted atoms.

Every supported form (finite sums of Dirac masses, truncated series,
absolutely continuous densities) ends up as a sorted tuple of
``(s, weight)`` pairs, so downstream code never has to care where the
measure came from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import MeasureError

MERGE_TOL = 1e-12

ORIGINS = ("explicit-atoms", "truncated-series", "quadratured-density")


@dataclass(frozen=True)
class SpectralMeasure:
    atoms: tuple[tuple[float, float], ...]
    origin: str = "explicit-atoms"

    @property
    def orders(self) -> np.ndarray:
        return np.array([s for s, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __add__(self, other: "SpectralMeasure") -> "SpectralMeasure":
        origin = self.origin if self.origin == other.origin else "explicit-atoms"
        return from_atoms(list(self.atoms) + list(other.atoms), allow_empty=True, origin=origin)

    def scaled(self, factor: float) -> "SpectralMeasure":
        if factor < 0:
            raise MeasureError("measures must stay nonnegative")
        if factor == 0:
            return SpectralMeasure((), self.origin)
        return SpectralMeasure(tuple((s, w * factor) for s, w in self.atoms), self.origin)

    def support_below(self, bound: float) -> bool:
        return all(s < bound for s, _ in self.atoms)


def zero_measure() -> SpectralMeasure:
    """The trivial measure; only meaningful together with alpha > 0."""
    return SpectralMeasure(())


def from_atoms(pairs: Iterable[tuple[float, float]], allow_empty: bool = False,
               origin: str = "explicit-atoms") -> SpectralMeasure:
    """Canonicalize a finite list of ``(s, w)`` atoms.

    Atoms are sorted by order, zero weights are dropped and atoms whose
    orders differ by less than ``MERGE_TOL`` are merged with their weights
    summed.  An empty result is rejected unless ``allow_empty`` is set,
    which callers use when a local term (alpha > 0) keeps the operator
    nontrivial.
    """
    if origin not in ORIGINS:
        raise MeasureError(f"unknown measure origin {origin!r}")
    clean = []
    for s, w in pairs:
        s, w = float(s), float(w)
        if not (math.isfinite(s) and math.isfinite(w)):
            raise MeasureError(f"non-finite atom ({s}, {w})")
        if not 0.0 < s < 1.0:
            raise MeasureError(f"atom order s={s} outside (0, 1)")
        if w < 0:
            raise MeasureError(f"negative weight {w} at s={s}")
        if w > 0:
            clean.append((s, w))
    clean.sort()
    merged: list[list[float]] = []
    for s, w in clean:
        if merged and s - merged[-1][0] < MERGE_TOL:
            merged[-1][1] += w
        else:
            merged.append([s, w])
    if not merged and not allow_empty:
        raise MeasureError("empty measure: the operator would be trivial")
    return SpectralMeasure(tuple((s, w) for s, w in merged), origin)


def from_series(orders: Iterable[float], coefficients: Iterable[float],
                n_terms: int) -> SpectralMeasure:
    """First ``n_terms`` atoms of ``sum_k c_k delta_{s_k}``."""
    pairs = list(zip(orders, coefficients))[:n_terms]
    return from_atoms(pairs, origin="truncated-series")


def _smoothstep_rule(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Legendre on (0,1) pushed through s = 3t^2 - 2t^3; the map's
    # derivative vanishes at both ends, which absorbs s^{-1/2}-type
    # endpoint singularities of the density.
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    t = 0.5 * (x + 1.0)
    s = t * t * (3.0 - 2.0 * t)
    jac = 6.0 * t * (1.0 - t)
    return s, 0.5 * w * jac


def from_density(f: Callable[[np.ndarray], np.ndarray], n_nodes: int) -> SpectralMeasure:
    """Reduce ``d mu = f(s) ds`` to atoms at mapped Gauss-Legendre nodes."""
    if n_nodes < 2:
        raise MeasureError("a density needs at least 2 quadrature nodes")
    s, w = _smoothstep_rule(int(n_nodes))
    vals = np.asarray(f(s), dtype=float) * np.ones_like(s)
    if np.any(~np.isfinite(vals)):
        raise MeasureError("density is not finite at a quadrature node")
    if np.any(vals < 0):
        raise MeasureError("density takes negative values")
    return from_atoms(zip(s, vals * w), allow_empty=True, origin="quadratured-density")


DENSITY_PRESETS = {
    "uniform": lambda p: (lambda s: np.ones_like(s)),
    "powlaw": lambda p: (lambda s: s ** p),
    "bump": lambda p: (lambda s: s * (1.0 - s)),
}


def density_preset(name: str, param: float | None = None) -> Callable:
    if name not in DENSITY_PRESETS:
        raise MeasureError(f"unknown density preset {name!r}")
    if name == "powlaw" and param is None:
        raise MeasureError("powlaw needs an exponent, e.g. powlaw:0.5")
    return DENSITY_PRESETS[name](param)


def s_sharp(m: SpectralMeasure) -> float:
    """Order s# with mu([s#, 1)) > 0, taken as large as possible."""
    if m.is_zero:
        raise MeasureError("s# is undefined for the zero measure")
    return m.atoms[-1][0]


def parse_measure(text: str) -> SpectralMeasure:
    """Parse a measure literal.

    ``atoms: 0.5:1.0, 0.25:2`` lists atoms; ``density: powlaw:-0.5, nodes:32``
    quadratures a preset density; ``zero`` is the trivial measure.
    """
    text = text.strip()
    if text in ("zero", "none", ""):
        return zero_measure()
    kind, _, body = text.partition(":")
    kind = kind.strip()
    items = [it.strip() for it in body.split(",") if it.strip()]
    if kind == "atoms":
        pairs = []
        for it in items:
            s, sep, w = it.partition(":")
            if not sep:
                raise MeasureError(f"atom {it!r} is not of the form s:w")
            try:
                pairs.append((float(s), float(w)))
            except ValueError:
                raise MeasureError(f"atom {it!r} is not numeric") from None
        return from_atoms(pairs, allow_empty=True)
    if kind == "density":
        if not items:
            raise MeasureError("density literal needs a preset")
        name, _, param = items[0].partition(":")
        n_nodes = 16
        for it in items[1:]:
            key, _, val = it.partition(":")
            if key.strip() != "nodes":
                raise MeasureError(f"unknown density option {key!r}")
            try:
                n_nodes = int(val)
            except ValueError:
                raise MeasureError(f"nodes must be an integer, got {val!r}") from None
        try:
            p = float(param) if param else None
        except ValueError:
            raise MeasureError(f"bad density parameter {param!r}") from None
        return from_density(density_preset(name.strip(), p), n_nodes)
    raise MeasureError(f"unknown measure kind {kind!r}")


def format_measure(m: SpectralMeasure) -> str:
    """Canonical atom literal; reparses to an identical measure."""
    if m.is_zero:
        return "zero"
    return "atoms: " + ", ".join(f"{s!r}:{w!r}" for s, w in m.atoms)
