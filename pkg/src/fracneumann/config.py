"""Sectioned ``key = value`` run configurations.

Example::

    [domain]
    a = 0
    b = 1
    [operator]
    alpha = 0
    measure = atoms: 0.5:1.0

Unset keys take defaults; ``emit_config`` writes every key in a fixed
order so ``emit_config(parse_config(text))`` is a canonical form.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, MeasureError
from .measure import SpectralMeasure, format_measure, parse_measure
from .mesh import GRADINGS
from .heat import SCHEMES
from .perimeter import METHODS

COMMANDS = ("solve", "eigs", "heat", "extend", "perimeter", "verify")

# (section, key, attribute) in emission order
LAYOUT = [
    ("domain", "a", "a"),
    ("domain", "b", "b"),
    ("collar", "R", "R"),
    ("collar", "n_collar", "n_collar"),
    ("mesh", "n_interior", "n_interior"),
    ("mesh", "grading", "grading"),
    ("operator", "alpha", "alpha"),
    ("operator", "measure", "measure_text"),
    ("data", "f", "f"),
    ("data", "g", "g"),
    ("data", "h", "h"),
    ("eigs", "k", "eigs_k"),
    ("heat", "dt", "heat_dt"),
    ("heat", "T_end", "heat_T_end"),
    ("heat", "scheme", "heat_scheme"),
    ("heat", "u0", "heat_u0"),
    ("extend", "points", "extend_points"),
    ("extend", "u0", "extend_u0"),
    ("perimeter", "method", "perimeter_method"),
    ("output", "dir", "out_dir"),
    ("output", "formats", "formats"),
]
KNOWN = {}
for _sec, _key, _attr in LAYOUT:
    KNOWN.setdefault(_sec, []).append(_key)


@dataclass(frozen=True)
class RunConfig:
    a: float
    b: float
    R: float
    n_collar: int = 16
    n_interior: int = 16
    grading: str = "uniform"
    alpha: float = 0.0
    measure_text: str = "zero"
    f: str = "zero"
    g: str = "zero"
    h: tuple = (0.0, 0.0)
    eigs_k: int = 5
    heat_dt: float = 1e-3
    heat_T_end: float = 0.1
    heat_scheme: str = "implicit-euler"
    heat_u0: str = "cos:1"
    extend_points: tuple = ()
    extend_u0: str = "poly:0;1"
    perimeter_method: str = "analytic"
    out_dir: str = "out"
    formats: tuple = ("csv", "json")
    measure: SpectralMeasure = field(default=None, compare=False, repr=False)

    @property
    def length(self) -> float:
        return self.b - self.a


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text: every key, fixed order, floats in round-trip form."""
    out = []
    current = None
    for sec, key, attr in LAYOUT:
        if sec != current:
            if current is not None:
                out.append("")
            out.append(f"[{sec}]")
            current = sec
        out.append(f"{key} = {_fmt(getattr(cfg, attr))}")
    return "\n".join(out) + "\n"


def _key_lines(text: str) -> dict:
    """Map ``(section, key) -> line number`` for error messages."""
    where = {}
    sec = None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            sec = m.group(1).strip()
        elif sec and "=" in s and not s.startswith(("#", ";")):
            where[(sec, s.split("=", 1)[0].strip())] = n
    return where


class _Reader:
    def __init__(self, cp, lines):
        self.cp = cp
        self.lines = lines

    def where(self, sec, key):
        n = self.lines.get((sec, key))
        return f"line {n}: " if n else ""

    def fail(self, sec, key, msg):
        raise ConfigError(f"{self.where(sec, key)}[{sec}] {key}: {msg}")

    def raw(self, sec, key):
        if self.cp.has_option(sec, key):
            return self.cp.get(sec, key).strip()
        return None

    def num(self, sec, key, default, kind=float):
        raw = self.raw(sec, key)
        if raw is None:
            if default is None:
                raise ConfigError(f"[{sec}] {key} is required")
            return default
        try:
            val = kind(raw)
        except ValueError:
            self.fail(sec, key, f"expected {kind.__name__}, got {raw!r}")
        if kind is float and not math.isfinite(val):
            self.fail(sec, key, "value must be finite")
        return val

    def choice(self, sec, key, default, options):
        raw = self.raw(sec, key)
        val = default if raw is None else raw
        if val not in options:
            self.fail(sec, key, f"{val!r} not one of {', '.join(options)}")
        return val

    def floats(self, sec, key, default):
        raw = self.raw(sec, key)
        if raw is None:
            return default
        try:
            vals = tuple(float(x) for x in raw.split(",") if x.strip())
        except ValueError:
            self.fail(sec, key, f"expected a comma-separated list of numbers, got {raw!r}")
        if not all(math.isfinite(v) for v in vals):
            self.fail(sec, key, "values must be finite")
        return vals


def canonical_measure(text: str) -> tuple[str, SpectralMeasure]:
    """Parse a measure literal; atom lists are rewritten sorted and merged."""
    m = parse_measure(text)
    body = " ".join(text.split())
    if body.startswith("density"):
        kind, _, rest = body.partition(":")
        items = [it.strip().replace(" ", "") for it in rest.split(",") if it.strip()]
        if not any(it.startswith("nodes:") for it in items[1:]):
            items.append("nodes:16")
        return "density: " + ", ".join(items), m
    return format_measure(m), m


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError naming the line or invariant."""
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=None, interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    lines = _key_lines(text)
    for sec in cp.sections():
        if sec not in KNOWN:
            raise ConfigError(f"unknown section [{sec}]")
        for key in cp.options(sec):
            if key not in KNOWN[sec]:
                n = lines.get((sec, key))
                raise ConfigError(f"{'line %d: ' % n if n else ''}unknown key {key!r} in [{sec}]")
    r = _Reader(cp, lines)
    a = r.num("domain", "a", None)
    b = r.num("domain", "b", None)
    if not b > a:
        r.fail("domain", "b", "violates a < b")
    L = b - a
    R = r.num("collar", "R", 10.0 * L)
    if R < L:
        r.fail("collar", "R", "violates R >= b - a")
    n_collar = r.num("collar", "n_collar", 16, int)
    n_interior = r.num("mesh", "n_interior", 16, int)
    if n_collar < 4:
        r.fail("collar", "n_collar", "violates n_collar >= 4")
    if n_interior < 4:
        r.fail("mesh", "n_interior", "violates n_interior >= 4")
    grading = r.choice("mesh", "grading", "uniform", GRADINGS)
    alpha = r.num("operator", "alpha", 0.0)
    if alpha < 0:
        r.fail("operator", "alpha", "violates alpha >= 0")
    mtext = r.raw("operator", "measure") or "zero"
    try:
        mtext, measure = canonical_measure(mtext)
    except MeasureError as exc:
        r.fail("operator", "measure", str(exc))
    if measure.is_zero and alpha == 0:
        r.fail("operator", "measure", "violates 'measure nonempty or alpha > 0'")
    f = r.raw("data", "f") or "zero"
    g = r.raw("data", "g") or "zero"
    for key, val in (("f", f), ("g", g)):
        try:
            function_preset(val, a, b)
        except ConfigError as exc:
            r.fail("data", key, str(exc))
    h = r.floats("data", "h", (0.0, 0.0))
    if len(h) != 2:
        r.fail("data", "h", "expected two values h_a, h_b")
    k = r.num("eigs", "k", 5, int)
    if not 1 <= k <= n_interior + 1:
        r.fail("eigs", "k", f"violates 1 <= k <= {n_interior + 1}")
    dt = r.num("heat", "dt", 1e-3)
    T_end = r.num("heat", "T_end", 0.1)
    if dt <= 0:
        r.fail("heat", "dt", "violates dt > 0")
    if T_end <= 0:
        r.fail("heat", "T_end", "violates T_end > 0")
    scheme = r.choice("heat", "scheme", "implicit-euler", tuple(SCHEMES))
    heat_u0 = r.raw("heat", "u0") or "cos:1"
    ext_u0 = r.raw("extend", "u0") or "poly:0;1"
    for sec, val in (("heat", heat_u0), ("extend", ext_u0)):
        try:
            function_preset(val, a, b)
        except ConfigError as exc:
            r.fail(sec, "u0", str(exc))
    pts = r.floats("extend", "points", (b + 0.5 * L, b + L, b + 10 * L, a - L))
    if any(a <= p <= b for p in pts):
        r.fail("extend", "points", "violates 'points outside [a, b]'")
    method = r.choice("perimeter", "method", "analytic", METHODS)
    out_dir = r.raw("output", "dir") or "out"
    fmts = tuple(x.strip() for x in (r.raw("output", "formats") or "csv, json").split(",") if x.strip())
    for x in fmts:
        if x not in ("csv", "json", "gnuplot"):
            r.fail("output", "formats", f"unknown format {x!r}")
    return RunConfig(a=a, b=b, R=R, n_collar=n_collar, n_interior=n_interior, grading=grading,
                     alpha=alpha, measure_text=mtext, f=f, g=g, h=h, eigs_k=k,
                     heat_dt=dt, heat_T_end=T_end, heat_scheme=scheme, heat_u0=heat_u0,
                     extend_points=pts, extend_u0=ext_u0, perimeter_method=method,
                     out_dir=out_dir, formats=fmts, measure=measure)


def function_preset(text: str, a: float, b: float, seed: int = 0) -> Callable | None:
    """Callable for a data preset, or None for ``zero``.

    ``const:c``; ``cos:k`` = cos(k pi (x-a)/L); ``cosmode:k`` = (k pi/L)^2 cos(k pi (x-a)/L),
    the load whose Neumann-Laplacian solution is ``cos:k``; ``poly:c0;c1;...`` =
    sum c_i x^i; ``random`` = seeded random trigonometric sum on [a, b].
    """
    text = text.strip()
    name, _, arg = text.partition(":")
    L = b - a
    try:
        if name == "zero":
            return None
        if name == "const":
            c = float(arg)
            return lambda x: np.full_like(np.asarray(x, dtype=float), c)
        if name in ("cos", "cosmode"):
            k = float(arg)
            amp = (k * math.pi / L) ** 2 if name == "cosmode" else 1.0
            return lambda x: amp * np.cos(k * math.pi * (np.asarray(x, dtype=float) - a) / L)
        if name == "poly":
            coef = [float(c) for c in arg.split(";")]
            return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coef)
        if name == "random":
            rng = np.random.default_rng(seed)
            amps = rng.standard_normal(6) / (1.0 + np.arange(6))
            return lambda x: sum(c * np.cos(j * math.pi * (np.asarray(x, dtype=float) - a) / L)
                                 for j, c in enumerate(amps))
    except ValueError:
        pass
    raise ConfigError(f"bad function preset {text!r}")
