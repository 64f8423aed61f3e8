import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fracneumann.errors import MeasureError
from fracneumann.measure import (density_preset, format_measure, from_atoms, from_density,
                                 from_series, parse_measure, s_sharp, zero_measure)


def test_single_atom():
    m = from_atoms([(0.5, 1.0)])
    assert m.atoms == ((0.5, 1.0),)
    assert m.origin == "explicit-atoms"


def test_equal_orders_merge():
    m = from_atoms([(0.3, 1.0), (0.3, 2.0)])
    assert m.atoms == ((0.3, 3.0),)


def test_sorted_and_total_mass():
    m = from_atoms([(0.75, 0.5), (0.25, 1.0)])
    np.testing.assert_array_equal(m.orders, [0.25, 0.75])
    assert m.total_mass == 1.5


def test_nearby_orders_merge():
    m = from_atoms([(0.4, 1.0), (0.4 + 1e-13, 1.0)])
    assert len(m) == 1


def test_zero_weights_dropped():
    m = from_atoms([(0.2, 0.0), (0.6, 1.0)])
    assert m.atoms == ((0.6, 1.0),)


@pytest.mark.parametrize("pairs", [[(0.0, 1.0)], [(1.0, 1.0)], [(-0.2, 1.0)], [(0.5, -1.0)],
                                   [(float("nan"), 1.0)]])
def test_rejects_bad_atoms(pairs):
    with pytest.raises(MeasureError):
        from_atoms(pairs)


def test_empty_needs_flag():
    with pytest.raises(MeasureError):
        from_atoms([])
    assert from_atoms([], allow_empty=True).is_zero


def test_series_truncation():
    orders = [1 - 2.0 ** -k for k in range(1, 20)]
    coeffs = [2.0 ** -k for k in range(1, 20)]
    m = from_series(orders, coeffs, 5)
    assert len(m) == 5 and m.origin == "truncated-series"
    assert m.total_mass == pytest.approx(1 - 2.0 ** -5, rel=1e-15)


def test_density_constant_and_linear():
    assert from_density(lambda s: np.ones_like(s), 8).total_mass == pytest.approx(1.0, abs=1e-12)
    assert from_density(lambda s: s, 8).total_mass == pytest.approx(0.5, abs=1e-12)


def test_density_inverse_sqrt_against_quad():
    ref, _ = integrate.quad(lambda s: s ** -0.5, 0, 1, epsabs=1e-14, epsrel=1e-13)
    m = from_density(lambda s: s ** -0.5, 64)
    assert abs(m.total_mass - ref) / ref < 1e-3
    assert m.origin == "quadratured-density"


def test_density_rejections():
    with pytest.raises(MeasureError):
        from_density(lambda s: s - 0.5, 8)
    with pytest.raises(MeasureError):
        from_density(lambda s: np.ones_like(s), 1)


@pytest.mark.parametrize("name", ["one", "lin", "isqrt", "bump"])
def test_density_refinement_monotone(name):
    f = {"one": lambda s: np.ones_like(s), "lin": lambda s: s,
         "isqrt": lambda s: s ** -0.5, "bump": lambda s: s * (1 - s)}[name]
    ref, _ = integrate.quad(lambda s: float(f(np.array(s))), 0, 1, epsabs=1e-14, epsrel=1e-13)
    errs = [abs(from_density(f, n).total_mass - ref) for n in (2, 4, 8, 16, 32, 64)]
    assert all(e2 <= e1 + 2e-15 for e1, e2 in zip(errs, errs[1:]))


def test_s_sharp():
    assert s_sharp(from_atoms([(0.25, 1), (0.75, 0.5)])) == 0.75
    assert s_sharp(from_atoms([(0.5, 1)])) == 0.5
    # largest 16-point Gauss node after the map to (0, 1)
    m = from_density(lambda s: np.ones_like(s), 16)
    assert s_sharp(m) > 0.99
    with pytest.raises(MeasureError):
        s_sharp(zero_measure())


def test_parse_literals():
    m = parse_measure("atoms: 0.5:1.0, 0.25:2.0")
    assert m.total_mass == 3.0
    d = parse_measure("density: powlaw:-0.5, nodes:64")
    assert d.total_mass == pytest.approx(2.0, rel=1e-3)
    assert len(parse_measure("density: bump")) == 16
    assert parse_measure("zero").is_zero
    for bad in ("atoms: 0.5", "density: nope", "blob: 1", "density: uniform, nodes:x"):
        with pytest.raises(MeasureError):
            parse_measure(bad)


def test_density_preset_requires_exponent():
    with pytest.raises(MeasureError):
        density_preset("powlaw")


atom_lists = st.lists(st.tuples(st.floats(0.01, 0.99), st.floats(0.0, 10.0)), min_size=1, max_size=8)


@given(atom_lists)
@settings(max_examples=60, deadline=None)
def test_canonicalization_idempotent(pairs):
    m = from_atoms(pairs, allow_empty=True)
    assert from_atoms(m.atoms, allow_empty=True) == m
    assert parse_measure(format_measure(m)) == m


@given(atom_lists, atom_lists)
@settings(max_examples=60, deadline=None)
def test_total_mass_additive(p1, p2):
    m1 = from_atoms(p1, allow_empty=True)
    m2 = from_atoms(p2, allow_empty=True)
    tot = (m1 + m2).total_mass
    assert math.isclose(tot, m1.total_mass + m2.total_mass, rel_tol=1e-15, abs_tol=1e-300)
