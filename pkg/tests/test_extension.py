import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracneumann.assembly import assemble
from fracneumann.extension import (continuity_probe, extend, extension_field, far_field_limit,
                                   interior_mean, minimality_check, normalized_neumann, probe_csv)
from fracneumann.kernel import KernelContext, extension_ratio
from fracneumann.measure import from_atoms
from fracneumann.mesh import build_mesh

UNIT = KernelContext(0.0, 1.0)
HALF = from_atoms([(0.5, 1.0)])
PAIR = from_atoms([(0.25, 1.0), (0.75, 1.0)])
ident = lambda z: np.asarray(z, dtype=float)


def test_constant_probe():
    p = extend(lambda z: np.full_like(np.asarray(z, dtype=float), 3.0), [1.5, 2.0, -4.0], UNIT, HALF)
    np.testing.assert_array_equal(p.values, 3.0)
    np.testing.assert_array_equal(p.normalized_neumann, 0.0)
    assert p.far_limit == pytest.approx(3.0, rel=1e-12)


def test_linear_probe():
    p = extend(ident, [2.0, 1.5, -1.0, 11.0], UNIT, HALF)
    assert p.values[0] == pytest.approx(2 * (1 - math.log(2)), abs=1e-8)
    assert np.abs(p.normalized_neumann).max() < 1e-8
    assert abs(p.far_limit - 0.5) < 1e-3
    assert p.interior_mean == pytest.approx(0.5, rel=1e-14)
    # mirror symmetry of u = z about 1/2
    assert p.values[1] + extension_ratio(UNIT, HALF, ident, -0.5) == pytest.approx(1.0, abs=1e-12)


def test_nodal_input_and_rejection():
    nodes = np.linspace(0, 1, 9)
    p = extend((nodes, nodes ** 2), [2.0], UNIT, PAIR)
    q = extend(lambda z: np.interp(z, nodes, nodes ** 2), [2.0], UNIT, PAIR)
    assert p.values[0] == q.values[0]
    with pytest.raises(ValueError):
        extend(ident, [0.5], UNIT, HALF)


def test_csv():
    text = probe_csv(extend(ident, [2.0, -1.0], UNIT, HALF))
    assert text.splitlines()[0] == "x,value,normalized_neumann"
    assert text.count("\n") == 3


def test_normalized_neumann_identity():
    # for u defined everywhere, N~u(x) = u(x) - (extension of u restricted to Omega)(x)
    m = from_atoms([(0.3, 1.0), (0.7, 0.5)])
    u = lambda z: np.sin(2 * np.asarray(z)) + 0.3 * np.asarray(z) ** 2
    rng = np.random.default_rng(0)
    xs = np.concatenate([1 + rng.exponential(1.0, 10), -rng.exponential(1.0, 10)])
    nn = normalized_neumann(UNIT, m, u, xs)
    np.testing.assert_allclose(nn, u(xs) - extension_ratio(UNIT, m, u, xs), rtol=0, atol=1e-8)


def test_normalized_neumann_of_zero_extension():
    # u = z inside, 0 outside: N~u -> -extension, which tends to -u(b) = -1 at b+
    u = lambda z: np.where((np.asarray(z) >= 0) & (np.asarray(z) <= 1), z, 0.0)
    xs = 1 + 2.0 ** -np.arange(1, 8)
    nn = normalized_neumann(UNIT, HALF, u, xs)
    np.testing.assert_allclose(nn, -extension_ratio(UNIT, HALF, ident, xs), atol=1e-8)
    assert np.all(np.diff(np.abs(nn + 1)) < 0)


def test_far_field_random_polynomials():
    rng = np.random.default_rng(5)
    for _ in range(5):
        c = rng.standard_normal(4)
        u = lambda z, c=c: np.polyval(c, z)
        lim, err = far_field_limit(UNIT, PAIR, u)
        mean = interior_mean(UNIT, u)
        assert abs(lim - mean) < 1e-3
        assert err < 1e-3


def test_far_field_raw_approach():
    # the raw value decays to the mean like 1/x
    gaps = [abs(extension_ratio(UNIT, HALF, ident, x) - 0.5) for x in (101.0, 201.0, 401.0)]
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.05)


@given(st.lists(st.floats(0.1, 5.0), min_size=3, max_size=6), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=10, deadline=None)
def test_convex_hull(coef, seed):
    # positive polynomial on [0, 1]; extension stays within its range
    u = lambda z: np.polynomial.polynomial.polyval(np.asarray(z, dtype=float), coef)
    rng = np.random.default_rng(seed)
    xs = np.concatenate([1 + rng.exponential(2.0, 100), -rng.exponential(2.0, 100)])
    v = extension_ratio(UNIT, PAIR, u, xs)
    lo, hi = u(0.0), u(1.0)
    assert np.all(v >= lo - 1e-12 * hi) and np.all(v <= hi * (1 + 1e-12))


@pytest.fixture(scope="module")
def half_system():
    return assemble(build_mesh(0, 1, 4, 16, 32), HALF, 0.0)


def test_minimality_constant(half_system):
    rep = minimality_check(np.full(len(half_system.mesh.interior), 2.0), 20, half_system, seed=3)
    assert rep.violations == 0
    assert rep.min_gap > 0
    assert rep.energy_extension == pytest.approx(0.0, abs=1e-12)


def test_minimality_linear(half_system):
    x = half_system.mesh.nodes[half_system.mesh.interior]
    rep = minimality_check(x, 100, half_system, seed=4)
    assert rep.trials == 100 and rep.violations == 0
    u = extension_field(half_system, x)
    np.testing.assert_array_equal(u[half_system.mesh.interior], x)


def test_extension_vs_schur_lift_energy():
    diffs = []
    for n in (8, 16, 32):
        sys_ = assemble(build_mesh(0, 1, 4, n, 4 * n), HALF, 0.0)
        rep = minimality_check(sys_.mesh.nodes[sys_.mesh.interior], 1, sys_)
        # the lift minimizes the discrete energy, so it can only be lower
        assert rep.energy_schur_lift <= rep.energy_extension
        diffs.append(rep.energy_extension - rep.energy_schur_lift)
    assert diffs[0] / diffs[1] > 1.8 and diffs[1] / diffs[2] > 1.8


def test_continuity_probe():
    xs, gaps = continuity_probe(lambda z: np.full_like(np.asarray(z, dtype=float), 4.0), UNIT, HALF)
    np.testing.assert_array_equal(gaps, 0.0)
    np.testing.assert_allclose(xs, 1 + 2.0 ** -np.arange(1, 13))
    for m in (HALF, PAIR):
        _, gaps = continuity_probe(ident, UNIT, m, J=12)
        assert np.all(np.diff(gaps[2:]) < 0)
        assert gaps[-1] < 1e-2
