import math

import numpy as np
import pytest
from scipy import integrate

from fracneumann.errors import MeasureError
from fracneumann.kernel import (KernelContext, c_ns, extension_ratio, graded_rule,
                                neumann_residual, superposed_weight, w_s_omega)
from fracneumann.measure import from_atoms, zero_measure
from oracles import c_ns_mp

UNIT = KernelContext(0.0, 1.0)
HALF = from_atoms([(0.5, 1.0)])


def test_constant_closed_forms():
    assert c_ns(1, 0.5) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    assert c_ns(1, 0.25) == pytest.approx(2 ** -0.5 / (4 * math.sqrt(math.pi)), abs=1e-15)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("s", [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
def test_constant_matches_literal_gamma_formula(N, s):
    assert c_ns(N, s) == pytest.approx(c_ns_mp(N, s), rel=1e-13)


def test_constant_positive_on_grid():
    for N in (1, 2, 3):
        assert all(c_ns(N, s) > 0 for s in np.linspace(0.001, 0.999, 100))


def test_constant_rejects_order():
    for s in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            c_ns(1, s)


def test_context_validation():
    with pytest.raises(ValueError):
        KernelContext(1.0, 1.0)
    with pytest.raises(ValueError):
        KernelContext(0.0, 1.0, N=0)


def test_w_s_omega_values():
    assert w_s_omega(UNIT, 0.5, 2.0) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    ref, _ = integrate.quad(lambda y: c_ns(1, 0.25) * (2 - y) ** -1.5, 0, 1, epsabs=0, epsrel=1e-13)
    assert w_s_omega(UNIT, 0.25, 2.0) == pytest.approx(ref, rel=1e-12)
    assert w_s_omega(UNIT, 0.25, 2.0) == pytest.approx(0.0584, abs=1e-4)
    # mirror image
    assert w_s_omega(UNIT, 0.3, -1.0) == pytest.approx(w_s_omega(UNIT, 0.3, 2.0), rel=1e-14)
    assert w_s_omega(UNIT, 0.3, 1e8) < 1e-8


def test_w_s_omega_decreasing():
    xs = 1.0 + 0.1 * np.arange(1, 51)
    for s in (0.1, 0.5, 0.9):
        assert np.all(np.diff(w_s_omega(UNIT, s, xs)) < 0)


def test_interior_points_rejected():
    for fn in (lambda x: w_s_omega(UNIT, 0.5, x),
               lambda x: extension_ratio(UNIT, HALF, lambda z: z, x),
               lambda x: neumann_residual(UNIT, HALF, lambda z: z, x)):
        for x in (0.0, 0.5, 1.0):
            with pytest.raises(ValueError):
                fn(x)


def test_empty_measure_rejected():
    with pytest.raises(MeasureError):
        extension_ratio(UNIT, zero_measure(), lambda z: z, 2.0)


def test_extension_of_constant_exact():
    for x in (1.0001, 2.0, -5.0, 300.0):
        assert extension_ratio(UNIT, HALF, lambda z: 3.0 + 0 * z, x) == 3.0


def test_extension_linear_closed_form():
    assert extension_ratio(UNIT, HALF, lambda z: z, 2.0) == pytest.approx(2 * (1 - math.log(2)), abs=1e-13)


def test_extension_tends_to_mean():
    gaps = [abs(extension_ratio(UNIT, HALF, lambda z: z, x) - 0.5) for x in (10.0, 100.0, 1000.0)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 2e-4


def test_extension_convex_hull():
    rng = np.random.default_rng(3)
    m = from_atoms([(0.2, 1.0), (0.8, 0.3)])
    for _ in range(10):
        c = rng.standard_normal(5)
        u = lambda z, c=c: np.polyval(c, z)
        zz = np.linspace(0, 1, 4001)
        lo, hi = u(zz).min(), u(zz).max()
        xs = np.concatenate([1 + rng.exponential(1.0, 10), -rng.exponential(1.0, 10)])
        v = extension_ratio(UNIT, m, u, xs)
        assert np.all(v >= lo - 1e-9) and np.all(v <= hi + 1e-9)


def test_neumann_residual_constant_and_linear():
    assert neumann_residual(UNIT, HALF, lambda z: 7.0 + 0 * z, 2.5) == 0.0
    u = lambda z: np.where((z >= 0) & (z <= 1), z, 0.0)
    assert neumann_residual(UNIT, HALF, u, 2.0) == pytest.approx(-c_ns(1, 0.5) * (1 - math.log(2)), rel=1e-12)


def test_neumann_residual_of_extension_vanishes():
    m = from_atoms([(0.3, 1.0), (0.6, 2.0)])
    u0 = lambda z: np.sin(3 * z) + z ** 2
    for x in (1.01, 1.5, 4.0, -0.3, -7.0):
        ut = extension_ratio(UNIT, m, u0, x)
        glob = lambda z, x=x, ut=ut: np.where(np.asarray(z) == x, ut, u0(np.asarray(z)))
        res = neumann_residual(UNIT, m, glob, x)
        assert abs(res) <= 1e-8 * superposed_weight(UNIT, m, x)


def test_residual_of_extension_converges_with_depth():
    # extension fixed from a deep rule; residual re-evaluated with shallower rules
    rng = np.random.default_rng(11)
    m = from_atoms([(0.4, 1.0), (0.7, 0.5)])
    x = 1.02
    for _ in range(10):
        c = rng.standard_normal(4)
        u0 = lambda z, c=c: np.polyval(c, z)
        ut = extension_ratio(UNIT, m, u0, x, min_depth=48)
        glob = lambda z, ut=ut: np.where(np.asarray(z) > 1, ut, u0(np.asarray(z)))
        errs = [abs(neumann_residual(UNIT, m, glob, x, min_depth=d)) / superposed_weight(UNIT, m, x)
                for d in (1, 2, 4, 8, 16)]
        assert all(e2 <= e1 + 1e-15 for e1, e2 in zip(errs, errs[1:]))
        assert errs[-1] < 1e-12


def test_graded_rule_integrates_polynomials():
    for x in (1.3, -0.01):
        z, w = graded_rule(UNIT, x)
        assert w.sum() == pytest.approx(1.0, rel=1e-14)
        assert w @ z ** 5 == pytest.approx(1 / 6, rel=1e-13)
