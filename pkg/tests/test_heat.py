import math

import numpy as np
import pytest
import scipy.linalg as sla

from fracneumann.assembly import assemble
from fracneumann.elliptic import schur_interior_operator
from fracneumann.heat import HeatStepper, evolve, step, trace_csv
from fracneumann.measure import from_atoms, zero_measure
from fracneumann.mesh import build_mesh
from fracneumann.spectral import eigenpairs

PAIR = from_atoms([(0.5, 1.0), (0.25, 1.0)])


@pytest.fixture(scope="module")
def pair_system():
    return assemble(build_mesh(0, 1, 10, 32, 16), PAIR, 0.5)


def test_constant_is_stationary(pair_system):
    ni = len(pair_system.mesh.interior)
    for scheme in ("implicit-euler", "crank-nicolson"):
        u = step(pair_system, np.full(ni, 1.75), 0.05, scheme)
        np.testing.assert_allclose(u, 1.75, rtol=1e-13)


def test_single_step_conserves_mass(pair_system):
    st = HeatStepper(pair_system, 0.01, "crank-nicolson")
    u = np.random.default_rng(0).standard_normal(len(pair_system.mesh.interior))
    assert st.mass(st.step(u)) == pytest.approx(st.mass(u), abs=1e-12 * np.abs(u).sum())


def test_bad_arguments(pair_system):
    with pytest.raises(ValueError):
        HeatStepper(pair_system, 0.0)
    with pytest.raises(ValueError):
        HeatStepper(pair_system, 0.1, "forward-euler")
    with pytest.raises(ValueError):
        evolve(pair_system, np.zeros(33), 0.1, 0.0)


def test_classical_cosine_decay():
    errs = []
    for n, dt in ((16, 4e-3), (32, 1e-3), (64, 2.5e-4)):
        mesh = build_mesh(0, 1, 10, n, 8)
        sys_ = assemble(mesh, zero_measure(), 1.0)
        i = mesh.interior
        x = mesh.nodes[i]
        tr = evolve(sys_, np.cos(math.pi * x), dt, 0.1)
        d = tr.final[i] - math.exp(-math.pi ** 2 * 0.1) * np.cos(math.pi * x)
        errs.append(math.sqrt(d @ sys_.M[np.ix_(i, i)] @ d))
    # h^2 + dt with dt ~ h^2: error quarters per refinement
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    np.testing.assert_allclose(ratios, 4.0, rtol=0.1)
    assert errs[-1] < 1e-3


def test_mass_conserved_over_many_steps(pair_system):
    u0 = np.random.default_rng(1).standard_normal(len(pair_system.mesh.interior))
    tr = evolve(pair_system, u0, 1e-3, 1.0)
    assert len(tr.times) == 1001
    size = pair_system.M.sum(axis=1)[pair_system.mesh.interior] @ np.abs(u0)
    assert np.abs(tr.mass - tr.mass[0]).max() < 1e-10 * size


@pytest.mark.parametrize("dt", [1e-3, 1e-1, 10.0])
def test_implicit_euler_monotone_for_any_dt(pair_system, dt):
    u0 = np.random.default_rng(2).standard_normal(len(pair_system.mesh.interior))
    tr = evolve(pair_system, u0, dt, 20 * dt)
    # slack: after a few huge steps u is constant up to roundoff, and
    # the quadratic diagnostics jitter at eps times their initial size
    assert np.all(np.diff(tr.deviation) <= 1e-12 * tr.deviation[:-1] + 1e-14 * tr.deviation[0])
    assert np.all(np.diff(tr.energy) <= 1e-12 * tr.energy[:-1] + 1e-14 * tr.energy[0])


def test_crank_nicolson_energy_below_stability_limit(pair_system):
    At, _ = schur_interior_operator(pair_system)
    i = pair_system.mesh.interior
    lam_max = sla.eigh(At, pair_system.M[np.ix_(i, i)], eigvals_only=True)[-1]
    u0 = np.random.default_rng(3).standard_normal(len(i))
    for dt in (2.0 / lam_max, 0.5 / lam_max):
        tr = evolve(pair_system, u0, dt, 50 * dt, "crank-nicolson")
        assert np.all(np.diff(tr.energy) <= 1e-12 * tr.energy[:-1])
        assert np.all(np.diff(tr.mass) == pytest.approx(0.0, abs=1e-12 * np.abs(u0).sum()))


def test_crank_nicolson_second_order(pair_system):
    # smooth data in the discrete sense: stiff modes would not be damped by CN
    V = eigenpairs(pair_system, 4).modes
    u0 = V[:, 1] + 0.5 * V[:, 2] - 0.25 * V[:, 3]
    finals = [evolve(pair_system, u0, dt, 0.2, "crank-nicolson").final for dt in (0.02, 0.01, 0.005)]
    d1 = np.abs(finals[0] - finals[1]).max()
    d2 = np.abs(finals[1] - finals[2]).max()
    assert d1 / d2 == pytest.approx(4.0, rel=0.1)


@pytest.mark.parametrize("scheme", ["implicit-euler", "crank-nicolson"])
def test_decay_rate_of_second_mode(pair_system, scheme):
    dec = eigenpairs(pair_system, 2)
    lam2 = dec.lambdas[1]
    u0 = 0.3 + dec.modes[:, 1]
    dt = 0.01 / lam2
    tr = evolve(pair_system, u0, dt, 2.0 / lam2, scheme)
    rate = -np.polyfit(tr.times, np.log(tr.deviation), 1)[0]
    assert rate == pytest.approx(2 * lam2, rel=0.05)


def test_converges_to_mean(pair_system):
    lam2 = eigenpairs(pair_system, 2).lambdas[1]
    i = pair_system.mesh.interior
    u0 = np.random.default_rng(4).standard_normal(len(i))
    c = pair_system.M.sum(axis=1)[i]
    mean = c @ u0 / c.sum()
    tr = evolve(pair_system, u0, 0.1 / lam2, 20.0 / lam2)
    assert np.abs(tr.final - mean).max() < 1e-4
    assert tr.deviation[-1] <= math.exp(-2 * lam2 * tr.times[-1]) * tr.deviation[0] * 1.05


def test_trace_csv(pair_system):
    tr = evolve(pair_system, np.zeros(len(pair_system.mesh.interior)), 0.1, 0.2)
    lines = trace_csv(tr).splitlines()
    assert lines[0] == "t,mass,energy,deviation"
    assert len(lines) == 4
