import math

import numpy as np
import pytest

from twomode.analytic import coincidence_closed_form
from twomode.fock import FockSpace, basis_state, projector, trace_distance
from twomode.params import ModelParams
from twomode.propagator import (
    MAX_CONDITION,
    PropagationPlan,
    evolve_exact,
    evolve_pure_nonhermitian,
    needs_fallback,
    u_z,
)
from twomode.states import dm, random_density
from twomode.validation import ep_continuity_defects

def _physical(m, space):
    keep = space.sector_mask(space.n_max + 1)
    return m[np.ix_(keep, keep)]


REGIMES = [
    ModelParams(1.0, 0.75, 0.0),
    ModelParams(1.0, 0.3, 0.9),
    ModelParams(1.0, 2.0, 0.0),
    ModelParams(1.0, 2.5, 0.0),
    ModelParams(1.0, 0.1, 3.0),
]


def test_u_examples(space4):
    p = ModelParams(1.0, 0.4, 0.1)
    np.testing.assert_array_equal(u_z(p, space4, 0.0), np.eye(space4.dim))
    u = u_z(ModelParams(1.0), space4, 1.7)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(space4.dim), atol=1e-10)


def test_hom_amplitude(space4):
    g = 1.3
    u = u_z(ModelParams(g), space4, math.pi / (4 * g))
    i = space4.index(1, 1)
    assert abs(u[i, i]) ** 2 <= 1e-10
    z = 0.37
    p = ModelParams(g, 0.2, 0.6)
    amp = u_z(p, space4, z)[i, i]
    assert abs(amp) ** 2 == pytest.approx(coincidence_closed_form(p, z), abs=1e-12)


@pytest.mark.parametrize("p", [ModelParams(1.0, 0.3, 0.9), ModelParams(1.0, 2.5, 0.0)])
def test_r_path_matches_direct_exponential(space6, p):
    assert not needs_fallback(p, space6)
    for z in (0.1, 1.0, 3.0):
        a, b = u_z(p, space6, z, fallback=False), u_z(p, space6, z, fallback=True)
        # sectors above n_max are truncated and never populated
        assert np.max(np.abs(_physical(a - b, space6))) <= 1e-10


def test_fallback_switch_continuity(space6):
    # just inside and just outside the conditioning limit
    limit = math.tanh(math.log(MAX_CONDITION) / space6.n_max)
    inside = ModelParams(1.0, 0.0, 2.0 * limit * (1 - 1e-3))
    outside = ModelParams(1.0, 0.0, 2.0 * limit * (1 + 1e-3))
    assert not needs_fallback(inside, space6)
    assert needs_fallback(outside, space6)
    for z in (0.5, 2.0):
        a, b = u_z(inside, space6, z), u_z(inside, space6, z, fallback=True)
        assert np.max(np.abs(_physical(a - b, space6))) <= 1e-8


def test_fallback_used_at_ep(space4):
    assert PropagationPlan(ModelParams(1.0, 2.0), space4).ep_fallback
    assert not PropagationPlan(ModelParams(1.0, 0.75), space4).ep_fallback


def test_ep_continuity(space6):
    z = np.linspace(0.0, 3.0, 16)
    d = ep_continuity_defects(1.0, space6, z)
    assert d["EP continuity (matrix)"] <= 1e-4
    assert d["EP continuity (closed form)"] <= 1e-4


def test_evolve_examples(space4, rng):
    p = ModelParams(1.0, 0.75, 0.2)
    rho0 = random_density(space4, rng, rank=2, max_total=3)
    np.testing.assert_allclose(evolve_exact(rho0, p, space4, 0.0), rho0, atol=1e-14)
    for z in (0.0, 0.5, 4.0):
        np.testing.assert_allclose(evolve_exact(projector(0, 0, space4), p, space4, z), projector(0, 0, space4), atol=1e-14)


@pytest.mark.parametrize("gamma_a", [0.3, 1.0, 2.2])
def test_single_mode_decay(space2, gamma_a):
    p = ModelParams(0.0, gamma_a, 0.0)
    for z in (0.1, 0.8, 2.5):
        decay = math.exp(-2 * gamma_a * z)
        want = decay * projector(1, 0, space2) + (1 - decay) * projector(0, 0, space2)
        np.testing.assert_allclose(evolve_exact(projector(1, 0, space2), p, space2, z), want, atol=1e-14)


@pytest.mark.parametrize("p", REGIMES)
def test_semigroup(space4, rng, p):
    rho0 = random_density(space4, rng, rank=2, max_total=3)
    z1, z2 = 0.6, 1.1
    once = evolve_exact(rho0, p, space4, z1 + z2)
    twice = evolve_exact(evolve_exact(rho0, p, space4, z1), p, space4, z2)
    assert trace_distance(once, twice) <= 1e-8


def test_truncation_leaks_nothing(space4, rng):
    p = ModelParams(1.0, 0.4, 0.0)
    rho0 = random_density(space4, rng, rank=2)  # support up to 4 + 4 photons
    rho0[~space4.sector_mask(space4.n_max + 1), :] = 0
    rho0[:, ~space4.sector_mask(space4.n_max + 1)] = 0
    rho0 /= np.trace(rho0)
    rho = evolve_exact(rho0, p, space4, 2.0)
    top = ~space4.sector_mask(space4.n_max + 1)
    assert not np.any(rho[top, :]) and not np.any(rho[:, top])


def test_unphysical_input_rejected(space2):
    with pytest.raises(ValueError, match="normalized"):
        evolve_exact(2 * projector(1, 1, space2), ModelParams(1.0), space2, 1.0)
    with pytest.raises(ValueError, match="support"):
        evolve_exact(projector(2, 2, space2), ModelParams(1.0), space2, 1.0)
    with pytest.raises(ValueError):
        evolve_exact(np.eye(4) / 4, ModelParams(1.0), space2, 1.0)


def test_grid_validation(space2):
    with pytest.raises(ValueError):
        PropagationPlan(ModelParams(1.0), space2, [0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        PropagationPlan(ModelParams(1.0), space2, [-0.5, 1.0])


def test_plan_run_matches_single_points(space4, rng):
    p = ModelParams(1.0, 2.5, 0.0)
    rho0 = random_density(space4, rng, max_total=2)
    zs = np.linspace(0.0, 2.0, 5)
    for z, rho in zip(zs, PropagationPlan(p, space4, zs).run(rho0)):
        np.testing.assert_allclose(rho, evolve_exact(rho0, p, space4, float(z)), atol=1e-14)


def test_pure_nonhermitian(space4):
    psi0 = (basis_state(1, 0, space4) + basis_state(1, 1, space4)) / math.sqrt(2)
    np.testing.assert_array_equal(evolve_pure_nonhermitian(psi0, ModelParams(1.0, 0.5), space4, 0.0), psi0)
    norms = [np.linalg.norm(evolve_pure_nonhermitian(psi0, ModelParams(1.0, 0.5, 0.2), space4, z)) for z in np.linspace(0, 3, 31)]
    assert all(b <= a + 1e-14 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < norms[0]
    for z in np.linspace(0, 3, 7):
        assert np.linalg.norm(evolve_pure_nonhermitian(psi0, ModelParams(1.0), space4, z)) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        evolve_pure_nonhermitian(np.ones(3), ModelParams(1.0), space4, 1.0)


def test_no_jump_probability(space4):
    # the two-photon sector is reached only by jump-free histories, so its
    # population equals the squared norm of the no-jump state
    p = ModelParams(1.0, 0.75, 0.0)
    psi0 = basis_state(1, 1, space4)
    for z in (0.3, 0.9, 2.0):
        psi = evolve_pure_nonhermitian(psi0, p, space4, z)
        rho = evolve_exact(dm(psi0), p, space4, z)
        two = np.flatnonzero(space4.total_number == 2)
        assert np.trace(rho[np.ix_(two, two)]).real == pytest.approx(np.vdot(psi, psi).real, abs=1e-13)
