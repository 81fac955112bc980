import cmath
import math

import numpy as np
import pytest

from twomode import effective as eff
from twomode.errors import ExceptionalPointError
from twomode.fock import FockSpace, basis_state
from twomode.params import ModelParams, Phase
from twomode.validation import algebra_defects, spectral_defects

BELOW = [ModelParams(1.0), ModelParams(1.0, 0.75, 0.0), ModelParams(1.0, 0.2, 1.1), ModelParams(2.0, 0.5, 0.5)]
ABOVE = [ModelParams(1.0, 2.5, 0.0), ModelParams(1.0, 0.1, 3.0), ModelParams(0.5, 0.0, 4.0)]


def _below_cutoff(m, space):
    keep = space.sector_mask(space.n_max)
    return m[np.ix_(keep, keep)]


def test_regime_classification():
    assert ModelParams(1.0, 0.75).regime.tag is Phase.BELOW_EP
    assert ModelParams(1.0, 0.75).regime.omega == pytest.approx(math.sqrt(4 - 0.75**2))
    assert ModelParams(1.0, 2.0).regime.tag is Phase.AT_EP
    assert ModelParams(1.0, 2.0 * (1 + 2e-10)).regime.tag is Phase.AT_EP
    assert ModelParams(1.0, 2.0 * (1 + 1e-8)).regime.tag is Phase.ABOVE_EP
    assert ModelParams(1.0, 2.5).regime.tag is Phase.ABOVE_EP
    assert ModelParams(1.0, 2.5).regime.omega == pytest.approx(1.5)
    assert ModelParams(1.0, 0.0, 2.0).regime.tag is Phase.AT_EP


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(-1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, -0.1)
    with pytest.raises(ValueError):
        ModelParams(1.0, math.nan)
    p = ModelParams(1.0, 0.3, 0.9)
    assert p.gamma == 0.3 + 0.9 and p.delta == 0.9 - 0.3


def test_h_eff_examples(space4):
    lossless = eff.h_eff(ModelParams(1.0), space4)
    np.testing.assert_array_equal(lossless, lossless.conj().T)
    p = ModelParams(1.3, 0.4, 0.0)
    h = eff.h_eff(p, space4)
    assert h[space4.index(1, 0), space4.index(0, 1)] == pytest.approx(1.3)
    assert h[space4.index(1, 0), space4.index(1, 0)] == pytest.approx(-0.4j)
    uncoupled = eff.h_eff(ModelParams(0.0, 0.4, 0.1), space4)
    np.testing.assert_array_equal(uncoupled, np.diag(np.diag(uncoupled)))


def test_h_eff_constructions_agree(space4, rng):
    for _ in range(20):
        g, ga, gb = rng.uniform(0.1, 3.0), rng.uniform(0, 3), rng.uniform(0, 3)
        p = ModelParams(g, ga, gb)
        assert np.max(np.abs(eff.h_eff(p, space4) - eff.h_eff_rewritten(p, space4))) <= 1e-14


def test_schwinger_algebra(space4, rng):
    d = algebra_defects(space4, rng, n_random=50)
    for name in ("[Jx, Jy] - i Jz", "[Jy, Jz] - i Jx", "[Jz, Jx] - i Jy", "[N, J]"):
        assert d[name] <= 1e-12, name
    ops = eff.schwinger_ops(space4)
    np.testing.assert_allclose(ops.Jz @ basis_state(1, 0, space4), -0.5 * basis_state(1, 0, space4))


def test_eta_examples():
    assert eff.eta(ModelParams(1.0, 0.0, 4.0)) == pytest.approx(math.atanh(0.5))
    assert eff.eta(ModelParams(1.0, 0.0, 4.0)) == pytest.approx(0.549306, abs=1e-6)
    e0 = eff.eta(ModelParams(1.0, 0.5, 0.5))
    assert abs(cmath.cosh(e0)) <= 1e-15
    assert e0 == pytest.approx(-0.5j * math.pi)  # branch choice, see module docstring
    with pytest.raises(ExceptionalPointError, match="exceptional point"):
        eff.eta(ModelParams(1.0, 0.0, 2.0))


@pytest.mark.parametrize("p", BELOW + ABOVE)
def test_eta_balance_and_tanh(p):
    e = eff.eta(p)
    assert eff.eta_balance_residual(e, p) <= 1e-12 * max(p.max_rate, 1.0)
    if p.delta != 0:
        assert abs(cmath.tanh(e) - 2 * p.g / p.delta) <= 1e-12 * abs(2 * p.g / p.delta)


def test_r_transform_identities(space4, rng):
    np.testing.assert_allclose(eff.r_transform(0.0, space4), np.eye(space4.dim), atol=0)
    d = algebra_defects(space4, rng, n_random=50)
    assert d["R^-1 Jz R identity"] <= 1e-10
    assert d["R^-1 Jx R identity"] <= 1e-10


def test_r_on_two_photons(space4):
    # direct ladder algebra: cosh(eta)|1,1> + i sinh(eta)/sqrt2 (|2,0> - |0,2>)
    e = 0.4 - 0.9j
    v = eff.r_transform(e, space4) @ basis_state(1, 1, space4)
    s = 1j * cmath.sinh(e) / math.sqrt(2)
    assert v[space4.index(1, 1)] == pytest.approx(cmath.cosh(e), abs=1e-14)
    assert v[space4.index(2, 0)] == pytest.approx(s, abs=1e-14)
    assert v[space4.index(0, 2)] == pytest.approx(-s, abs=1e-14)


@pytest.mark.parametrize("p", BELOW + ABOVE)
def test_similarity_and_spectrum(space6, p):
    d = spectral_defects(p, space6, max_total=4)
    assert d["similarity R^-1 H R - H_diag"] <= 1e-9
    assert d["right eigen-residual"] <= 1e-9
    assert d["left eigen-residual"] <= 1e-9
    assert d["bi-orthogonality"] <= 1e-10


def test_h_diag_examples(space4):
    hd = eff.h_diag(ModelParams(1.0), space4)
    np.testing.assert_array_equal(hd, np.diag(np.diag(hd)))
    assert hd[space4.index(0, 1), space4.index(0, 1)] == pytest.approx(1.0)
    p = ModelParams(1.0, 0.3, 0.0)
    hd = eff.h_diag(p, space4)
    for i in range(space4.dim):
        assert hd[i, i] == eff.eigenvalue(*space4.occupations(i), p)
    with pytest.raises(ExceptionalPointError):
        eff.h_diag(ModelParams(1.0, 2.0), space4)


def test_eigenvalue_examples(space4):
    for p in BELOW + ABOVE + [ModelParams(1.0, 2.0)]:
        assert eff.eigenvalue(0, 0, p) == 0
    lossless = ModelParams(1.0)
    assert eff.eigenvalue(1, 0, lossless) == pytest.approx(-1.0)
    assert eff.eigenvalue(0, 1, lossless) == pytest.approx(1.0)
    h = eff.h_eff(lossless, space4)
    for j, k in ((1, 0), (0, 1)):
        v = eff.right_eigenvector(j, k, lossless, space4)
        assert np.linalg.norm(h @ v - eff.eigenvalue(j, k, lossless) * v) <= 1e-12
    ep = ModelParams(1.0, 2.0)
    assert eff.eigenvalue(1, 0, ep) == eff.eigenvalue(0, 1, ep) == pytest.approx(-1.0j)


def test_eigenvectors(space4):
    p = ModelParams(1.0, 0.75, 0.0)
    np.testing.assert_allclose(eff.right_eigenvector(0, 0, p, space4), basis_state(0, 0, space4), atol=1e-15)
    right = eff.right_eigenvector(1, 0, p, space4)
    assert abs(np.vdot(right, right) - 1.0) > 1e-3  # not orthonormal
    for j, k in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
        left = eff.left_eigenvector(j, k, p, space4)
        for l, m in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
            want = 1.0 if (j, k) == (l, m) else 0.0
            assert abs(left @ eff.right_eigenvector(l, m, p, space4) - want) <= 1e-10
    with pytest.raises(ValueError):
        eff.right_eigenvector(3, 2, p, space4)
    with pytest.raises(ExceptionalPointError):
        eff.left_eigenvector(1, 0, ModelParams(1.0, 2.0), space4)


@pytest.mark.parametrize("p", [ModelParams(1.0, 2.0, 0.0), ModelParams(1.0, 0.0, 2.0), ModelParams(0.5, 1.3, 0.3)])
def test_ep_jordan_block(space6, p):
    d = spectral_defects(p, space6)
    assert d["EP one-photon nilpotency"] <= 1e-12
    assert d["EP block smallness"] <= 1.0
    for n in range(space6.n_max + 1):
        assert eff.jordan_block_order(p, space6, n) == n + 1


def test_jordan_order_away_from_ep(space4):
    # diagonalizable sector: H - lambda is not nilpotent
    assert eff.jordan_block_order(ModelParams(1.0, 0.5), space4, 1) == 3
    with pytest.raises(ValueError):
        eff.jordan_block_order(ModelParams(1.0, 2.0), space4, 5)
