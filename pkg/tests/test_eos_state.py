import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grpsse.eos import BarotropicEos
from grpsse.errors import DomainError, UnphysicalStateError
from grpsse.state import (
    ConservativeState,
    PrimitiveState,
    char_speeds,
    conserved,
    cons_to_prim,
    dcons_dprim,
    eigen,
    eigenvectors,
    flux_arrays,
    is_recoverable,
    prim_slopes,
    prim_to_cons,
    primitive,
    riemann_invariants,
)

SIGMA = 1.0 / math.sqrt(3.0)

rhos = st.floats(1e-8, 1e8)
vels = st.floats(-0.999, 0.999)
sigmas = st.floats(0.05, 0.95)


# -- equation of state --------------------------------------------------------------

def test_pressure_and_sound_speed():
    eos = BarotropicEos(0.5)
    assert eos.pressure(0.08) == pytest.approx(0.02)
    assert eos.sound_speed(3.0) == 0.5
    np.testing.assert_allclose(eos.sound_speed(np.ones(3)), 0.5)


@pytest.mark.parametrize("sigma", [0.0, 1.0, -0.2, 1.5])
def test_sigma_outside_unit_interval_rejected(sigma):
    with pytest.raises(DomainError):
        BarotropicEos(sigma)


def test_nonpositive_density_rejected():
    with pytest.raises(DomainError):
        BarotropicEos(0.3).pressure(-1.0)


@given(sigmas, rhos)
def test_invariant_integral_derivative(sigma, rho):
    # d/drho of the integral is c_s / (rho + p)
    eos = BarotropicEos(sigma)
    h = 1e-6 * rho
    fd = (eos.invariant_integral(rho + h) - eos.invariant_integral(rho - h)) / (2 * h)
    assert fd == pytest.approx(sigma / (rho + eos.pressure(rho)), rel=1e-6)


@given(sigmas, rhos)
def test_genuinely_nonlinear(sigma, rho):
    assert BarotropicEos(sigma).genuine_nonlinearity_margin(rho) > 0.0


# -- conservative and primitive variables ---------------------------------------------

@settings(max_examples=300)
@given(sigmas, rhos, vels)
def test_round_trip(sigma, rho, v):
    t00, t01 = conserved(rho, v, sigma)
    r2, v2 = primitive(t00, t01, sigma)
    assert r2 == pytest.approx(rho, rel=1e-12)
    assert v2 == pytest.approx(v, rel=1e-12, abs=1e-15)


def test_round_trip_arrays():
    rng = np.random.default_rng(3)
    rho = np.exp(rng.uniform(-10, 10, 1000))
    v = rng.uniform(-0.999, 0.999, 1000)
    r2, v2 = primitive(*conserved(rho, v, SIGMA), SIGMA)
    np.testing.assert_allclose(r2, rho, rtol=1e-12)
    np.testing.assert_allclose(v2, v, rtol=1e-12, atol=1e-15)


def test_value_wrappers():
    eos = BarotropicEos(SIGMA)
    s = PrimitiveState(0.3, -0.4)
    back = cons_to_prim(prim_to_cons(s, eos), eos)
    assert back.rho == pytest.approx(0.3, rel=1e-14)
    assert back.v == pytest.approx(-0.4, rel=1e-14)
    assert s.lorentz2 == pytest.approx(1.0 / 0.84)


def test_rest_state():
    t00, t01 = conserved(2.0, 0.0, SIGMA)
    assert (t00, t01) == (pytest.approx(2.0), 0.0)


@pytest.mark.parametrize("t00,t01", [(-1.0, 0.0), (1.0, 1.0), (0.0, 0.0), (1.0, -2.0)])
def test_unrecoverable_states_raise(t00, t01):
    assert not is_recoverable(t00, t01, SIGMA)
    with pytest.raises(UnphysicalStateError):
        primitive(t00, t01, SIGMA)


def test_unrecoverable_reports_index():
    t00 = np.array([1.0, 1.0, -1.0])
    t01 = np.zeros(3)
    with pytest.raises(UnphysicalStateError) as info:
        primitive(t00, t01, SIGMA, time=2.5)
    assert info.value.index == 2
    assert info.value.time == 2.5


@given(sigmas, rhos, vels)
def test_recoverable_matches_conserved_image(sigma, rho, v):
    assert is_recoverable(*conserved(rho, v, sigma), sigma)


# -- derivatives and characteristic structure ------------------------------------------

def _flux_jacobian(rho, v, sigma, h=1e-7):
    """dF/dU by finite differences in (rho, v) and the chain rule."""
    def f(x):
        return np.array(flux_arrays(x[0], x[1], sigma))

    x0 = np.array([rho, v])
    dfdv = np.column_stack([(f(x0 + h * e) - f(x0 - h * e)) / (2 * h) for e in np.eye(2)])
    dudv = np.array(dcons_dprim(rho, v, sigma))
    return dfdv @ np.linalg.inv(dudv)


def test_cons_jacobian_by_finite_differences():
    rho, v, h = 0.7, 0.35, 1e-7
    jac = np.array(dcons_dprim(rho, v, SIGMA))
    fd_rho = (np.array(conserved(rho + h, v, SIGMA)) - np.array(conserved(rho - h, v, SIGMA))) / (2 * h)
    fd_v = (np.array(conserved(rho, v + h, SIGMA)) - np.array(conserved(rho, v - h, SIGMA))) / (2 * h)
    np.testing.assert_allclose(jac, np.column_stack([fd_rho, fd_v]), rtol=1e-7)


@pytest.mark.parametrize("v", [-0.8, -0.1, 0.0, 0.5, 0.95])
def test_eigenpairs_of_flux_jacobian(v):
    rho = 1.3
    jac = _flux_jacobian(rho, v, SIGMA)
    rmat, _ = eigenvectors(v, SIGMA)
    lm, lp = char_speeds(v, 1.0, SIGMA)
    np.testing.assert_allclose(jac @ rmat[:, 0], lm * rmat[:, 0], atol=1e-7)
    np.testing.assert_allclose(jac @ rmat[:, 1], lp * rmat[:, 1], atol=1e-7)


@given(sigmas, vels)
def test_eigenvector_inverse_identity(sigma, v):
    rmat, rinv = eigenvectors(v, sigma)
    np.testing.assert_allclose(rinv @ rmat, np.eye(2), atol=1e-12 * np.abs(rinv).max() * np.abs(rmat).max())


def test_eigen_wrapper_scales_speeds_by_metric():
    eos = BarotropicEos(SIGMA)
    dec = eigen(PrimitiveState(1.0, 0.2), 0.64, 1.0, eos)
    lm, lp = char_speeds(0.2, 0.8, SIGMA)
    assert dec.lambda_minus == pytest.approx(lm)
    assert dec.lambda_plus == pytest.approx(lp)
    np.testing.assert_allclose(dec.r_inverse @ dec.r_matrix, np.eye(2), atol=1e-12)


def test_prim_slopes_inverts_chain_rule():
    rho, v = 0.4, -0.6
    (j00, j01), (j10, j11) = dcons_dprim(rho, v, SIGMA)
    d_rho, d_v = 1.7, -0.3
    dt00, dt01 = j00 * d_rho + j01 * d_v, j10 * d_rho + j11 * d_v
    assert prim_slopes(rho, v, dt00, dt01, SIGMA) == (pytest.approx(d_rho), pytest.approx(d_v))


def test_riemann_invariants():
    eos = BarotropicEos(SIGMA)
    pm, pp = riemann_invariants(PrimitiveState(math.e, 0.0), eos)
    k = SIGMA / (1 + SIGMA ** 2)
    assert pm == pytest.approx(k)
    assert pp == pytest.approx(-k)


def test_conservative_state_array():
    np.testing.assert_array_equal(ConservativeState(1.0, 2.0).as_array(), [1.0, 2.0])
