import math

import numpy as np
import pytest

from grpsse.errors import DomainError, HorizonError
from grpsse.metric import MetricSlice, check_horizon, full_step, half_step
from grpsse.problems import (
    KAPPA_GR,
    PROBLEMS,
    SIGMA_RAD,
    accretion_exact,
    frw1_exact,
    get_problem,
    matched_parameters,
    tov_exact,
)
from grpsse.state import conserved, flux_arrays, source_vector, stress11

SMOOTH = ["frw1", "frw2", "tov", "accretion"]


def _exact(name):
    p = get_problem(name)
    return p, (p.t_start if name != "accretion" else 0.0)


# -- exact solutions -------------------------------------------------------------------

@pytest.mark.parametrize("name", SMOOTH)
def test_exact_solutions_satisfy_the_balance_law(name):
    p, t = _exact(name)
    r, h = np.array([3.5, 5.0, 6.5]), 1e-4

    def u(t, r):
        rho, v, _, _ = p.exact(t, r)
        return np.array(conserved(rho, v, p.sigma))

    def mf(t, r):
        rho, v, a, b = p.exact(t, r)
        return np.sqrt(a * b) * np.array(flux_arrays(rho, v, p.sigma))

    u_t = (u(t + h, r) - u(t - h, r)) / (2 * h)
    f_r = (mf(t, r + h) - mf(t, r - h)) / (2 * h)
    rho, v, a, b = p.exact(t, r)
    s = np.array(source_vector(r, a, b, rho, v, p.sigma, p.kappa))
    scale = np.abs(u_t) + np.abs(f_r) + np.abs(s) + 1e-300
    assert np.max(np.abs(u_t + f_r - s) / scale) < 1e-7


@pytest.mark.parametrize("name", ["frw1", "frw2", "tov"])
def test_exact_solutions_satisfy_the_field_equations(name):
    p, t = _exact(name)
    r, h = np.array([3.5, 5.0, 6.5]), 1e-5
    rho, v, a, b = p.exact(t, r)
    t00, t01 = conserved(rho, v, p.sigma)
    t11 = stress11(rho, v, p.sigma)
    k = p.kappa
    a_r = (p.exact(t, r + h)[2] - p.exact(t, r - h)[2]) / (2 * h)
    lnb_r = (np.log(p.exact(t, r + h)[3]) - np.log(p.exact(t, r - h)[3])) / (2 * h)
    a_t = (p.exact(t + h, r)[2] - p.exact(t - h, r)[2]) / (2 * h)
    np.testing.assert_allclose(a_r, (1 - a) / r - k * r * t00, rtol=1e-6, atol=1e-12)
    np.testing.assert_allclose(lnb_r, (1 - a) / (a * r) + k * r * t11 / a, rtol=1e-6, atol=1e-12)
    np.testing.assert_allclose(a_t, k * r * np.sqrt(a * b) * t01, rtol=1e-6, atol=1e-12)


def test_frw1_alternative_density_form():
    r, t = np.array([3.0, 5.0]), 15.0
    rho, v, _, _ = frw1_exact(t, r)
    np.testing.assert_allclose(rho, 3 * v * v / (KAPPA_GR * r * r), rtol=1e-14)


def test_tov_is_static_with_power_law_b():
    r = np.array([2.0, 4.0])
    rho1, v1, a1, b1 = tov_exact(0.0, r)
    rho2, *_ = tov_exact(100.0, r)
    np.testing.assert_array_equal(rho1, rho2)
    assert np.all(v1 == 0.0)
    s2 = SIGMA_RAD ** 2
    assert b1[1] / b1[0] == pytest.approx(2.0 ** (4 * s2 / (1 + s2)))


def test_accretion_is_supersonic_infall_with_constant_mass_flux():
    r = np.linspace(2.2, 20.2, 9)
    rho, v, a, b = accretion_exact(0.0, r)
    assert np.all(v < 0.0) and np.all(np.abs(v) > 0.1)
    np.testing.assert_allclose(a, 1 - 2 / r)
    # sqrt(AB) T01 r^2 is constant for a steady flow with kappa = 0
    _, t01 = conserved(rho, v, 0.1)
    flux = a * t01 * r * r
    np.testing.assert_allclose(flux, flux[0], rtol=1e-10)


def test_exact_evaluators_reject_bad_domains():
    with pytest.raises(DomainError):
        frw1_exact(1.0, np.array([2.0]))
    with pytest.raises(DomainError):
        accretion_exact(0.0, np.array([1.5]))


def test_matched_models_have_continuous_metric():
    v0, t0, b0 = matched_parameters()
    r0 = 5.0
    rho_l, v_l, a_l, b_l = frw1_exact(t0, np.array([r0]))
    rho_r, v_r, a_r, b_r = tov_exact(t0, np.array([r0]), b0=b0)
    assert rho_l[0] > rho_r[0] and v_r[0] == 0.0
    assert v_l[0] == pytest.approx(v0, rel=1e-12)
    assert a_l[0] == pytest.approx(a_r[0], rel=1e-12)
    assert b_l[0] == pytest.approx(b_r[0], rel=1e-12)


def test_problem_catalogue():
    assert set(PROBLEMS) == {"accretion", "frw1", "frw2", "tov", "shock", "timereversal"}
    tr = get_problem("timereversal")
    assert tr.t_start < 0 and tr.t_end == pytest.approx(tr.t_start + 1.0)
    assert get_problem("frw1", t_end=15.5).t_end == 15.5
    with pytest.raises(KeyError):
        get_problem("nope")


# -- metric integration ------------------------------------------------------------------

def _frw1_metric_errors(n):
    p = get_problem("frw1")
    t = p.t_start
    r = np.linspace(p.r_min, p.r_max, n + 1)
    dr = r[1] - r[0]
    # cell averages by 5-point Gauss quadrature
    x, w = np.polynomial.legendre.leggauss(5)
    rc = 0.5 * (r[:-1] + r[1:])
    pts = rc[:, None] + 0.5 * dr * x[None, :]
    rho, v, _, _ = p.exact(t, pts.ravel())
    t00, _ = conserved(rho, v, p.sigma)
    t11 = stress11(rho, v, p.sigma)
    t00c = (t00.reshape(pts.shape) * w).sum(axis=1) / 2
    t11c = (t11.reshape(pts.shape) * w).sum(axis=1) / 2
    met = full_step(r, t00c, t11c, p.kappa, p.metric_seed(t))
    _, _, a, b = p.exact(t, r)
    return np.max(np.abs(met.a - a)), np.max(np.abs(met.b - b) / b)


def test_full_step_is_second_order():
    e1 = _frw1_metric_errors(50)
    e2 = _frw1_metric_errors(100)
    for x, y in zip(e1, e2):
        assert math.log2(x / y) > 1.9


def test_half_step_advances_mass_consistently():
    p = get_problem("frw1")
    t, dt = p.t_start, 1e-3
    r = np.linspace(p.r_min, p.r_max, 41)
    rho, v, a, b = p.exact(t, r)
    m0 = r * (1 - a) / 2
    met = MetricSlice.from_mass(m0, np.log(b), r)
    _, t01 = conserved(rho, v, p.sigma)
    rho_h, v_h, a_h, b_h = p.exact(t + dt / 2, r)
    new = half_step(met, t01, stress11(rho_h, v_h, p.sigma), dt, p.kappa, seed=p.metric_seed(t + dt / 2))
    np.testing.assert_allclose(new.a, a_h, atol=1e-8)
    np.testing.assert_allclose(new.b, b_h, rtol=1e-5)


def test_horizon_is_flagged():
    with pytest.raises(HorizonError):
        check_horizon(np.array([0.5, -0.1]), np.zeros(2), time=1.0)
    with pytest.raises(HorizonError):
        MetricSlice.from_mass(np.array([3.0]), np.array([0.0]), np.array([4.0]))


def test_metric_slice_helpers():
    r = np.array([1.0, 2.0])
    met = MetricSlice.from_mass(np.array([0.25, 0.5]), np.log([1.0, 4.0]), r)
    np.testing.assert_allclose(met.a, [0.5, 0.5])
    np.testing.assert_allclose(met.lapse_factor, np.sqrt([0.5, 2.0]))
    a_c, b_c = met.cell_average()
    assert a_c[0] == pytest.approx(0.5) and b_c[0] == pytest.approx(2.5)
