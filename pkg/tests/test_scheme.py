import math

import numpy as np
import pytest

from grpsse import _pykernels, get_problem
from grpsse import scheme as sch
from grpsse.errors import UnphysicalStateError
from grpsse.scheme import (
    DEFAULT_CFL,
    Grid,
    RunResult,
    cell_values_of,
    cfl_dt,
    exact_cell_primitives,
    grp_step,
    initial_state,
    limit_slopes,
    minmod3,
    residual,
    run,
    solution_errors,
)
from grpsse.state import char_speeds, conserved, is_recoverable

try:
    from grpsse import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def test_grid_geometry():
    g = Grid(3.0, 7.0, 8)
    assert g.dr == 0.5
    np.testing.assert_allclose(g.faces, np.linspace(3.0, 7.0, 9))
    np.testing.assert_allclose(g.centers, 3.25 + 0.5 * np.arange(8))
    left, right = g.ghost_centers()
    np.testing.assert_allclose(left, [2.25, 2.75])
    np.testing.assert_allclose(right, [7.25, 7.75])


@pytest.mark.parametrize("args", [(0.0, 1.0, 10), (2.0, 1.0, 10), (1.0, 2.0, 3)])
def test_grid_validation(args):
    with pytest.raises(ValueError):
        Grid(*args)


def test_minmod3():
    a = np.array([1.0, -1.0, 1.0, 0.0])
    b = np.array([2.0, -3.0, -1.0, 1.0])
    c = np.array([0.5, -2.0, 1.0, 1.0])
    np.testing.assert_array_equal(minmod3(a, b, c), [0.5, -1.0, 0.0, 0.0])


def test_limiter_keeps_linear_data_and_flattens_extrema():
    sigma, dr = 0.5, 0.1
    x = np.arange(6) * dr
    rho, v = 1.0 + 0.2 * x, 0.1 + 0.05 * x
    cells = np.column_stack(conserved(rho, v, sigma))
    central = (cells[2:] - cells[:-2]) / (2 * dr)
    slopes = limit_slopes(cells, central, dr, 1.9, sigma, v[1:-1])
    np.testing.assert_allclose(slopes, central, rtol=1e-12)
    bump = cells.copy()
    bump[3] += 0.5
    central = (bump[2:] - bump[:-2]) / (2 * dr)
    slopes = limit_slopes(bump, central, dr, 1.9, sigma, v[1:-1])
    np.testing.assert_allclose(slopes[2], 0.0, atol=1e-14)


def test_limited_face_values_stay_admissible():
    rng = np.random.default_rng(2)
    sigma, dr, n = 0.5, 1.0, 2000
    rho = np.exp(rng.uniform(-8, 8, (n, 3)))
    v = rng.uniform(-0.99, 0.99, (n, 3))
    dropped = 0
    for k in range(n):
        cells = np.column_stack(conserved(rho[k], v[k], sigma))
        cand = (cells[2:] - cells[:-2]) / (2 * dr)
        s = limit_slopes(cells, cand, dr, 1.9, sigma, v[k, 1:2])
        dropped += not np.any(s)
        for face in (cells[1] - 0.5 * dr * s[0], cells[1] + 0.5 * dr * s[0]):
            assert is_recoverable(face[0], face[1], sigma)
    assert dropped > 0


def test_cell_averages_are_fourth_order_accurate():
    def fn(t, r):
        return 1.0 + r ** 3, 0.1 * r

    centers, dr = np.array([1.0]), 0.2
    cells = cell_values_of(fn, 0.0, centers, dr, 0.5, "average")
    # T00 = (1 + s2) rho W^2 - s2 rho; compare with a fine trapezoidal average
    r = np.linspace(0.9, 1.1, 20001)
    t00, _ = conserved(*fn(0.0, r), 0.5)
    assert cells[0, 0] == pytest.approx(np.trapezoid(t00, r) / dr, rel=1e-9)
    point = cell_values_of(fn, 0.0, centers, dr, 0.5, "point")
    assert point[0, 0] == pytest.approx(conserved(2.0, 0.1, 0.5)[0])


def test_residual_norm():
    old = np.zeros((4, 2))
    new = np.ones((4, 2))
    assert residual(old, new, 0.5) == 4.0


def test_final_residual_skips_clipped_steps():
    res = RunResult(None, residuals=[(1, 1e-3), (2, 1e-14), (2.5, 1e-6)], clipped=[False, False, True])
    assert res.final_residual == 1e-14


@pytest.mark.parametrize("scheme", ["grp", "godunov"])
def test_run_respects_cfl_gauge_and_stop_times(scheme):
    p = get_problem("frw1")
    g = Grid(p.r_min, p.r_max, 40)
    c = DEFAULT_CFL[scheme]
    seen = []

    def check(state, dt, res):
        rho, v = state.primitives(p.sigma)
        a, b = state.metric.cell_average()
        lm, lp = char_speeds(v, np.sqrt(a * b), p.sigma)
        assert np.max(np.maximum(abs(lm), abs(lp))) * dt / g.dr <= c + 1e-12
        assert np.all(state.metric.a > 0) and np.all(state.metric.a <= 1)
        assert np.all(state.metric.b > 0) and np.all(rho > 0) and np.all(abs(v) < 1)
        seen.append(state.time)

    out = run(p, scheme, g, 15.3, hooks=[check], snapshots=[15.1, 15.2])
    assert out.state.time == pytest.approx(15.3, abs=1e-12)
    assert any(abs(t - 15.1) < 1e-12 for t in seen)
    assert any(abs(t - 15.2) < 1e-12 for t in seen)
    assert out.steps == len(seen) == len(out.residuals)


def test_run_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        run(get_problem("frw1"), "muscl")


@pytest.mark.parametrize("name", ["frw1", "tov"])
def test_single_step_is_second_order_on_exact_data(name):
    p = get_problem(name)
    errs = []
    for n in (50, 100, 200):
        g = Grid(p.r_min, p.r_max, n)
        st = initial_state(p, g, "grp")
        dt = cfl_dt(st, p.sigma, g.dr, DEFAULT_CFL["grp"])
        new = grp_step(st, p, g, dt, sch.DEFAULT_THETA)
        exact = cell_values_of(lambda t, r: p.exact(t, r)[:2], new.time, g.centers, g.dr, p.sigma, "average")
        errs.append(np.max(np.abs(new.cells - exact)) / dt)
    slope = -np.polyfit(np.log([50, 100, 200]), np.log(errs), 1)[0]
    assert slope >= 1.9


@pytest.mark.parametrize("name", ["frw1", "tov"])
def test_grp_beats_godunov(name):
    p = get_problem(name)
    g = Grid(p.r_min, p.r_max, 50)
    e_grp = solution_errors(run(p, "grp", g).state, p, g)
    e_god = solution_errors(run(p, "godunov", g).state, p, g)
    for k in e_grp:
        assert e_grp[k] < e_god[k]


def test_error_norms():
    p = get_problem("frw1")
    g = Grid(p.r_min, p.r_max, 25)
    st = initial_state(p, g, "grp")
    abs_e = solution_errors(st, p, g)
    rel_e = solution_errors(st, p, g, norm="relative")
    # primitives of averaged conserved variables differ from averaged primitives at O(dr^2)
    assert set(abs_e) == {"rho", "v", "A", "B"}
    assert all(0.0 < e < 1e-4 for e in abs_e.values())
    assert all(0.0 < e < 1e-4 for e in rel_e.values())
    assert rel_e["rho"] == pytest.approx(abs_e["rho"] / (g.dr * np.sum(exact_cell_primitives(p, p.t_start, g)[0])))
    with pytest.raises(ValueError):
        solution_errors(st, p, g, norm="max")


def test_unphysical_state_is_flagged():
    p = get_problem("frw1")
    g = Grid(p.r_min, p.r_max, 10)
    st = initial_state(p, g, "grp")
    st.cells[3] = [-1.0, 0.0]
    with pytest.raises(UnphysicalStateError):
        st.primitives(p.sigma)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
def test_backends_agree_on_a_full_run(monkeypatch):
    p = get_problem("shock")
    g = Grid(p.r_min, p.r_max, 40)
    monkeypatch.setattr(sch, "kernels", _kernels)
    fast = run(p, "grp", g, p.t_start + 0.2).state
    monkeypatch.setattr(sch, "kernels", _pykernels)
    slow = run(p, "grp", g, p.t_start + 0.2).state
    np.testing.assert_allclose(fast.cells, slow.cells, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(fast.metric.b, slow.metric.b, rtol=1e-12)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
def test_backend_batches_agree():
    rng = np.random.default_rng(5)
    n = 500
    rl, rr = np.exp(rng.uniform(-3, 3, (2, n)))
    vl, vr = rng.uniform(-0.9, 0.9, (2, n))
    d = list(rng.standard_normal((4, n)))
    a, b, r = rng.uniform(0.5, 1, n), rng.uniform(0.5, 2, n), rng.uniform(3, 7, n)
    sigma = 1 / math.sqrt(3)
    for kappa in (0.0, 0.02):
        py = _pykernels.grp_batch(rl, vl, rr, vr, *d, a, b, r, kappa, sigma)
        cc = _kernels.grp_batch(rl, vl, rr, vr, *d, a, b, r, kappa, sigma)
        np.testing.assert_array_equal(py[4], cc[4])
        for x, y in zip(py[:4], cc[:4]):
            np.testing.assert_allclose(y, x, rtol=1e-12, atol=1e-14 * np.abs(x).max())
    py = _pykernels.rp_batch(rl, vl, rr, vr, a, b, sigma)
    cc = _kernels.rp_batch(rl, vl, rr, vr, a, b, sigma)
    for x, y in zip(py, cc):
        np.testing.assert_allclose(y, x, rtol=1e-14)


def test_zero_length_run_returns_initial_state():
    p = get_problem("tov")
    g = Grid(p.r_min, p.r_max, 16)
    out = run(p, "grp", g, p.t_start)
    assert out.steps == 0 and out.state.time == p.t_start
    np.testing.assert_array_equal(out.state.cells, initial_state(p, g, "grp").cells)
