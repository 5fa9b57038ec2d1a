"""Time stepping: the second-order GRP scheme and the first-order Godunov scheme.

Cell arrays are (n, 2) in the conservative variables (T00, T01). Two ghost
cells per side are refreshed from the problem's boundary data before every
interface sweep; the metric lives on the n + 1 interfaces only.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import GrpError, RiemannError, SolverError
from .metric import MetricSlice, full_step, half_step
from .problems import ProblemSpec
from .state import (
    char_speeds,
    conserved,
    dcons_dprim,
    eigenvectors,
    is_recoverable,
    primitive,
    prim_slopes,
    source_vector,
    stress11,
)

N_GHOST = 2
DEFAULT_CFL = {"grp": 0.45, "godunov": 0.9}
DEFAULT_THETA = 1.9


@dataclass(frozen=True)
class Grid:
    r_min: float
    r_max: float
    n_cells: int

    def __post_init__(self):
        if self.r_min <= 0.0 or self.r_max <= self.r_min:
            raise ValueError("grid needs 0 < r_min < r_max")
        if self.n_cells < 4:
            raise ValueError("grid needs at least 4 cells")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.n_cells

    @property
    def faces(self) -> np.ndarray:
        return self.r_min + self.dr * np.arange(self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.r_min + self.dr * (np.arange(self.n_cells) + 0.5)

    def ghost_centers(self):
        k = np.arange(N_GHOST, 0, -1) - 0.5
        return self.r_min - self.dr * k, self.r_max + self.dr * (np.arange(N_GHOST) + 0.5)


@dataclass
class SolverState:
    cells: np.ndarray
    slopes: np.ndarray
    metric: MetricSlice
    time: float
    step_index: int = 0
    cell_values: str = "average"

    def primitives(self, sigma):
        return primitive(self.cells[:, 0], self.cells[:, 1], sigma, self.time)


@dataclass
class RunResult:
    """Final state plus per-step diagnostics.

    ``residuals`` holds (t, residual) per step; ``clipped`` flags the steps
    whose length was cut to land on a stop time.
    """

    state: SolverState
    residuals: list = field(default_factory=list)
    clipped: list = field(default_factory=list)
    steps: int = 0
    wall_time: float = 0.0

    @property
    def final_residual(self) -> float:
        """Residual of the last step taken at the CFL time step.

        A discrete steady state depends on the step length, so a clipped
        step perturbs it; those steps are skipped here.
        """
        for (_, res), cut in zip(reversed(self.residuals), reversed(self.clipped)):
            if not cut:
                return res
        return self.residuals[-1][1] if self.residuals else float("nan")


# -- helpers --------------------------------------------------------------------

def _cons(rho, v, sigma):
    t00, t01 = conserved(rho, v, sigma)
    return np.column_stack([t00, t01])


_GAUSS5 = np.polynomial.legendre.leggauss(5)


def cell_values_of(fn, t: float, centers: np.ndarray, dr: float, sigma: float,
                   mode: str = "average") -> np.ndarray:
    """Conservative cell values of the profile ``fn(t, r) -> (rho, v, ...)``.

    "average" integrates U over each cell by 5-point Gauss-Legendre
    quadrature; "point" samples U at the centres.
    """
    if mode == "point":
        rho, v = fn(t, centers)[:2]
        return _cons(rho, v, sigma)
    if mode != "average":
        raise ValueError(f"unknown cell-value mode {mode!r}")
    x, w = _GAUSS5
    acc = np.zeros((centers.size, 2))
    for xi, wi in zip(x, w):
        rho, v = fn(t, centers + 0.5 * dr * xi)[:2]
        acc += 0.5 * wi * _cons(rho, v, sigma)
    return acc


def _boundary_cells(problem: ProblemSpec, grid: Grid, t: float, cells: np.ndarray,
                    mode: str = "average"):
    """Ghost values and slopes (2 per side) at time t."""
    rl, rr = grid.ghost_centers()
    h = 1e-5 * (grid.r_max - grid.r_min)
    out = []
    for kind, rg, fn, edge in ((problem.left_boundary, rl, problem.left_state, cells[0]),
                               (problem.right_boundary, rr, problem.right_state, cells[-1])):
        if kind == "extrapolate":
            out.append((np.tile(edge, (N_GHOST, 1)), np.zeros((N_GHOST, 2))))
            continue
        rp, vp, _, _ = fn(t, rg + h)
        rm, vm, _, _ = fn(t, rg - h)
        u = cell_values_of(fn, t, rg, grid.dr, problem.sigma, mode)
        du = (_cons(rp, vp, problem.sigma) - _cons(rm, vm, problem.sigma)) / (2.0 * h)
        out.append((u, du))
    return out


def _extend(problem, grid, t, cells, slopes, mode="average"):
    (ul, sl), (ur, sr) = _boundary_cells(problem, grid, t, cells, mode)
    return np.vstack([ul, cells, ur]), np.vstack([sl, slopes, sr])


def _outflow(problem):
    return problem.left_boundary == "extrapolate", problem.right_boundary == "extrapolate"


def _raise_status(status, kind, t):
    bad = np.flatnonzero(status)
    if bad.size:
        i = int(bad[0])
        err = RiemannError if status[i] == 1 else GrpError
        raise err(f"{kind} solve failed at interface {i}, t={t:.12g}")


def cfl_dt(state: SolverState, sigma: float, dr: float, c_cfl: float) -> float:
    """Delta t = C dr / max |lambda_+-| with cell metric taken as interface means."""
    _, v = state.primitives(sigma)
    a, b = state.metric.cell_average()
    lm, lp = char_speeds(v, np.sqrt(a * b), sigma)
    smax = float(np.max(np.maximum(np.abs(lm), np.abs(lp))))
    if smax <= 0.0:
        raise SolverError("zero characteristic speed everywhere; time step undefined")
    return c_cfl * dr / smax


def minmod3(a, b, c):
    s = np.sign(a)
    same = (s == np.sign(b)) & (s == np.sign(c))
    return np.where(same, s * np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c)), 0.0)


def limit_slopes(cells_ext: np.ndarray, sigma_minus: np.ndarray, dr: float, theta: float,
                 sigma: float, v: np.ndarray, outflow=(False, False)) -> np.ndarray:
    """Characteristic minmod of the two one-sided differences and the candidate slope.

    ``cells_ext`` carries one neighbour per side; ``v`` is the cell velocity that
    fixes the local eigenvectors. At an ``outflow`` end the ghost is a copy of
    the edge cell, so the difference across it carries no information and the
    edge cell is limited with the two remaining arguments only.
    """
    rmat, rinv = eigenvectors(v, sigma)
    back = cells_ext[1:-1] - cells_ext[:-2]
    fwd = cells_ext[2:] - cells_ext[1:-1]
    if outflow[0]:
        back[0] = fwd[0]
    if outflow[1]:
        fwd[-1] = back[-1]

    def proj(x):
        return np.einsum("nij,nj->ni", rinv, x)

    w = minmod3(theta / dr * proj(back), proj(sigma_minus), theta / dr * proj(fwd))
    slopes = np.einsum("nij,nj->ni", rmat, w)
    # positivity fallback: a slope whose face values leave the admissible set is dropped
    centre = cells_ext[1:-1]
    half = 0.5 * dr * slopes
    lo, hi = centre - half, centre + half
    bad = ~(is_recoverable(lo[:, 0], lo[:, 1], sigma) & is_recoverable(hi[:, 0], hi[:, 1], sigma))
    slopes[bad] = 0.0
    return slopes


def initial_state(problem: ProblemSpec, grid: Grid, scheme: str, theta: float = DEFAULT_THETA,
                  cell_values: str = "average") -> SolverState:
    """Cell values of the initial data, metric from the spatial recursion, limited slopes."""
    sigma, kappa = problem.sigma, problem.kappa
    cells = cell_values_of(lambda t, r: problem.initial(r), problem.t_start, grid.centers,
                           grid.dr, sigma, cell_values)
    rho, v = primitive(cells[:, 0], cells[:, 1], sigma, problem.t_start)
    metric = full_step(grid.faces, cells[:, 0], stress11(rho, v, sigma), kappa,
                       problem.metric_seed(problem.t_start), problem.t_start)
    slopes = np.zeros_like(cells)
    if scheme == "grp":
        ext, _ = _extend(problem, grid, problem.t_start, cells, slopes, cell_values)
        central = (ext[N_GHOST + 1:-N_GHOST + 1] - ext[N_GHOST - 1:-N_GHOST - 1]) / (2.0 * grid.dr)
        slopes = limit_slopes(ext[N_GHOST - 1:len(ext) - N_GHOST + 1], central, grid.dr, theta,
                              sigma, v, _outflow(problem))
    return SolverState(cells, slopes, metric, problem.t_start, 0, cell_values)


# -- steps ----------------------------------------------------------------------

def _interface_prims(ext, sext, dr, sigma, t):
    n1 = ext.shape[0] - 2 * N_GHOST + 1
    lo = slice(N_GHOST - 1, N_GHOST - 1 + n1)
    hi = slice(N_GHOST, N_GHOST + n1)
    left = ext[lo] + 0.5 * dr * sext[lo]
    right = ext[hi] - 0.5 * dr * sext[hi]
    rho_l, v_l = primitive(left[:, 0], left[:, 1], sigma, t)
    rho_r, v_r = primitive(right[:, 0], right[:, 1], sigma, t)
    return (rho_l, v_l, rho_r, v_r), (sext[lo], sext[hi])


def grp_step(state: SolverState, problem: ProblemSpec, grid: Grid, dt: float,
             theta: float = DEFAULT_THETA) -> SolverState:
    sigma, kappa, dr = problem.sigma, problem.kappa, grid.dr
    t = state.time
    r = grid.faces
    met = state.metric
    ext, sext = _extend(problem, grid, t, state.cells, state.slopes, state.cell_values)
    (rho_l, v_l, rho_r, v_r), (s_l, s_r) = _interface_prims(ext, sext, dr, sigma, t)
    drl, dvl = prim_slopes(rho_l, v_l, s_l[:, 0], s_l[:, 1], sigma)
    drr, dvr = prim_slopes(rho_r, v_r, s_r[:, 0], s_r[:, 1], sigma)

    # Step I: interface values and their time derivatives
    rho0, v0, rho_t, v_t, status = kernels.grp_batch(
        rho_l, v_l, rho_r, v_r, drl, dvl, drr, dvr, met.a, met.b, r, float(kappa), float(sigma))
    _raise_status(status, "GRP", t)
    u_rp = _cons(rho0, v0, sigma)
    (j00, j01), (j10, j11) = dcons_dprim(rho0, v0, sigma)
    u_t = np.column_stack([j00 * rho_t + j01 * v_t, j10 * rho_t + j11 * v_t])
    u_half = u_rp + 0.5 * dt * u_t
    rho_h, v_h = primitive(u_half[:, 0], u_half[:, 1], sigma, t + 0.5 * dt)
    t11_h = stress11(rho_h, v_h, sigma)

    # Step II: metric at the half step
    seed = problem.metric_seed(t + 0.5 * dt) if problem.left_boundary == "exact" or kappa == 0.0 else None
    met_h = half_step(met, u_rp[:, 1], t11_h, dt, kappa, seed, t + 0.5 * dt)

    # Step III: conservative update with midpoint fluxes and trapezoidal sources
    lapse = met_h.lapse_factor
    flux = lapse[:, None] * np.column_stack([u_half[:, 1], t11_h])
    s1, s2 = source_vector(r, met_h.a, met_h.b, rho_h, v_h, sigma, kappa)
    src = np.column_stack([s1, s2])
    cells = state.cells - dt / dr * (flux[1:] - flux[:-1]) + 0.5 * dt * (src[:-1] + src[1:])
    t_new = t + dt
    rho_n, v_n = primitive(cells[:, 0], cells[:, 1], sigma, t_new)

    # Step V: metric at the new level
    met_n = full_step(r, cells[:, 0], stress11(rho_n, v_n, sigma), kappa,
                      _full_seed(problem, met, t_new), t_new)

    # Step IV: limited slopes
    u_minus = u_rp + dt * u_t
    sig_minus = (u_minus[1:] - u_minus[:-1]) / dr
    (ul, _), (ur, _) = _boundary_cells(problem, grid, t_new, cells, state.cell_values)
    nb = np.vstack([ul[-1:], cells, ur[:1]])
    slopes = limit_slopes(nb, sig_minus, dr, theta, sigma, v_n, _outflow(problem))
    return SolverState(cells, slopes, met_n, t_new, state.step_index + 1, state.cell_values)


def _full_seed(problem, met, t):
    if problem.left_boundary == "exact" or problem.kappa == 0.0:
        return problem.metric_seed(t)
    return met.m[0], met.ln_b[0]


def godunov_step(state: SolverState, problem: ProblemSpec, grid: Grid, dt: float) -> SolverState:
    sigma, kappa, dr = problem.sigma, problem.kappa, grid.dr
    t = state.time
    r = grid.faces
    met = state.metric
    zero = np.zeros_like(state.cells)
    ext, _ = _extend(problem, grid, t, state.cells, zero, state.cell_values)
    n1 = grid.n_cells + 1
    left = ext[N_GHOST - 1:N_GHOST - 1 + n1]
    right = ext[N_GHOST:N_GHOST + n1]
    rho_l, v_l = primitive(left[:, 0], left[:, 1], sigma, t)
    rho_r, v_r = primitive(right[:, 0], right[:, 1], sigma, t)
    rho0, v0, status = kernels.rp_batch(rho_l, v_l, rho_r, v_r, met.a, met.b, float(sigma))
    _raise_status(status, "Riemann", t)
    t01 = conserved(rho0, v0, sigma)[1]
    flux = met.lapse_factor[:, None] * np.column_stack([t01, stress11(rho0, v0, sigma)])
    rho_c, v_c = primitive(state.cells[:, 0], state.cells[:, 1], sigma, t)
    a_c, b_c = met.cell_average()
    s1, s2 = source_vector(grid.centers, a_c, b_c, rho_c, v_c, sigma, kappa)
    cells = state.cells - dt / dr * (flux[1:] - flux[:-1]) + dt * np.column_stack([s1, s2])
    t_new = t + dt
    rho_n, v_n = primitive(cells[:, 0], cells[:, 1], sigma, t_new)
    met_n = full_step(r, cells[:, 0], stress11(rho_n, v_n, sigma), kappa,
                      _full_seed(problem, met, t_new), t_new)
    return SolverState(cells, zero, met_n, t_new, state.step_index + 1, state.cell_values)


# -- driver -----------------------------------------------------------------------

def residual(old: np.ndarray, new: np.ndarray, dt: float) -> float:
    """Cell-mean l1 norm of U^{n+1} - U^n over both components, divided by dt."""
    return float(np.mean(np.sum(np.abs(new - old), axis=1)) / dt)


def run(problem: ProblemSpec, scheme: str = "grp", grid: Grid | None = None,
        t_end: float | None = None, c_cfl: float | None = None, theta: float = DEFAULT_THETA,
        hooks: list[Callable] | None = None, snapshots=(), state: SolverState | None = None,
        cell_values: str = "average") -> RunResult:
    """Advance ``problem`` to ``t_end``.

    Each hook is called as ``hook(state, dt, residual)`` after every step.
    Time steps are shortened to land on ``t_end`` and on every snapshot time.
    """
    if scheme not in DEFAULT_CFL:
        raise ValueError(f"unknown scheme {scheme!r}")
    grid = grid or Grid(problem.r_min, problem.r_max, 100)
    c_cfl = DEFAULT_CFL[scheme] if c_cfl is None else c_cfl
    t_end = problem.t_end if t_end is None else t_end
    hooks = list(hooks or [])
    if state is None:
        state = initial_state(problem, grid, scheme, theta, cell_values)
    stops = sorted({float(s) for s in snapshots if state.time < s < t_end} | {float(t_end)})
    result = RunResult(state)
    wall = _time.perf_counter()
    eps = 1e-12 * max(1.0, abs(t_end))
    for stop in stops:
        while state.time < stop - eps:
            dt = cfl_dt(state, problem.sigma, grid.dr, c_cfl)
            remaining = stop - state.time
            cut = True
            if dt >= remaining - eps:
                dt = remaining
            elif 2.0 * dt > remaining:
                # split the remainder evenly rather than leave a sliver step
                dt = 0.5 * remaining
            else:
                cut = False
            if scheme == "grp":
                new = grp_step(state, problem, grid, dt, theta)
            else:
                new = godunov_step(state, problem, grid, dt)
            res = residual(state.cells, new.cells, dt)
            result.residuals.append((new.time, res))
            result.clipped.append(cut)
            state = new
            for hook in hooks:
                hook(state, dt, res)
    result.state = state
    result.steps = state.step_index
    result.wall_time = _time.perf_counter() - wall
    return result


# -- errors -----------------------------------------------------------------------

def relative_l1(num, exact) -> float:
    """sum |num - exact| / sum |exact|."""
    return float(np.sum(np.abs(num - exact)) / np.sum(np.abs(exact)))


def absolute_l1(num, exact, dr: float) -> float:
    """Discrete integral sum |num - exact| dr."""
    return float(np.sum(np.abs(num - exact)) * dr)


def exact_cell_primitives(problem: ProblemSpec, t: float, grid: Grid, mode: str = "average"):
    """Exact (rho, v) per cell: centre samples or cell means matching ``mode``."""
    if mode == "point":
        rho, v, _, _ = problem.exact(t, grid.centers)
        return rho, v
    x, w = _GAUSS5
    rho = np.zeros(grid.n_cells)
    v = np.zeros(grid.n_cells)
    for xi, wi in zip(x, w):
        r_, v_, _, _ = problem.exact(t, grid.centers + 0.5 * grid.dr * xi)
        rho += 0.5 * wi * r_
        v += 0.5 * wi * v_
    return rho, v


def solution_errors(state: SolverState, problem: ProblemSpec, grid: Grid,
                    norm: str = "absolute") -> dict:
    """l1 errors of rho, v (cell centres) and A, B (interfaces) against the exact solution.

    ``norm`` is "absolute" (sum |e| dr, the table norm) or "relative"
    (sum |e| / sum |exact|, undefined where the exact field vanishes).
    """
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    rho, v = state.primitives(problem.sigma)
    rho_e, v_e = exact_cell_primitives(problem, state.time, grid, state.cell_values)
    _, _, a_e, b_e = problem.exact(state.time, grid.faces)
    pairs = {"rho": (rho, rho_e), "v": (v, v_e), "A": (state.metric.a, a_e), "B": (state.metric.b, b_e)}
    if norm == "absolute":
        return {k: absolute_l1(x, y, grid.dr) for k, (x, y) in pairs.items()}
    if norm == "relative":
        with np.errstate(divide="ignore", invalid="ignore"):
            return {k: relative_l1(x, y) for k, (x, y) in pairs.items()}
    raise ValueError(f"unknown norm {norm!r}")
