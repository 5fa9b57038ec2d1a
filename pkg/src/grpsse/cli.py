"""Command-line driver: single runs, convergence tables and the GRP-solver probe.

Outputs are plain CSV files with a header row and 12 significant digits, plus a
short text summary per run. Exit codes: 0 success, 1 configuration error,
2 solver failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import BACKEND
from .eos import BarotropicEos
from .errors import DomainError, SolverError
from .grp import GrpInput, resolve
from .problems import PROBLEMS, ProblemSpec, get_problem
from .scheme import DEFAULT_CFL, DEFAULT_THETA, Grid, SolverState, run, solution_errors
from .state import PrimitiveState

OUT_ENV = "GRPSSE_OUT"
DEFAULT_TAUS = (0.16, 0.14, 0.12, 0.10, 0.08, 0.06, 0.04, 0.02)
FLOAT_FMT = "{:.12g}"

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str = "frw1"
    scheme: str = "grp"
    n_cells: int = 100
    c_cfl: float | None = None
    theta: float = DEFAULT_THETA
    t_end: float | None = None
    out: Path = field(default_factory=lambda: Path(os.environ.get(OUT_ENV, "grpsse_out")))
    convergence: list[int] = field(default_factory=list)
    snapshots: list[float] = field(default_factory=list)
    grp_probe: list[float] = field(default_factory=list)
    probe_cells: int = 4000
    probe_width: float = 1.5
    probe_extrapolate: bool = True
    cell_values: str = "average"

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}")
        if self.scheme not in DEFAULT_CFL:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose grp or godunov")
        if self.n_cells < 4:
            raise ConfigError("cells must be at least 4")
        if self.c_cfl is not None and not 0.0 < self.c_cfl <= 1.0:
            raise ConfigError("cfl must lie in (0, 1]")
        if not 1.0 <= self.theta < 2.0:
            raise ConfigError("theta must lie in [1, 2)")
        if self.convergence and (len(self.convergence) < 2 or min(self.convergence) < 4):
            raise ConfigError("convergence needs at least two meshes of 4 or more cells")
        if self.grp_probe:
            if self.problem not in ("shock", "timereversal"):
                raise ConfigError("the GRP probe applies to the shock and timereversal problems")
            if any(t <= 0.0 for t in self.grp_probe):
                raise ConfigError("probe times must be positive")
            if self.probe_cells < 8 or self.probe_cells % 4:
                raise ConfigError("probe cells must be a multiple of 4, at least 8")
            if self.probe_width <= 0.0:
                raise ConfigError("probe width must be positive")
        if self.cell_values not in ("average", "point"):
            raise ConfigError("cell_values must be average or point")


# -- configuration ---------------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(" ", "").split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).replace(" ", "").split(",") if x]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


_CONVERTERS = {
    "problem": str,
    "scheme": str,
    "cells": int,
    "cfl": float,
    "theta": float,
    "t_end": float,
    "out": Path,
    "convergence": _ints,
    "snapshots": _floats,
    "grp_probe": _floats,
    "probe_cells": int,
    "probe_width": float,
    "probe_extrapolate": _bool,
    "cell_values": str,
}
_FIELD = {"cells": "n_cells", "cfl": "c_cfl"}


def read_config_file(path: str | Path) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONVERTERS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grpsse", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key=value configuration file; flags override it")
    p.add_argument("--problem", help=f"one of {', '.join(PROBLEMS)}")
    p.add_argument("--scheme", help="grp or godunov")
    p.add_argument("--cells", help="number of cells")
    p.add_argument("--cfl", help="CFL number (default 0.45 grp, 0.9 godunov)")
    p.add_argument("--theta", help="limiter parameter in [1, 2)")
    p.add_argument("--t-end", dest="t_end", help="final time (default per problem)")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./grpsse_out)")
    p.add_argument("--convergence", help='mesh list, e.g. "25,50,100,200"')
    p.add_argument("--snapshots", help='snapshot times, e.g. "15.5,15.8"')
    p.add_argument("--grp-probe", dest="grp_probe", nargs="?", const=",".join(map(str, DEFAULT_TAUS)),
                   help="probe times tau for the GRP-solver check (shock/timereversal)")
    p.add_argument("--probe-cells", dest="probe_cells", help="cells of the probe reference run")
    p.add_argument("--probe-width", dest="probe_width",
                   help="half-width of the probe domain in units of tau (default 1.5)")
    p.add_argument("--probe-extrapolate", dest="probe_extrapolate",
                   help="Richardson-extrapolate the probe reference (default true)")
    p.add_argument("--cell-values", dest="cell_values", help="average (default) or point")
    return p


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for key in _CONVERTERS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig()
    for key, raw in values.items():
        try:
            setattr(cfg, _FIELD.get(key, key), _CONVERTERS[key](raw))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    cfg.validate()
    return cfg


# -- output helpers ----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return FLOAT_FMT.format(float(x))


def write_csv(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def convergence_rates(meshes, errors) -> list[float]:
    """Rates log(e_coarse / e_fine) / log(N_fine / N_coarse); NaN for the first mesh."""
    rates = [math.nan]
    for (n0, e0), (n1, e1) in zip(zip(meshes, errors), zip(meshes[1:], errors[1:])):
        rates.append(math.log(e0 / e1) / math.log(n1 / n0) if e0 > 0 and e1 > 0 else math.nan)
    return rates


# -- run modes -----------------------------------------------------------------------

def _problem(cfg: RunConfig) -> ProblemSpec:
    return get_problem(cfg.problem)


def solve(cfg: RunConfig, n_cells: int | None = None, snapshots=(), hooks=None):
    problem = _problem(cfg)
    grid = Grid(problem.r_min, problem.r_max, n_cells or cfg.n_cells)
    result = run(problem, cfg.scheme, grid, cfg.t_end, cfg.c_cfl, cfg.theta, hooks=hooks,
                 snapshots=snapshots, cell_values=cfg.cell_values)
    return problem, grid, result


def _solution_rows(problem: ProblemSpec, grid: Grid, state: SolverState):
    rho, v = state.primitives(problem.sigma)
    a_c, b_c = state.metric.cell_average()
    cols = [grid.centers, rho, v, a_c, b_c]
    if problem.exact is not None:
        re, ve, ae, be = problem.exact(state.time, grid.centers)
        cols += [re, ve, ae, be]
    return list(zip(*cols))


SOLUTION_HEADER = ["r", "rho", "v", "A", "B"]
EXACT_HEADER = ["rho_exact", "v_exact", "A_exact", "B_exact"]


def run_single(cfg: RunConfig) -> dict:
    """Run one configuration; write solution, residual history, snapshots and summary."""
    snaps = []

    def grab(state, dt, res):
        if any(abs(state.time - s) <= 1e-12 * max(1.0, abs(s)) for s in cfg.snapshots):
            snaps.append(dataclasses.replace(state))

    problem, grid, result = solve(cfg, snapshots=cfg.snapshots, hooks=[grab])
    out = Path(cfg.out)
    header = SOLUTION_HEADER + (EXACT_HEADER if problem.exact is not None else [])
    stem = f"{cfg.problem}_{cfg.scheme}_{grid.n_cells}"
    files = {"solution": write_csv(out / f"{stem}_solution.csv", header,
                                   _solution_rows(problem, grid, result.state))}
    files["residuals"] = write_csv(out / f"{stem}_residuals.csv", ["t", "residual"], result.residuals)
    for st in snaps:
        files[f"snapshot_{st.time:g}"] = write_csv(
            out / f"{stem}_t{st.time:.6g}.csv", SOLUTION_HEADER, [row[:5] for row in _solution_rows(problem, grid, st)])
    errors = solution_errors(result.state, problem, grid) if problem.exact is not None else {}
    lines = [
        f"problem      {cfg.problem}",
        f"scheme       {cfg.scheme}",
        f"backend      {BACKEND}",
        f"cells        {grid.n_cells}",
        f"t_start      {_fmt(problem.t_start)}",
        f"t_end        {_fmt(result.state.time)}",
        f"steps        {result.steps}",
        f"wall_time_s  {result.wall_time:.3f}",
        f"final_residual {_fmt(result.final_residual)}",
    ]
    lines += [f"l1_error_{k} {_fmt(v)}" for k, v in errors.items()]
    files["summary"] = out / f"{stem}_summary.txt"
    files["summary"].write_text("\n".join(lines) + "\n", encoding="utf-8")
    return {"files": files, "errors": errors, "result": result}


def run_convergence(cfg: RunConfig) -> dict:
    """Error table over the mesh list with observed rates per variable."""
    meshes = sorted(cfg.convergence)
    table = {}
    for n in meshes:
        problem, grid, result = solve(cfg, n)
        if problem.exact is None:
            raise ConfigError(f"problem {cfg.problem!r} has no exact solution for a convergence table")
        table[n] = solution_errors(result.state, problem, grid)
    names = ["rho", "v", "A", "B"]
    rates = {k: convergence_rates(meshes, [table[n][k] for n in meshes]) for k in names}
    header = ["N"] + [f"{k}_{c}" for k in names for c in ("error", "rate")]
    rows = [[n] + [x for k in names for x in (table[n][k], rates[k][i])] for i, n in enumerate(meshes)]
    path = write_csv(Path(cfg.out) / f"{cfg.problem}_{cfg.scheme}_convergence.csv", header, rows)
    return {"file": path, "errors": table, "rates": rates}


# -- GRP-solver probe ------------------------------------------------------------------

def _side_data(fn, t, r0, sigma, h=1e-6):
    """(rho, v), (rho', v') and (A, B) of one smooth side at r0."""
    r = np.array([r0 - h, r0, r0 + h])
    rho, v, a, b = fn(t, r)
    return (rho[1], v[1]), ((rho[2] - rho[0]) / (2 * h), (v[2] - v[0]) / (2 * h)), (a[1], b[1])


def probe_derivative(problem: ProblemSpec):
    """U^RP and (dU/dt)^GRP at the initial discontinuity from the exact one-sided data."""
    r0, t0 = problem.interface, problem.t_start
    (rl, vl), dl, (a, b) = _side_data(problem.left_state, t0, r0, problem.sigma)
    (rr, vr), dr_, _ = _side_data(problem.right_state, t0, r0, problem.sigma)
    inp = GrpInput(PrimitiveState(rl, vl), PrimitiveState(rr, vr), dl, dr_, a, b, r0,
                   problem.kappa, BarotropicEos(problem.sigma))
    u_rp, u_t = resolve(inp)
    return u_rp.as_array(), u_t


def _face_value(state: SolverState, grid: Grid, r0: float, sigma: float) -> np.ndarray:
    """Mean of the two reconstructed limits at the face nearest r0."""
    k = int(round((r0 - grid.r_min) / grid.dr))
    left = state.cells[k - 1] + 0.5 * grid.dr * state.slopes[k - 1]
    right = state.cells[k] - 0.5 * grid.dr * state.slopes[k]
    return 0.5 * (left + right)


def probe_reference(problem: ProblemSpec, tau: float, n_cells: int, width: float = 1.5,
                    cell_values: str = "average") -> np.ndarray:
    """Fine-mesh GRP value at r0 and t0 + tau on the domain r0 +- width * tau.

    Scaling the domain with tau keeps the mesh resolution of the wave pattern
    the same for every probe time.
    """
    r0, t0 = problem.interface, problem.t_start
    half = width * tau
    sub = dataclasses.replace(problem, r_min=r0 - half, r_max=r0 + half)
    grid = Grid(sub.r_min, sub.r_max, n_cells)
    state = run(sub, "grp", grid, t0 + tau, cell_values=cell_values).state
    return _face_value(state, grid, r0, problem.sigma)


def richardson_reference(problem: ProblemSpec, tau: float, n_cells: int, width: float = 1.5,
                         cell_values: str = "average") -> np.ndarray:
    """Second-order Richardson extrapolation of the references on n/2 and n cells."""
    coarse = probe_reference(problem, tau, n_cells // 2, width, cell_values)
    fine = probe_reference(problem, tau, n_cells, width, cell_values)
    return fine + (fine - coarse) / 3.0


def observed_orders(taus, errors) -> list[float]:
    """log(e_k / e_k+1) / log(tau_k / tau_k+1); the first entry is nan."""
    return [math.nan] + [math.log(e0 / e1) / math.log(t0 / t1)
                         for t0, t1, e0, e1 in zip(taus, taus[1:], errors, errors[1:])]


def run_grp_probe(cfg: RunConfig) -> dict:
    """e_GRP(tau) = |U^RP + tau dU/dt - U^REF(t0 + tau, r0)|_2 with observed orders."""
    problem = _problem(cfg)
    taus = sorted(cfg.grp_probe, reverse=True)
    u_rp, u_t = probe_derivative(problem)
    reference = richardson_reference if cfg.probe_extrapolate else probe_reference
    errs = [float(np.linalg.norm(u_rp + tau * u_t
                                 - reference(problem, tau, cfg.probe_cells, cfg.probe_width,
                                             cfg.cell_values)))
            for tau in taus]
    orders = observed_orders(taus, errs)
    path = write_csv(Path(cfg.out) / f"{cfg.problem}_grp_probe.csv", ["tau", "e_grp", "order"],
                     zip(taus, errs, orders))
    return {"file": path, "taus": taus, "errors": errs, "orders": orders}


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.grp_probe:
            out = run_grp_probe(cfg)
            for tau, e, o in zip(out["taus"], out["errors"], out["orders"]):
                print(f"tau={tau:<6g} e_grp={e:.4e} order={o:.3f}")
        elif cfg.convergence:
            out = run_convergence(cfg)
            print(f"wrote {out['file']}")
        else:
            out = run_single(cfg)
            print(f"wrote {out['files']['summary']}")
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
