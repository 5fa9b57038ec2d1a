"""Compare the compiled and pure-Python interface kernels.

Times ``rp_batch`` and ``grp_batch`` on random interface data and one full
GRP step on FRW-1, and checks that both backends agree.

    python3 benchmarks/bench_kernels.py [--interfaces 2000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from grpsse import _pykernels

try:
    from grpsse import _kernels
except ImportError:  # extension not built
    _kernels = None


def random_interfaces(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    rl, rr = np.exp(rng.uniform(-3, 3, n)), np.exp(rng.uniform(-3, 3, n))
    vl, vr = rng.uniform(-0.9, 0.9, n), rng.uniform(-0.9, 0.9, n)
    slopes = [rng.standard_normal(n) for _ in range(4)]
    a, b, r = rng.uniform(0.5, 1.0, n), rng.uniform(0.5, 2.0, n), rng.uniform(3.0, 7.0, n)
    return rl, vl, rr, vr, slopes, a, b, r


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_batches(n: int, repeat: int, sigma: float = 1.0 / np.sqrt(3.0)) -> None:
    rl, vl, rr, vr, slopes, a, b, r = random_interfaces(n)
    kappa = 8.0 * np.pi
    cases = {
        "rp_batch": lambda k: k.rp_batch(rl, vl, rr, vr, a, b, sigma),
        "grp_batch": lambda k: k.grp_batch(rl, vl, rr, vr, *slopes, a, b, r, kappa, sigma),
    }
    print(f"{'kernel':<12}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}{'max diff':>12}")
    for name, call in cases.items():
        t_py = best_of(lambda: call(_pykernels), repeat)
        ref = call(_pykernels)
        if _kernels is None:
            print(f"{name:<12}{t_py:>12.4f}{'n/a':>14}")
            continue
        t_c = best_of(lambda: call(_kernels), repeat)
        out = call(_kernels)
        diff = max(float(np.max(np.abs(x - y) / (1.0 + np.abs(x)))) for x, y in zip(ref[:-1], out[:-1]))
        print(f"{name:<12}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>10.1f}{diff:>12.2e}")


_STEP_SNIPPET = """
import time
from grpsse import BACKEND, Grid, get_problem, run
p = get_problem("frw1")
g = Grid(p.r_min, p.r_max, {n})
t = time.perf_counter()
res = run(p, "grp", g, p.t_end)
print(BACKEND, res.steps, (time.perf_counter() - t) / res.steps)
"""


def bench_run(n: int) -> None:
    """Time whole FRW-1 runs in fresh interpreters, one per backend."""
    for backend in ("python", "compiled"):
        if backend == "compiled" and _kernels is None:
            continue
        env = dict(os.environ, GRPSSE_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", _STEP_SNIPPET.format(n=n)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"frw1 N={n:<6} backend={out[0]:<9} steps={out[1]:<6} per step {float(out[2]) * 1e3:.2f} ms")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--interfaces", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cells", type=int, default=200)
    args = ap.parse_args(argv)
    bench_batches(args.interfaces, args.repeat)
    bench_run(args.cells)
    return 0


if __name__ == "__main__":
    sys.exit(main())
