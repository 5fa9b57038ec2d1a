"""Pure-Python interface kernels: one Riemann or GRP solve per interface.

Status codes: 0 ok, 1 Riemann failure, 2 GRP failure.
"""

import numpy as np

from .eos import BarotropicEos
from .errors import DomainError, GrpError, RiemannError
from .grp import GrpInput, resolve_primitive
from .riemann import sample, solve_star
from .state import PrimitiveState

STATUS_OK = 0
STATUS_RIEMANN = 1
STATUS_GRP = 2


def rp_batch(rho_l, v_l, rho_r, v_r, a, b, sigma):
    """Riemann solution sampled at xi = 0 for every interface."""
    eos = BarotropicEos(sigma)
    n = rho_l.shape[0]
    rho0 = np.empty(n)
    v0 = np.empty(n)
    status = np.zeros(n, dtype=np.int32)
    m = np.sqrt(a * b)
    for i in range(n):
        try:
            fan = solve_star(PrimitiveState(rho_l[i], v_l[i]), PrimitiveState(rho_r[i], v_r[i]), m[i], eos)
        except (RiemannError, DomainError):
            status[i] = STATUS_RIEMANN
            rho0[i] = v0[i] = np.nan
            continue
        st = sample(fan, 0.0)
        rho0[i], v0[i] = st.rho, st.v
    return rho0, v0, status


def grp_batch(rho_l, v_l, rho_r, v_r, drho_l, dv_l, drho_r, dv_r, a, b, r, kappa, sigma):
    """Riemann value at xi = 0 and its time derivative in primitive variables."""
    eos = BarotropicEos(sigma)
    n = rho_l.shape[0]
    out = np.empty((4, n))
    status = np.zeros(n, dtype=np.int32)
    for i in range(n):
        inp = GrpInput(
            PrimitiveState(rho_l[i], v_l[i]), PrimitiveState(rho_r[i], v_r[i]),
            (drho_l[i], dv_l[i]), (drho_r[i], dv_r[i]), a[i], b[i], r[i], kappa, eos,
        )
        try:
            st, rt, vt = resolve_primitive(inp)
        except (RiemannError, DomainError):
            status[i] = STATUS_RIEMANN
            out[:, i] = np.nan
            continue
        except GrpError:
            status[i] = STATUS_GRP
            out[:, i] = np.nan
            continue
        out[:, i] = st.rho, st.v, rt, vt
    return out[0], out[1], out[2], out[3], status
