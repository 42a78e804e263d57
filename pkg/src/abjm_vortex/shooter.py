"""Radial Cauchy problem for the regular variables ``(U, V)``.

With ``u = U + 2 N1 ln r`` and ``v = V + 2 N2 ln r`` the radial system is

    -(r U')' = r^{2N2+1} e^V (r^{2N1} e^U + 1),
    -(r V')' = r^{2N1+1} e^U (r^{2N2} e^V - 1),

with ``U(0) = alpha1``, ``V(0) = alpha2`` and vanishing slopes.  It is
integrated in ``s = ln r`` for the state

    (U, V, p, q, I_uv, I_u, I_v),   p = r U' = -F1,  q = r V' = -F2,

where the ``I`` are the cumulative integrals of ``t e^{u+v}``, ``t e^u`` and
``t e^v``.  In these variables every right-hand side is a pure exponential
``exp(k s + W)``, evaluated in one call so nothing overflows before it has
to.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import integrate as _ode

from .functionals import settled_f2, tail_terms
from .params import VortexParams

__all__ = [
    "IntegrationError",
    "InitialData",
    "IntegrationControls",
    "RadialProfile",
    "series_start",
    "auto_r_start",
    "integrate_profile",
    "integrate",
    "rk4_fixed",
    "continuity_check",
]

_EXP_CAP = 700.0


class IntegrationError(RuntimeError):
    """The integrator failed; ``state`` holds the last accepted point."""

    def __init__(self, msg, r=None, state=None):
        super().__init__(msg)
        self.r = r
        self.state = state


@dataclass(frozen=True)
class InitialData:
    """Values ``U(0) = alpha1`` and ``V(0) = alpha2``.

    ``L`` records the line ``(2 N2 + 1) alpha1 - (2 N1 + 1) alpha2 = L`` when
    the data was built with :meth:`from_line`.
    """

    alpha1: float
    alpha2: float
    L: float | None = None

    @classmethod
    def from_line(cls, alpha, L, n1, n2):
        alpha2 = ((2 * n2 + 1) * alpha - L) / (2 * n1 + 1)
        return cls(float(alpha), float(alpha2), float(L))

    def line_offset(self, n1, n2):
        return (2 * n2 + 1) * self.alpha1 - (2 * n1 + 1) * self.alpha2


@dataclass(frozen=True)
class IntegrationControls:
    """Tolerances and termination settings of :func:`integrate`.

    ``r_max`` is a cap; runs normally stop earlier once the tail-corrected
    limits are stable (``tail_tol``) and the raw truncation lag is below
    ``lag_tol``.  ``band`` is the undecidable half-width around
    ``F2 = 2 (N2 + 1)``.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    r_max: float = 1e12
    v_cap: float = 30.0
    method: str = "RK45"
    points_per_decade: int = 40
    band: float = 1e-3
    tail_tol: float = 1e-8
    lag_tol: float = 2e-3
    r_start: float | None = None
    early_stop: bool = True
    max_steps: int = 200_000

    def __post_init__(self):
        if not (0 < self.rtol < 1 and self.atol > 0):
            raise ValueError("tolerances must be positive (rtol < 1)")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.points_per_decade < 20:
            raise ValueError("points_per_decade must be >= 20 for final-decade slope fits")
        if self.r_start is not None and not 0 < self.r_start < self.r_max:
            raise ValueError("need 0 < r_start < r_max")

    def tightened(self, factor=10.0):
        return replace(self, rtol=self.rtol / factor, atol=self.atol / factor)

    def as_dict(self):
        return asdict(self)


@dataclass
class RadialProfile:
    """Checkpointed trajectory of the Cauchy problem.

    Arrays share the grid ``r``; ``F1 = -r U'`` and ``F2 = -r V'`` are exact
    rewrites of the state.  ``termination`` is one of ``tail_converged``,
    ``non_integrable`` (``F2`` has settled below ``2 (N2 + 1)``), ``v_cap``
    (``v`` above the cap with ``F2 < 2 N2``) and ``r_max``.
    """

    n1: int
    n2: int
    init: InitialData
    controls: IntegrationControls
    r: np.ndarray
    U: np.ndarray
    V: np.ndarray
    F1: np.ndarray
    F2: np.ndarray
    Iuv: np.ndarray
    Iu: np.ndarray
    Iv: np.ndarray
    termination: str
    nfev: int = 0
    nsteps: int = 0
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def dU(self):
        return -self.F1 / self.r

    @property
    def dV(self):
        return -self.F2 / self.r

    @property
    def u(self):
        return self.U + 2 * self.n1 * np.log(self.r)

    @property
    def v(self):
        return self.V + 2 * self.n2 * np.log(self.r)

    @property
    def terminal_r(self):
        return float(self.r[-1])

    def index_at(self, r):
        """Index of the last checkpoint not beyond ``r``."""
        return max(0, int(np.searchsorted(self.r, r * (1 + 1e-12), side="right")) - 1)


def _series_terms(alpha1, alpha2, n1, n2):
    """``(coefficient, power)`` of the leading terms of the series start."""
    m = n1 + n2 + 1
    return {
        "uv": (math.exp(alpha1 + alpha2), 2 * m),
        "u": (math.exp(alpha1), 2 * n1 + 2),
        "v": (math.exp(alpha2), 2 * n2 + 2),
    }


def auto_r_start(init, n1, n2, size=1e-7, r_hi=1e-2):
    """Largest radius (capped at ``r_hi``) where every leading series term is
    at most ``size``; the dropped terms are then of order ``size**2``."""
    r0 = r_hi
    for c, k in _series_terms(init.alpha1, init.alpha2, n1, n2).values():
        # term c r^k / k^2 <= size
        r0 = min(r0, math.exp((math.log(size * k * k) - math.log(c)) / k))
    return r0


def series_start(init, r_start, n1, n2):
    """State of the Cauchy problem at a small radius from its Taylor series.

    Returns
    -------
    tuple
        ``(U, V, dU, dV)`` at ``r_start``.
    """
    y = _series_state(init, r_start, n1, n2)
    return y[0], y[1], y[2] / r_start, y[3] / r_start


def _series_state(init, r, n1, n2):
    t = _series_terms(init.alpha1, init.alpha2, n1, n2)
    # each cumulative integral int_0^r t^{k-1} c dt = c r^k / k
    i = {key: c * r**k / k for key, (c, k) in t.items()}
    j = {key: i[key] / t[key][1] for key in t}
    U = init.alpha1 - j["v"] - j["uv"]
    V = init.alpha2 + j["u"] - j["uv"]
    p = -(i["uv"] + i["v"])
    q = -(i["uv"] - i["u"])
    return np.array([U, V, p, q, i["uv"], i["u"], i["v"]])


def _rhs_factory(n1, n2):
    ku, kv, kuv = 2 * n1 + 2, 2 * n2 + 2, 2 * (n1 + n2 + 1)

    def rhs(s, y):
        e_uv = math.exp(min(kuv * s + y[0] + y[1], _EXP_CAP))
        e_u = math.exp(min(ku * s + y[0], _EXP_CAP))
        e_v = math.exp(min(kv * s + y[1], _EXP_CAP))
        return np.array([y[2], y[3], -(e_uv + e_v), -(e_uv - e_u), e_uv, e_u, e_v])

    return rhs


def _checkpoint_grid(r_start, r_max, ppd):
    lo = math.ceil(math.log10(r_start) * ppd + 1e-9)
    hi = math.floor(math.log10(r_max) * ppd + 1e-9)
    idx = np.arange(lo, hi + 1)
    grid = 10.0 ** (idx / ppd)
    keep = grid > r_start * (1 + 1e-12)
    return idx[keep], grid[keep]


class _Recorder:
    def __init__(self, n1, n2):
        self.n1, self.n2 = n1, n2
        self.r = []
        self.y = []

    def add(self, r, y):
        self.r.append(r)
        self.y.append(np.array(y, dtype=float))

    def v(self, k=-1):
        return self.y[k][1] + 2 * self.n2 * math.log(self.r[k])

    def u(self, k=-1):
        return self.y[k][0] + 2 * self.n1 * math.log(self.r[k])

    def terms(self, k=-1):
        y = self.y[k]
        return tail_terms(self.r[k], self.u(k), self.v(k), -y[2], -y[3], y[4], y[5], y[6],
                          self.n1, self.n2)


def integrate_profile(n1, n2, init, controls=None):
    """Integrate the Cauchy problem for multiplicities ``(n1, n2)``.

    See :func:`integrate` for the parameter-object form.
    """
    ctl = controls or IntegrationControls()
    if not (math.isfinite(init.alpha1) and math.isfinite(init.alpha2)):
        raise ValueError("initial data must be finite")
    t0 = time.perf_counter()
    r0 = ctl.r_start if ctl.r_start is not None else auto_r_start(init, n1, n2)
    r0 = min(r0, ctl.r_max / 10.0)
    s0, s_end = math.log(r0), math.log(ctl.r_max)
    y0 = _series_state(init, r0, n1, n2)
    rhs = _rhs_factory(n1, n2)
    solver_cls = {"RK45": _ode.RK45, "DOP853": _ode.DOP853, "RK23": _ode.RK23}.get(ctl.method)
    if solver_cls is None:
        raise ValueError(f"unknown method {ctl.method!r}")
    solver = solver_cls(rhs, s0, y0, s_end, rtol=ctl.rtol, atol=ctl.atol)

    idx, grid = _checkpoint_grid(r0, ctl.r_max, ctl.points_per_decade)
    s_grid = np.log(grid)
    rec = _Recorder(n1, n2)
    rec.add(r0, y0)
    nxt = 0
    nsteps = 0
    termination = "r_max"
    threshold = 2.0 * (n2 + 1)
    seen_zero = False
    decade_terms = []  # tail terms at decade checkpoints

    def decide_converged():
        t_now = rec.terms()
        decade_terms.append(t_now)
        if len(decade_terms) < 2:
            return None
        t_prev = decade_terms[-2]
        if t_now.valid and t_prev.valid and rec.v() < 0 and rec.u() < 0:
            stable = all(
                abs(getattr(t_now, k) - getattr(t_prev, k)) <= ctl.tail_tol * (1 + abs(getattr(t_now, k)))
                for k in ("f1_inf", "f2_inf")
            )
            if stable and t_now.lag < ctl.lag_tol:
                return "tail_converged"
        return None

    def decide_settled_below():
        # F2 can only grow by the remaining e^{u+v} mass, bounded by its power-law tail
        if not seen_zero or len(rec.y) <= ctl.points_per_decade:
            return None
        y = rec.y[-1]
        u_now, v_now = rec.u(), rec.v()
        if u_now >= 0:
            return None
        sb = settled_f2(rec.r[-1], u_now, v_now, -y[2], -y[3], n1, n2)
        if sb is None:
            return None
        upper, est = sb
        if upper >= threshold - ctl.band or -rec.y[-1 - ctl.points_per_decade][3] >= threshold - ctl.band:
            return None
        # the zero count of v must be decidable as well
        if v_now < 0 or upper < 2 * n2 - ctl.band or est > 2 * n2 + ctl.band:
            return "non_integrable"
        return None

    while solver.status == "running":
        if nsteps >= ctl.max_steps:
            raise IntegrationError(f"step limit {ctl.max_steps} reached", math.exp(solver.t), solver.y.copy())
        # oversized trial steps can overflow the error norm; they are rejected anyway
        with np.errstate(over="ignore"):
            msg = solver.step()
        nsteps += 1
        if solver.status == "failed":
            raise IntegrationError(f"integrator failed: {msg}", math.exp(solver.t), solver.y.copy())
        y = solver.y
        big = 2 * (n1 + n2 + 1) * solver.t + y[0] + y[1]
        if big > _EXP_CAP:
            raise IntegrationError("r^{2m} e^{U+V} overflowed", math.exp(solver.t), y.copy())
        stop = None
        if nxt < len(s_grid) and s_grid[nxt] <= solver.t:
            dense = solver.dense_output()
            while nxt < len(s_grid) and s_grid[nxt] <= solver.t:
                yk = dense(s_grid[nxt])
                rec.add(grid[nxt], yk)
                if rec.v() >= 0:
                    seen_zero = True
                if ctl.early_stop:
                    stop = decide_settled_below()
                    if not stop and idx[nxt] % ctl.points_per_decade == 0:
                        stop = decide_converged()
                nxt += 1
                if stop:
                    break
        if stop:
            termination = stop
            break
        v_now = y[1] + 2 * n2 * solver.t
        if v_now > ctl.v_cap and -y[3] < 2 * n2:
            if solver.t > math.log(rec.r[-1]) * (1 + 1e-15) + 1e-15:
                rec.add(math.exp(solver.t), y)
            termination = "v_cap"
            break

    if termination == "r_max" and rec.r[-1] < ctl.r_max * (1 - 1e-12):
        rec.add(math.exp(solver.t), solver.y)

    Y = np.array(rec.y)
    prof = RadialProfile(
        n1=n1, n2=n2, init=init, controls=ctl, r=np.array(rec.r),
        U=Y[:, 0], V=Y[:, 1], F1=-Y[:, 2], F2=-Y[:, 3], Iuv=Y[:, 4], Iu=Y[:, 5], Iv=Y[:, 6],
        termination=termination, nfev=solver.nfev, nsteps=nsteps,
        wall_time=time.perf_counter() - t0,
    )
    return prof


def integrate(params: VortexParams, init: InitialData, controls: IntegrationControls | None = None):
    """Integrate the radial Cauchy problem for ``params.n1, params.n2``.

    Parameters
    ----------
    params : VortexParams
        Only the multiplicities enter; the problem is dimensionless.
    init : InitialData
    controls : IntegrationControls, optional

    Returns
    -------
    RadialProfile

    Raises
    ------
    IntegrationError
        On step failure or when ``r^{2m} e^{U+V}`` would overflow.
    """
    return integrate_profile(params.n1, params.n2, init, controls)


def rk4_fixed(n1, n2, init, r_end, n_steps, r_start=None):
    """Classical fixed-step RK4 in ``s = ln r``; an independent cross-check.

    Returns the state ``(U, V, p, q, I_uv, I_u, I_v)`` at ``r_end``.
    """
    r0 = r_start if r_start is not None else auto_r_start(init, n1, n2)
    s, s_end = math.log(r0), math.log(r_end)
    h = (s_end - s) / n_steps
    y = _series_state(init, r0, n1, n2)
    f = _rhs_factory(n1, n2)
    for _ in range(n_steps):
        k1 = f(s, y)
        k2 = f(s + h / 2, y + h / 2 * k1)
        k3 = f(s + h / 2, y + h / 2 * k2)
        k4 = f(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    return y


def continuity_check(params, init, delta, controls=None, r_window=5.0):
    """Sup distance of ``(U, V)`` on ``(0, r_window]`` between two nearby runs.

    ``delta`` is a scalar added to both components or a pair
    ``(d_alpha1, d_alpha2)``.
    """
    d1, d2 = (delta, delta) if np.ndim(delta) == 0 else tuple(delta)
    other = InitialData(init.alpha1 + d1, init.alpha2 + d2, None)
    base = controls or IntegrationControls()
    r0 = min(auto_r_start(init, params.n1, params.n2), auto_r_start(other, params.n1, params.n2))
    ctl = replace(base, r_max=r_window, r_start=r0, early_stop=False, v_cap=math.inf)
    a = integrate(params, init, ctl)
    b = integrate(params, other, ctl)
    n = min(a.r.size, b.r.size)
    if not np.allclose(a.r[:n], b.r[:n], rtol=1e-14, atol=0):
        raise IntegrationError("checkpoint grids of the two runs differ")
    return float(max(np.max(np.abs(a.U[:n] - b.U[:n])), np.max(np.abs(a.V[:n] - b.V[:n]))))
