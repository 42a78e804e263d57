"""Explicit Liouville profiles and the inverse of their radial linearisation.

The limit system ``-Delta u0 = e^{u0+v0} - 4 pi N1 delta``,
``-Delta v0 = e^{u0+v0} - 4 pi N2 delta`` has the normalised radial
solution

    e^{u0} = 2m r^{2 N1} / (1 + r^{2m}),   e^{v0} = 2m r^{2 N2} / (1 + r^{2m}),

with ``m = N1 + N2 + 1``.  Linearising around it gives the radial operator
``L w = w'' + w'/r + rho w`` with ``rho = 2 e^{u0+v0}``; its bounded kernel
is spanned by ``phi0(r) = (1 - r^{2m}) / (1 + r^{2m})`` and
:func:`green_solve` inverts it by variation of parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._quad import LogCumulative

__all__ = [
    "QuadratureError",
    "BaselinePoint",
    "baseline",
    "exp_u0",
    "exp_v0",
    "rho",
    "phi0",
    "psi0",
    "green_solve",
    "GreenSolver",
    "green_constant",
    "sigma_integrals",
    "liouville_mass",
]


class QuadratureError(RuntimeError):
    """An adaptive quadrature did not reach its tolerance."""


def _check_n(n1, n2):
    for name, val in (("n1", n1), ("n2", n2)):
        if int(val) != val or val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val!r}")


@dataclass(frozen=True)
class BaselinePoint:
    """Values of the Liouville baseline at radius ``r``.

    ``u0`` and ``v0`` are logarithms and equal ``-inf`` at the vortex point;
    use ``eu0``/``ev0`` in arithmetic.
    """

    r: float
    u0: float
    v0: float
    eu0: float
    ev0: float
    rho: float


def _log1p_pow(r, m):
    """``ln(1 + r^{2m})`` without overflow."""
    with np.errstate(divide="ignore"):
        lr = np.log(r)
    return np.logaddexp(0.0, 2 * m * lr)


def _log_baseline(r, n1, n2):
    r = np.asarray(r, dtype=float)
    m = n1 + n2 + 1
    with np.errstate(divide="ignore"):
        lr = np.log(r)
        den = _log1p_pow(r, m)
        u0 = np.log(2 * m) + np.where(r > 0, 2 * n1 * lr, -np.inf) - den
        v0 = np.log(2 * m) + np.where(r > 0, 2 * n2 * lr, -np.inf) - den
    return u0, v0


def exp_u0(r, n1, n2):
    return np.exp(_log_baseline(r, n1, n2)[0])


def exp_v0(r, n1, n2):
    return np.exp(_log_baseline(r, n1, n2)[1])


def rho(r, n1, n2):
    """``2 e^{u0+v0} = 8 m^2 r^{2(m-1)} / (1 + r^{2m})^2``."""
    u0, v0 = _log_baseline(r, n1, n2)
    return 2.0 * np.exp(u0 + v0)


def baseline(r, n1, n2):
    """Liouville baseline at a single radius ``r >= 0``."""
    _check_n(n1, n2)
    if r < 0:
        raise ValueError("radius must be non-negative")
    u0, v0 = _log_baseline(float(r), n1, n2)
    u0, v0 = float(u0), float(v0)
    return BaselinePoint(
        r=float(r), u0=u0, v0=v0, eu0=float(np.exp(u0)), ev0=float(np.exp(v0)),
        rho=float(2.0 * np.exp(u0 + v0)),
    )


def phi0(r, n1, n2):
    """Kernel function ``(1 - r^{2m}) / (1 + r^{2m})``."""
    r = np.asarray(r, dtype=float)
    m = n1 + n2 + 1
    with np.errstate(divide="ignore"):
        out = -np.tanh(m * np.log(r))
    return np.where(r > 0, out, 1.0)


def psi0(r, n1, n2):
    """Second (log-growing) solution of ``L w = 0``.

    ``r (phi0 psi0' - phi0' psi0) = 1``, which normalises the variation of
    parameters formula used by :func:`green_solve`.
    """
    r = np.asarray(r, dtype=float)
    m = n1 + n2 + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.log(r)
        out = phi0(r, n1, n2) * lr + 2.0 / (m * (1.0 + np.exp(np.minimum(2 * m * lr, 700.0))))
    return out


class GreenSolver:
    """Cached inverse of the radial operator for a fixed right-hand side.

    Tabulates ``A(r) = int_0^r phi0 f t dt`` and ``B(r) = int_0^r psi0 f t dt``
    once on log panels; ``w(r) = psi0(r) A(r) - phi0(r) B(r)`` solves
    ``w'' + w'/r + rho w = f`` with ``w(0) = 0``.

    ``f`` must be vectorised and satisfy ``t f(t) log t -> 0`` at both ends.
    """

    def __init__(self, f, n1, n2, t_min=1e-12, t_max=1e12, panels_per_decade=8, order=16):
        _check_n(n1, n2)
        self.n1, self.n2 = n1, n2
        self.f = f

        def integrands(t):
            ft = np.asarray(f(t), dtype=float)
            return np.vstack([phi0(t, n1, n2) * ft * t, psi0(t, n1, n2) * ft * t])

        self._cum = LogCumulative(integrands, t_min, t_max, panels_per_decade, order)

    @property
    def c_f(self):
        """``int_0^inf phi0 f t dt``: ``w(r) = -c_f ln r + O(1)`` at infinity."""
        return float(self._cum.total[0])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        a, b = self._cum(r)
        with np.errstate(invalid="ignore"):
            w = psi0(r, self.n1, self.n2) * a - phi0(r, self.n1, self.n2) * b
        return np.where(r > 0, w, 0.0)


def green_solve(f, r, n1, n2):
    """Solve ``w'' + w'/r + rho w = f`` at radius (or radii) ``r``.

    Thin wrapper around :class:`GreenSolver`; build the solver directly when
    evaluating the same ``f`` repeatedly.
    """
    return GreenSolver(f, n1, n2)(r)


def green_constant(f, n1, n2):
    """``c_f = int_0^inf phi0(t) f(t) t dt`` by adaptive quadrature."""
    return _quad_half_line(lambda t: phi0(t, n1, n2) * f(t) * t)


def _quad_half_line(g, epsabs=1e-10, epsrel=1e-8):
    total = 0.0
    for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _err = integrate.quad(g, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge: {exc}") from exc
        total += val
    return total


def sigma_integrals(n1, n2):
    """Finite integrals governing the log growth of the first-order profile.

    Returns
    -------
    sigma1 : float
        ``int_0^inf phi0 (e^{u0} - e^{v0}) t dt`` (zero when ``n1 == n2``).
    sigma2 : float
        ``int_0^inf (e^{u0} + e^{v0}) t dt``.
    """
    _check_n(n1, n2)
    s1 = 0.0 if n1 == n2 else _quad_half_line(
        lambda t: float(phi0(t, n1, n2) * (exp_u0(t, n1, n2) - exp_v0(t, n1, n2)) * t)
    )
    s2 = _quad_half_line(lambda t: float((exp_u0(t, n1, n2) + exp_v0(t, n1, n2)) * t))
    return s1, s2


def liouville_mass(n1, n2):
    """``int_0^inf r e^{u0+v0} dr`` (analytically ``2 (N1 + N2 + 1)``)."""
    _check_n(n1, n2)
    return _quad_half_line(lambda t: float(0.5 * rho(t, n1, n2) * t), epsabs=1e-13, epsrel=1e-12)
