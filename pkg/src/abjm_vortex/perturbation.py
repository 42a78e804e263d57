"""First-order concentrating profiles around the Liouville baseline.

For small ``eps`` the scaled pair

    u(r) = u0(r/eps) + eps u2(r/eps) + ln(1/eps)
    v(r) = v0(r/eps) + eps v2(r/eps) + ln(1/eps)

approximates a radial solution whose interaction density ``e^{u+v}``
concentrates at the origin.  ``(u2, v2)`` is built from explicit quadratures:
``u2 + v2`` inverts the linearised Liouville operator applied to
``e^{u0} - e^{v0}`` and ``u2 - v2`` is the radial Newton potential of
``-(e^{u0} + e^{v0})``.  The nonlinear correction of size ``o(eps)`` is not
computed; :func:`scaled_residual_norm` measures what the truncation leaves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import liouville as lv
from ._quad import LogCumulative, log_quad
from .params import VortexParams, physical_energy

__all__ = [
    "FirstOrderProfile",
    "first_order",
    "u2_v2",
    "perturb_profile",
    "PerturbProfile",
    "make_profile",
    "profile_fluxes",
    "scaled_residual_norm",
    "ConcentrationRow",
    "concentration_report",
    "EPS_SOFT_CAP",
]

EPS_SOFT_CAP = 0.2

# scaled radii covered by the cached quadratures
_T_MIN, _T_MAX = 1e-12, 1e12


class FirstOrderProfile:
    """Cached evaluator of ``(u2, v2)`` for fixed multiplicities."""

    def __init__(self, n1, n2):
        lv._check_n(n1, n2)
        self.n1, self.n2 = n1, n2
        self.sigma1, self.sigma2 = lv.sigma_integrals(n1, n2)

        def f_minus(t):
            return lv.exp_u0(t, n1, n2) - lv.exp_v0(t, n1, n2)

        def plus_moments(t):
            g = (lv.exp_u0(t, n1, n2) + lv.exp_v0(t, n1, n2)) * t
            return np.vstack([g, g * np.log(t)])

        self._sum = lv.GreenSolver(f_minus, n1, n2, _T_MIN, _T_MAX)
        self._plus = LogCumulative(plus_moments, _T_MIN, _T_MAX)

    def sum_part(self, r):
        """``u2 + v2``."""
        return self._sum(r)

    def diff_part(self, r):
        """``u2 - v2``."""
        r = np.asarray(r, dtype=float)
        p, q = self._plus(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.log(r) * p + q
        return np.where(r > 0, out, 0.0)

    def __call__(self, r):
        s = self.sum_part(r)
        d = self.diff_part(r)
        return 0.5 * (s + d), 0.5 * (s - d)


@lru_cache(maxsize=16)
def first_order(n1, n2):
    """Shared :class:`FirstOrderProfile` instance (read-only after build)."""
    return FirstOrderProfile(n1, n2)


def u2_v2(r, n1, n2):
    """First-order corrections ``(u2(r), v2(r))``.

    Both vanish at ``r = 0``; at infinity ``u2 ~ -(sigma1 + sigma2)/2 ln r``
    and ``v2 ~ -(sigma1 - sigma2)/2 ln r``.
    """
    return first_order(n1, n2)(r)


def _check_eps(eps):
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    if eps > EPS_SOFT_CAP:
        warnings.warn(
            f"eps={eps} exceeds {EPS_SOFT_CAP}; the first-order truncation is "
            "not expected to be accurate", RuntimeWarning, stacklevel=3,
        )


def perturb_profile(eps, r, n1, n2):
    """First-order profile ``(u^eps(r), v^eps(r))`` in dimensionless radius."""
    _check_eps(eps)
    x = np.asarray(r, dtype=float) / eps
    u0, v0 = lv._log_baseline(x, n1, n2)
    u2, v2 = u2_v2(x, n1, n2)
    shift = math.log(1.0 / eps)
    return u0 + eps * u2 + shift, v0 + eps * v2 + shift


@dataclass
class PerturbProfile:
    """Samples of a first-order profile on a radial grid."""

    eps: float
    n1: int
    n2: int
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        gap = self.u - self.v - 2 * (self.n1 - self.n2) * np.log(self.r / self.eps)
        x = self.r / self.eps
        u2, v2 = u2_v2(x, self.n1, self.n2)
        if not np.allclose(gap, self.eps * (u2 - v2), atol=1e-9, rtol=1e-9):
            raise ValueError("profile samples are inconsistent with the first-order construction")


def make_profile(eps, n1, n2, r=None, points_per_decade=40):
    """Sample the first-order profile on a log grid spanning both scales."""
    if r is None:
        lo, hi = math.log10(eps * 1e-4), math.log10(1e6 / eps)
        r = np.logspace(lo, hi, int((hi - lo) * points_per_decade) + 1)
    r = np.asarray(r, dtype=float)
    u, v = perturb_profile(eps, r, n1, n2)
    return PerturbProfile(eps=eps, n1=n1, n2=n2, r=r, u=u, v=v)


@dataclass
class ProfileIntegrals:
    """Radial integrals of a first-order profile (dimensionless radius)."""

    eps: float
    f1: float
    f2: float
    int_euv: float
    int_eu: float
    int_ev: float

    @property
    def flux1_over_2pi(self):
        return 0.5 * self.f1

    @property
    def flux2_over_2pi(self):
        return 0.5 * self.f2


def profile_fluxes(eps, n1, n2, x_min=1e-10, x_max=1e10):
    """Flux functionals and radial integrals of the first-order profile.

    Integrals are evaluated in the scaled radius ``x = r / eps`` where
    ``int r e^{u} dr = eps int x e^{u0 + eps u2} dx`` and
    ``int r e^{u+v} dr = int x e^{u0+v0+eps(u2+v2)} dx``.
    """
    _check_eps(eps)
    prof = first_order(n1, n2)

    def integrands(x):
        u0, v0 = lv._log_baseline(x, n1, n2)
        u2, v2 = prof(x)
        return np.vstack([
            np.exp(u0 + v0 + eps * (u2 + v2)),
            eps * np.exp(u0 + eps * u2),
            eps * np.exp(v0 + eps * v2),
        ]) * x

    i_uv, i_u, i_v = log_quad(integrands, x_min, x_max)
    return ProfileIntegrals(
        eps=eps, f1=i_uv + i_v, f2=i_uv - i_u, int_euv=i_uv, int_eu=i_u, int_ev=i_v,
    )


def scaled_residual_norm(eps, n1, n2, weight_exponent=0.5):
    """Weighted L2 norm of the residual of the truncated profile.

    In the scaled variable the exact system reads
    ``-Delta u = e^{u+v} + eps e^v``, ``-Delta v = e^{u+v} - eps e^u``.
    Using the equations satisfied by ``u0, v0, u2, v2`` the residual of
    ``(u0 + eps u2, v0 + eps v2)`` is

        R1 = e^{u0+v0} (e^{eps S} - 1 - eps S) + eps e^{v0} (e^{eps v2} - 1)
        R2 = e^{u0+v0} (e^{eps S} - 1 - eps S) - eps e^{u0} (e^{eps u2} - 1)

    with ``S = u2 + v2``.  Returns ``(||R1||, ||R2||)`` in the norm
    ``int (1 + |x|^{2+a}) R^2 dx``.
    """
    prof = first_order(n1, n2)

    def sq(x):
        u0, v0 = lv._log_baseline(x, n1, n2)
        u2, v2 = prof(x)
        s = u2 + v2
        common = np.exp(u0 + v0) * (np.expm1(eps * s) - eps * s)
        r1 = common + eps * np.exp(v0) * np.expm1(eps * v2)
        r2 = common - eps * np.exp(u0) * np.expm1(eps * u2)
        w = 2 * np.pi * (1 + x ** (2 + weight_exponent)) * x
        return np.vstack([w * r1**2, w * r2**2])

    a, b = log_quad(sq, 1e-8, 1e8)
    return math.sqrt(a), math.sqrt(b)


@dataclass
class ConcentrationRow:
    eps: float
    flux1_over_2pi: float
    flux2_over_2pi: float
    energy: float
    mass_inside: float
    mass_total: float
    radius_inside: float
    residual: tuple = field(default=(math.nan, math.nan))

    @property
    def mass_fraction(self):
        return self.mass_inside / self.mass_total


def concentration_report(eps_list, params: VortexParams, core_factor=10.0):
    """Fluxes, energy and core mass of first-order profiles along ``eps``.

    ``mass_inside`` is ``int_0^{core_factor * eps} r e^{u+v} dr``; the energy
    uses the physical prefactor of :func:`params.physical_energy`.
    """
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    n1, n2 = params.n1, params.n2
    prof = first_order(n1, n2)
    rows = []
    for eps in eps_list:
        ints = profile_fluxes(eps, n1, n2)

        def euv(x, eps=eps):
            u0, v0 = lv._log_baseline(x, n1, n2)
            return np.exp(u0 + v0 + eps * prof.sum_part(x)) * x

        inside = log_quad(euv, 1e-10, core_factor)
        rows.append(ConcentrationRow(
            eps=eps,
            flux1_over_2pi=ints.flux1_over_2pi,
            flux2_over_2pi=ints.flux2_over_2pi,
            energy=physical_energy(params, ints.int_eu, ints.int_ev),
            mass_inside=inside,
            mass_total=ints.int_euv,
            radius_inside=core_factor * eps,
            residual=scaled_residual_norm(eps, n1, n2),
        ))
    return rows
