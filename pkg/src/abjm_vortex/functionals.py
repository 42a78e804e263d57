"""Limits of the radial functionals and power-law tail corrections.

Beyond the last radius ``R`` of an integrable run the densities decay like
powers: ``r^2 e^u ~ r^{-(2 beta1 - 2)}``, ``r^2 e^v ~ r^{-(2 beta2 - 2)}``
and ``r^2 e^{u+v}`` faster than both.  Integrating the power laws from ``R``
to infinity gives the tail terms

    T_u  = R^2 e^u / (a_u - 2),   T_v = R^2 e^v / (a_v - 2),
    T_uv = R^2 e^{u+v} / (a_u + a_v - 2),

with ``a_u = F1 - 2 N1`` and ``a_v = F2 - 2 N2``.  Evaluating the exponents
at the extrapolated limits (one fixed-point pass) leaves an error quadratic
in the truncation lag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TailTerms",
    "settled_f2",
    "tail_terms",
    "TailEstimate",
    "tail_extrapolate",
    "limit_integrals",
    "slope_fit",
    "final_decade_slopes",
    "INTEGRABLE",
    "NON_INTEGRABLE",
    "INCONCLUSIVE",
]

INTEGRABLE = "integrable"
NON_INTEGRABLE = "non-integrable"
INCONCLUSIVE = "inconclusive"

# relative change of the extrapolated fluxes over the final decade below
# which an unconverged tail is still trusted
STABLE_DRIFT = 1e-6


@dataclass(frozen=True)
class TailTerms:
    """Tail-corrected limits evaluated from the state at one radius.

    ``valid`` is False when a decay exponent has the wrong sign, in which
    case the power-law tails are meaningless and the limits are ``nan``.
    """

    r: float
    f1_inf: float
    f2_inf: float
    int_euv: float
    int_eu: float
    int_ev: float
    t_u: float
    t_v: float
    t_uv: float
    valid: bool

    @property
    def lag(self):
        """Relative size of the tail terms against the decay exponents."""
        if not self.valid:
            return math.inf
        return max(self.t_v / max(self.f1_inf, 1e-300), (self.t_uv + self.t_u) / max(abs(self.f2_inf), 1e-300))


def _exp(x):
    return math.exp(min(x, 700.0))


def tail_terms(r, u, v, f1, f2, iuv, iu, iv, n1, n2):
    """Tail-corrected limits from the local state at radius ``r``.

    ``u`` and ``v`` are the singular variables (``U + 2 N1 ln r`` etc.),
    ``iuv, iu, iv`` the cumulative integrals of ``t e^{u+v}``, ``t e^u`` and
    ``t e^v`` up to ``r``.
    """
    lr2 = 2.0 * math.log(r)
    e_u, e_v, e_uv = _exp(lr2 + u), _exp(lr2 + v), _exp(lr2 + u + v)
    g1, g2 = f1, f2
    terms = (math.nan, math.nan, math.nan)
    ok = False
    for _ in range(2):
        a_u, a_v = g1 - 2 * n1, g2 - 2 * n2
        d_u, d_v, d_uv = a_u - 2, a_v - 2, a_u + a_v - 2
        if min(d_u, d_v, d_uv) <= 0:
            ok = False
            break
        ok = True
        terms = (e_u / d_u, e_v / d_v, e_uv / d_uv)
        t_u, t_v, t_uv = terms
        g1 = f1 + t_uv + t_v
        g2 = f2 + t_uv - t_u
    if not ok:
        return TailTerms(r, math.nan, math.nan, math.nan, math.nan, math.nan,
                         math.nan, math.nan, math.nan, False)
    t_u, t_v, t_uv = terms
    return TailTerms(
        r=r, f1_inf=g1, f2_inf=g2, int_euv=iuv + t_uv, int_eu=iu + t_u, int_ev=iv + t_v,
        t_u=t_u, t_v=t_v, t_uv=t_uv, valid=True,
    )


def settled_f2(r, u, v, f1, f2, n1, n2):
    """Bounds on ``F2(inf)`` once ``e^{u+v}`` and ``e^u`` decay.

    Returns ``(upper, estimate)`` where ``upper = F2 + T_uv`` ignores the
    negative ``e^u`` tail, or ``None`` while ``r^2 e^{u+v}`` still grows.
    Unlike :func:`tail_terms` this does not require ``e^v`` to be integrable.
    """
    lr2 = 2.0 * math.log(r)
    d_uv = f1 + f2 - 2 * (n1 + n2) - 2
    if d_uv <= 0:
        return None
    upper = f2 + _exp(lr2 + u + v) / d_uv
    d_u = f1 - 2 * n1 - 2
    t_u = _exp(lr2 + u) / d_u if d_u > 0 else 0.0
    return upper, upper - t_u


@dataclass
class TailEstimate:
    """Extrapolated limits of a radial run.

    ``uncertainty`` maps each of ``f1_inf, f2_inf, int_euv, int_eu, int_ev``
    to an error bound: the change of the estimate between the terminal
    radius and one decade earlier plus a multiple of the integrator
    tolerance.  ``decided`` is one of ``"integrable"``,
    ``"non-integrable"`` and ``"inconclusive"``.
    """

    n1: int
    n2: int
    f1_inf: float
    f2_inf: float
    int_euv: float
    int_eu: float
    int_ev: float
    uncertainty: dict
    decided: str
    terminal_r: float
    diagnostics: list = field(default_factory=list)

    @property
    def beta1(self):
        return 0.5 * self.f1_inf - self.n1

    @property
    def beta2(self):
        return 0.5 * self.f2_inf - self.n2

    @property
    def flux1_over_2pi(self):
        return 0.5 * self.f1_inf

    @property
    def flux2_over_2pi(self):
        return 0.5 * self.f2_inf

    def as_dict(self):
        return {
            "F1_inf": self.f1_inf,
            "F2_inf": self.f2_inf,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "int_euv": self.int_euv,
            "int_eu": self.int_eu,
            "int_ev": self.int_ev,
            "uncertainty": dict(self.uncertainty),
            "decided": self.decided,
            "terminal_r": self.terminal_r,
            "diagnostics": list(self.diagnostics),
        }


_FIELDS = ("f1_inf", "f2_inf", "int_euv", "int_eu", "int_ev")


def _terms_at(profile, i):
    return tail_terms(
        profile.r[i], profile.u[i], profile.v[i], profile.F1[i], profile.F2[i],
        profile.Iuv[i], profile.Iu[i], profile.Iv[i], profile.n1, profile.n2,
    )


def tail_extrapolate(profile, n1=None, n2=None, band=None):
    """Tail-corrected limits and integrability verdict of a profile.

    Parameters
    ----------
    profile : RadialProfile
    n1, n2 : int, optional
        Must agree with the profile when given.
    band : float, optional
        Half-width of the undecidable window around ``F2 = 2 (N2 + 1)``;
        defaults to the profile's integration controls.

    Returns
    -------
    TailEstimate
    """
    if n1 is not None and n1 != profile.n1 or n2 is not None and n2 != profile.n2:
        raise ValueError("multiplicities disagree with the profile")
    n1, n2 = profile.n1, profile.n2
    ctl = profile.controls
    band = ctl.band if band is None else band
    threshold = 2.0 * (n2 + 1)
    diag = []
    nan_unc = {k: math.nan for k in _FIELDS}

    if profile.termination in ("v_cap", "non_integrable"):
        r, u, v = profile.r[-1], profile.u[-1], profile.v[-1]
        f1, f2 = profile.F1[-1], profile.F2[-1]
        sb = settled_f2(r, u, v, f1, f2, n1, n2)
        iuv, iu = float(profile.Iuv[-1]), float(profile.Iu[-1])
        if sb is not None:
            # e^{u+v} and e^u stay integrable on every run
            t_uv = sb[0] - f2
            t_u = sb[0] - sb[1]
            f2, iuv, iu = sb[1], iuv + t_uv, iu + t_u
        diag.append(f"stopped early ({profile.termination}); F1 grows without bound")
        return TailEstimate(n1, n2, math.inf, float(f2), iuv, iu, math.inf,
                            nan_unc, NON_INTEGRABLE, float(r), diag)

    last = _terms_at(profile, -1)
    i_prev = profile.index_at(profile.r[-1] / 10.0)
    prev = _terms_at(profile, i_prev)
    if not last.valid:
        diag.append("decay exponents at the terminal radius do not admit a power-law tail")
        f2 = float(profile.F2[-1])
        verdict = NON_INTEGRABLE if f2 < threshold - band and profile.u[-1] < 0 else INCONCLUSIVE
        return TailEstimate(n1, n2, math.nan, f2, math.nan, math.nan, math.nan,
                            nan_unc, verdict, float(profile.r[-1]), diag)

    unc = {}
    for k in _FIELDS:
        a = getattr(last, k)
        b = getattr(prev, k) if prev.valid else math.nan
        change = abs(a - b) if math.isfinite(b) else abs(getattr(last, {
            "f1_inf": "t_v", "f2_inf": "t_u", "int_euv": "t_uv", "int_eu": "t_u", "int_ev": "t_v"}[k]))
        unc[k] = change + 10.0 * ctl.rtol * abs(a)

    f2 = last.f2_inf
    if f2 > threshold + band:
        verdict = INTEGRABLE
    elif f2 < threshold - band:
        verdict = NON_INTEGRABLE
    else:
        verdict = INCONCLUSIVE
        diag.append(f"F2(inf)={f2:.6g} within {band:g} of 2(N2+1)")
    if profile.termination != "tail_converged" and verdict == INTEGRABLE and last.lag > ctl.lag_tol:
        # a slow e^v tail still extrapolates well when the limits stopped moving
        drift = max(unc[k] / max(abs(getattr(last, k)), 1e-300) for k in ("f1_inf", "f2_inf"))
        if prev.valid and drift < STABLE_DRIFT:
            diag.append(f"slow tail at r={profile.r[-1]:.3g} (lag {last.lag:.2e}, drift {drift:.1e})")
        else:
            verdict = INCONCLUSIVE
            diag.append(f"tail not converged at r={profile.r[-1]:.3g} (lag {last.lag:.2e})")
    return TailEstimate(
        n1, n2, last.f1_inf, f2, last.int_euv, last.int_eu, last.int_ev,
        unc, verdict, float(profile.r[-1]), diag,
    )


def limit_integrals(estimate, n1=None, n2=None):
    """Closed-form limits of the three radial integrals from the exponents.

    Returns ``(int t e^{u+v}, int t e^u, int t e^v)`` predicted by
    ``beta1, beta2`` through the Pohozaev identities at infinity.
    """
    n1 = estimate.n1 if n1 is None else n1
    n2 = estimate.n2 if n2 is None else n2
    b1, b2 = estimate.beta1, estimate.beta2
    i_uv = 2 * (n1 + 1) * (n2 + 1) - 2 * (b1 - 1) * (b2 - 1)
    i_u = 2 * n1 * (n2 + 1) - 2 * b1 * (b2 - 1)
    i_v = 2 * b2 * (b1 - 1) - 2 * n2 * (n1 + 1)
    return i_uv, i_u, i_v


def slope_fit(r, y):
    """Least-squares slope of ``y`` against ``ln r``."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    if r.size < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(np.log(r), y, 1)[0])


def final_decade_slopes(profile, min_points=20):
    """Slopes of ``u`` and ``v`` against ``ln r`` over the last decade.

    Returns ``(slope_u, slope_v)``; for an integrable run these approach
    ``-2 beta1`` and ``-2 beta2``.
    """
    mask = profile.r >= profile.r[-1] / 10.0
    if mask.sum() < min_points:
        raise ValueError(f"only {mask.sum()} checkpoints in the final decade (need {min_points})")
    return slope_fit(profile.r[mask], profile.u[mask]), slope_fit(profile.r[mask], profile.v[mask])
