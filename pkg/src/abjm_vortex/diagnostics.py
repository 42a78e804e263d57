"""Identities, bounds and qualitative structure of radial solutions.

Every check works on a :class:`RadialProfile` and returns residuals or
margins (bound minus value) rather than raising, so that the same code
serves validation, reports and regression tests.  Predicates use a slack of
``SLACK`` to absorb round-off in quantities that vanish to leading order at
the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .functionals import INTEGRABLE, TailEstimate, tail_extrapolate

__all__ = [
    "SLACK",
    "pohozaev_residual",
    "PohozaevReport",
    "pohozaev_report",
    "limit_identity_residuals",
    "StructureReport",
    "structure_check",
    "AprioriReport",
    "apriori_check",
    "explicit_mass_bound",
    "xi_limit",
    "BlowupReport",
    "blowup_limit_check",
]

SLACK = 1e-9


def _boundary_term(r, u, v):
    """``r^2 (e^{u+v} + e^v - e^u)``."""
    lr2 = 2.0 * np.log(r)
    return np.exp(lr2 + u + v) + np.exp(lr2 + v) - np.exp(lr2 + u)


def _residuals(n1, n2, r, u, v, f1, f2, iuv, iu, iv):
    ru = 2 * n1 - f1
    rv = 2 * n2 - f2
    b = _boundary_term(r, u, v)
    norm = 4.0 * (n1 + 1) * (n2 + 1)
    res_uv = 2 * iuv - 4 * (n1 + 1) * (n2 + 1) + (ru + 2) * (rv + 2) + b
    # the boundary term enters the e^u identity with a minus sign
    res_u = 2 * iu - 4 * n1 * (n2 + 1) + ru * (rv + 2) + b
    res_v = 2 * iv - rv * (ru + 2) + 4 * n2 * (n1 + 1) - b
    return np.abs(res_uv) / norm, np.abs(res_u) / norm, np.abs(res_v) / norm


def pohozaev_residual(profile, r):
    """Normalised residuals of the three radial Pohozaev identities at ``r``.

    ``r`` must be a checkpoint radius of the profile (the nearest checkpoint
    not beyond ``r`` is used).  Each residual is divided by
    ``4 (N1 + 1) (N2 + 1)``.
    """
    if not profile.r[0] <= r <= profile.r[-1] * (1 + 1e-12):
        raise ValueError(f"r={r} outside the profile range")
    i = profile.index_at(r)
    out = _residuals(profile.n1, profile.n2, profile.r[i], profile.u[i], profile.v[i],
                     profile.F1[i], profile.F2[i], profile.Iuv[i], profile.Iu[i], profile.Iv[i])
    return tuple(float(x) for x in out)


def limit_identity_residuals(est: TailEstimate):
    """Residuals of the Pohozaev identity at infinity and its two rewrites.

    All three are algebraically equivalent given the three limit integrals;
    on exact data they vanish together.
    """
    n1, n2 = est.n1, est.n2
    m = n1 + n2 + 1
    f1, f2 = est.f1_inf, est.f2_inf
    iuv, iu, iv = est.int_euv, est.int_eu, est.int_ev
    norm = 4.0 * (n1 + 1) * (n2 + 1)
    l_prod = (f1 - 2 * (n1 + 1)) * (f2 - 2 * (n2 + 1)) + 2 * iuv - norm
    l_f2 = (f2 - 2 * m) * iuv + 2 * (n1 + 1) * iu + (f2 - 2 * (n2 + 1)) * iv
    l_f1 = (f1 - 2 * m) * iuv - 2 * (n2 + 1) * iv - (f1 - 2 * (n1 + 1)) * iu
    return l_prod / norm, l_f2 / norm, l_f1 / norm


@dataclass
class PohozaevReport:
    radii: np.ndarray
    res_uv: np.ndarray
    res_u: np.ndarray
    res_v: np.ndarray
    lim_product: float
    lim_f2_form: float
    lim_f1_form: float
    zero_structure: "StructureReport"
    predicate_flags: dict

    @property
    def max_residual(self):
        return float(max(self.res_uv.max(), self.res_u.max(), self.res_v.max()))

    def as_dict(self):
        return {
            "max_res_uv": float(self.res_uv.max()),
            "max_res_u": float(self.res_u.max()),
            "max_res_v": float(self.res_v.max()),
            "lim_product": _finite_or_none(self.lim_product),
            "lim_f2_form": _finite_or_none(self.lim_f2_form),
            "lim_f1_form": _finite_or_none(self.lim_f1_form),
            "n_checkpoints": int(self.radii.size),
            "zeros_of_v": [float(z) for z in self.zero_structure.zeros],
            "predicate_flags": dict(self.predicate_flags),
        }


def _finite_or_none(x):
    return float(x) if x is not None and math.isfinite(x) else None


def pohozaev_report(profile, estimate=None, checkpoints=None):
    """Pohozaev residuals at every checkpoint plus the limit identities.

    ``checkpoints`` selects a subset of radii; by default all are used.
    """
    est = estimate or tail_extrapolate(profile)
    if checkpoints is None:
        sel = slice(None)
        radii = profile.r
    else:
        sel = np.array([profile.index_at(c) for c in checkpoints])
        radii = profile.r[sel]
    res = _residuals(profile.n1, profile.n2, radii, profile.u[sel], profile.v[sel],
                     profile.F1[sel], profile.F2[sel], profile.Iuv[sel], profile.Iu[sel], profile.Iv[sel])
    if est.decided == INTEGRABLE:
        l_prod, l_f2, l_f1 = limit_identity_residuals(est)
    else:
        l_prod = l_f2 = l_f1 = math.nan
    st = structure_check(profile, est)
    ap = apriori_check(profile, est)
    flags = {**{f"structure_{k}": v for k, v in st.checks.items()}, **ap.flags}
    return PohozaevReport(radii, res[0], res[1], res[2], l_prod, l_f2, l_f1, st, flags)


def _crossings(x, y, level=0.0):
    """Interpolated abscissae where ``y - level`` changes sign (in ``ln x``)."""
    d = y - level
    out = []
    for i in range(len(d) - 1):
        a, b = d[i], d[i + 1]
        if a == 0.0:
            if i == 0 or d[i - 1] != 0.0:
                out.append(float(x[i]))
            continue
        if a * b < 0:
            la, lb = math.log(x[i]), math.log(x[i + 1])
            out.append(math.exp(la + (lb - la) * a / (a - b)))
    return out


@dataclass
class StructureReport:
    """Zeros of ``v`` and monotonicity facts about ``F1, F2``.

    ``expected_zeros`` is 1 when ``F2(inf) < 2 N2`` and 2 when it is larger;
    ``zeros`` lists the zeros found on the grid, with ``extrapolated_zero``
    holding a second zero predicted beyond the last radius from the final
    slope of ``v``.
    """

    zeros: list
    expected_zeros: int | None
    extrapolated_zero: float | None
    r_star: float | None
    t1_tilde: float | None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def n_zeros(self):
        return len(self.zeros) + (self.extrapolated_zero is not None)

    @property
    def ok(self):
        return all(self.checks.values())


def structure_check(profile, estimate=None):
    """Sign pattern of ``v`` and the monotonicity of ``F2``.

    Checks: ``v < 0`` before its first zero ``r0``; ``F2`` attains its global
    minimum at ``r0``; the number of zeros (one when ``F2(inf) < 2 N2``, two
    otherwise); between two zeros ``v`` has a single maximum where
    ``F2 = 2 N2``; after the last zero ``F2`` is monotone; ``u + 2 ln r``
    has a single maximum, where ``F1 = 2 (N1 + 1)``.
    """
    est = estimate or tail_extrapolate(profile)
    n1, n2 = profile.n1, profile.n2
    r, v, f1, f2 = profile.r, profile.v, profile.F1, profile.F2
    zeros = _crossings(r, v)
    checks = {}
    notes = []
    f2_inf = est.f2_inf
    if math.isfinite(f2_inf) and abs(f2_inf - 2 * n2) > profile.controls.band:
        expected = 1 if f2_inf < 2 * n2 else 2
    else:
        expected = None
        notes.append("F2(inf) too close to 2 N2 to predict the zero count")

    extrap = None
    if len(zeros) == 1 and v[-1] > 0 and math.isfinite(f2_inf) and f2_inf > 2 * n2:
        # v decays with slope 2 N2 - F2(inf) beyond the last radius
        slope = 2 * n2 - f2_inf
        extrap = float(r[-1] * math.exp(-v[-1] / slope))
        notes.append(f"second zero of v extrapolated to r={extrap:.4g}")

    checks["v_has_zero"] = len(zeros) >= 1
    if zeros:
        r0 = zeros[0]
        before = r < r0 * (1 - 1e-12)
        checks["v_negative_before_r0"] = bool(np.all(v[before] < SLACK))
        i_min = int(np.argmin(f2))
        # the minimum sits within one grid cell of r0
        lo = r[max(i_min - 1, 0)]
        hi = r[min(i_min + 1, r.size - 1)]
        checks["F2_min_at_r0"] = bool(lo <= r0 <= hi)
    n_found = len(zeros) + (extrap is not None)
    if expected is not None:
        checks["zero_count"] = n_found == expected

    r_star = None
    if len(zeros) >= 2:
        between = (r > zeros[0]) & (r < zeros[1])
        seg = v[between]
        if seg.size >= 3:
            d = np.diff(seg)
            sign_changes = int(np.sum(np.diff(np.sign(d[np.abs(d) > SLACK])) != 0))
            checks["single_max_between_zeros"] = sign_changes <= 1
        cr = _crossings(r[between], f2[between], 2 * n2) if between.sum() >= 2 else []
        if cr:
            r_star = cr[0]
        checks["F2_equals_2N2_at_max"] = len(cr) == 1
        after = r > zeros[1]
        if after.sum() >= 2:
            checks["F2_decreasing_after_t0"] = bool(np.all(np.diff(f2[after]) <= SLACK * (1 + np.abs(f2[after][1:]))))
    elif len(zeros) == 1 and expected == 1:
        after = r > zeros[0]
        checks["v_increasing_after_r0"] = bool(np.all(np.diff(v[after]) > -SLACK))

    w = profile.u + 2 * np.log(r)
    d = np.diff(w)
    mono_breaks = int(np.sum(np.diff(np.sign(d[np.abs(d) > SLACK])) != 0))
    cr1 = _crossings(r, f1, 2 * (n1 + 1))
    t1 = cr1[0] if cr1 else None
    checks["u_plus_2lnr_single_max"] = mono_breaks <= 1 and len(cr1) <= 1
    if t1 is not None:
        i_max = int(np.argmax(w))
        checks["F1_at_max_equals_2N1p2"] = bool(r[max(i_max - 1, 0)] <= t1 <= r[min(i_max + 1, r.size - 1)])
    return StructureReport(zeros, expected, extrap, r_star, t1, checks, notes)


@dataclass
class AprioriReport:
    """Margins ``bound - value`` of the a priori estimates; ``flags`` marks
    which hold (with ``SLACK``)."""

    margins: dict
    flags: dict
    values: dict

    @property
    def ok(self):
        return all(self.flags.values())


def explicit_mass_bound(n1, n2, u0):
    """Upper bound for ``int t e^{u+v} dt`` on integrable runs from ``U(0)``.

    Splits the integral at ``R``: below ``R`` the pointwise bound on
    ``r^2 e^v`` leaves ``int t^{2 N1 - 1} e^U``; above it both pointwise
    bounds give a ``t^{-3}`` tail.  The split point is optimised
    numerically.
    """
    k4 = 4.0 * (n1 + 1) * (n2 + 1)
    c_pt = max((8.0 * (n1 + 1) * (n2 + 1)) ** (n1 + 1), 4.0 * n1)

    def bound(log_r):
        return k4 * (math.exp(u0 + 2 * n1 * log_r) / (2 * n1) + c_pt * (1 + math.exp(u0)) * math.exp(-2 * log_r) / 2)

    guess = math.log((1 + math.exp(u0)) / (n1 * math.exp(u0))) / (2 * (n1 + 1)) if u0 < 700 else 0.0
    res = optimize.minimize_scalar(bound, bracket=(guess - 1, guess + 1))
    return float(min(res.fun, bound(guess)))


def apriori_check(profile, estimate=None):
    """Margins of the a priori estimates along a profile.

    Always evaluated: the two-sided bound on ``int t e^u``, ``F2 < 2m``, the
    positivity of ``(F1 - 2m) I_uv + r^2 e^{u+v}``, the bound on
    ``int t e^{u+v}`` and on ``max r^2 e^{u+v}``.  On integrable runs also
    the pointwise bounds on ``r^2 e^v`` and ``r^2 e^u`` and the
    ``U(0)``-only bound on ``int t e^{u+v}``.
    """
    est = estimate or tail_extrapolate(profile)
    n1, n2 = profile.n1, profile.n2
    m = n1 + n2 + 1
    a1, a2 = profile.init.alpha1, profile.init.alpha2
    kk = math.exp(min(a1 - (n1 + 1) * a2 / n2, 700.0))
    r, u, v = profile.r, profile.u, profile.v
    lr2 = 2 * np.log(r)
    r2eu = np.exp(lr2 + u)
    r2ev = np.exp(lr2 + v)
    r2euv = np.exp(lr2 + u + v)

    iu_inf = est.int_eu if math.isfinite(est.int_eu) else float(profile.Iu[-1])
    iuv_inf = est.int_euv if math.isfinite(est.int_euv) else float(profile.Iuv[-1])

    values, margins = {}, {}
    values["int_eu_lower"] = float(r2eu.max() / (2 * (n1 + 1)))
    margins["int_eu_lower"] = iu_inf - values["int_eu_lower"]
    values["int_eu_upper"] = iu_inf
    margins["int_eu_upper"] = 2 * (2 * (n1 + 1) + kk) - iu_inf
    values["F2_below_2m"] = float(profile.F2.max())
    margins["F2_below_2m"] = 2 * m - values["F2_below_2m"]
    g = (profile.F1 - 2 * m) * profile.Iuv + r2euv
    values["mixed_positive"] = float(g.min())
    margins["mixed_positive"] = values["mixed_positive"]
    values["int_euv_upper"] = iuv_inf
    margins["int_euv_upper"] = 2 * (3 * (n1 + 1) + n2 + kk) - iuv_inf
    values["r2euv_upper"] = float(r2euv.max())
    margins["r2euv_upper"] = (3 * (n1 + 1) + n2 + kk) ** 2 - values["r2euv_upper"]
    if est.decided == INTEGRABLE:
        values["r2ev_upper"] = float(r2ev.max())
        margins["r2ev_upper"] = 4 * (n1 + 1) * (n2 + 1) - values["r2ev_upper"]
        c_pt = max((8.0 * (n1 + 1) * (n2 + 1)) ** (n1 + 1), 4.0 * n1)
        values["r2eu_upper"] = float(r2eu.max())
        margins["r2eu_upper"] = c_pt * (1 + math.exp(a1)) - values["r2eu_upper"]
        values["int_euv_explicit"] = iuv_inf
        margins["int_euv_explicit"] = explicit_mass_bound(n1, n2, a1) - iuv_inf
    flags = {k: bool(mv > -SLACK) for k, mv in margins.items()}
    return AprioriReport({k: float(x) for k, x in margins.items()}, flags, values)


def xi_limit(r, n1, n2):
    """Limit of the rescaled ``U + V`` under concentration."""
    m = n1 + n2 + 1
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        z = 2 * m * np.log(r) - math.log(4.0 * m * m)
    return -2.0 * np.logaddexp(0.0, z)


@dataclass
class BlowupReport:
    alphas: list
    f2_inf: list
    gaps: list
    sup_distance: list
    monotone_f2: bool
    monotone_distance: bool
    notes: list = field(default_factory=list)


def blowup_limit_check(profiles, estimates=None, window=10.0):
    """Convergence of a family of runs along increasing ``alpha1``.

    For each run reports ``F2(inf)``, its gap to ``2 (N1 + N2 + 1)`` and the
    sup over checkpoints with ``r / s <= window`` of
    ``|U(r) + V(r) - U(0) - V(0) - xi(r / s)|`` where
    ``s = exp(-(U(0) + V(0)) / (2 (N1 + N2 + 1)))``.
    Non-monotone trends are reported, not raised.
    """
    if not profiles:
        raise ValueError("need at least one profile")
    order = np.argsort([p.init.alpha1 for p in profiles])
    profiles = [profiles[i] for i in order]
    ests = [estimates[i] for i in order] if estimates is not None else [tail_extrapolate(p) for p in profiles]
    n1, n2 = profiles[0].n1, profiles[0].n2
    m = n1 + n2 + 1
    alphas, f2s, gaps, dists, notes = [], [], [], [], []
    for p, e in zip(profiles, ests):
        if (p.n1, p.n2) != (n1, n2):
            raise ValueError("all profiles must share the multiplicities")
        if e.decided != INTEGRABLE:
            notes.append(f"alpha1={p.init.alpha1}: verdict {e.decided}")
        s = math.exp(-(p.init.alpha1 + p.init.alpha2) / (2 * m))
        mask = p.r <= window * s
        w = p.U[mask] + p.V[mask] - p.init.alpha1 - p.init.alpha2
        dist = float(np.max(np.abs(w - xi_limit(p.r[mask] / s, n1, n2)))) if mask.any() else math.nan
        alphas.append(p.init.alpha1)
        f2s.append(e.f2_inf)
        gaps.append(2 * m - e.f2_inf)
        dists.append(dist)
    mono_f2 = all(b < a for a, b in zip(gaps, gaps[1:]))
    mono_d = all(b < a for a, b in zip(dists, dists[1:]))
    if not mono_f2:
        notes.append("gap to 2(N1+N2+1) is not monotone along the family")
    if not mono_d:
        notes.append("distance to the limit profile is not monotone along the family")
    return BlowupReport(alphas, f2s, gaps, dists, mono_f2, mono_d, notes)
