"""Shooting along a line of initial data to hit a flux or energy target.

Initial data are restricted to the line

    (alpha1, alpha2) = (alpha, ((2 N2 + 1) alpha - L) / (2 N1 + 1)).

For ``alpha`` very negative the run is non-integrable (``F2(inf)`` falls to
or below ``2 (N2 + 1)`` and ``F1`` diverges), while for ``alpha`` large both
limits approach ``2 (N1 + N2 + 1)`` and the energy tends to zero.  Continuity
in ``alpha`` then yields a root of ``F2(inf) = gamma`` (or of the ``F1`` and
energy variants); bisection finds one, without any uniqueness claim.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functionals import INCONCLUSIVE, INTEGRABLE, NON_INTEGRABLE, tail_extrapolate, tail_terms
from .params import VortexParams, physical_energy
from .shooter import InitialData, IntegrationControls, IntegrationError, integrate, rk4_fixed

__all__ = [
    "DIVERGENT",
    "ShotOutcome",
    "TargetSpec",
    "TargetRejected",
    "TargetUnreachable",
    "PrecisionError",
    "classify",
    "solve_target",
    "verify_rk4",
    "ScanRow",
    "scan",
]

DIVERGENT = "divergent"
_VERDICT = {INTEGRABLE: INTEGRABLE, NON_INTEGRABLE: DIVERGENT, INCONCLUSIVE: INCONCLUSIVE}


class TargetRejected(ValueError):
    """Target outside the admissible open interval."""


class TargetUnreachable(RuntimeError):
    """No sign change of the shooting function inside the search box."""


class PrecisionError(RuntimeError):
    """An inconclusive verdict inside the final bracket survived a retry."""


@dataclass
class ShotOutcome:
    """Classification of one shot.

    ``f1_inf`` is ``inf`` and ``energy`` is ``inf`` on divergent shots.
    """

    alpha: float
    init: InitialData
    verdict: str
    f1_inf: float
    f2_inf: float
    energy: float
    estimate: object = None
    profile: object = field(default=None, repr=False)
    diagnostics: list = field(default_factory=list)

    @property
    def flux1_over_2pi(self):
        return 0.5 * self.f1_inf

    @property
    def flux2_over_2pi(self):
        return 0.5 * self.f2_inf

    @property
    def beta1(self):
        return self.estimate.beta1 if self.estimate is not None else math.nan

    @property
    def beta2(self):
        return self.estimate.beta2 if self.estimate is not None else math.nan


def classify(alpha, L, params: VortexParams, controls: IntegrationControls | None = None, keep_profile=True):
    """Integrate the shot ``alpha`` on line ``L`` and classify it."""
    init = InitialData.from_line(alpha, L, params.n1, params.n2)
    try:
        prof = integrate(params, init, controls)
    except IntegrationError as exc:
        return ShotOutcome(alpha, init, INCONCLUSIVE, math.nan, math.nan, math.nan,
                           diagnostics=[f"integration failed at r={exc.r}: {exc}"])
    est = tail_extrapolate(prof)
    verdict = _VERDICT[est.decided]
    if verdict == INTEGRABLE:
        energy = physical_energy(params, est.int_eu, est.int_ev)
    elif verdict == DIVERGENT:
        energy = math.inf
    else:
        energy = math.nan
    return ShotOutcome(alpha, init, verdict, est.f1_inf, est.f2_inf, energy, est,
                       prof if keep_profile else None, list(est.diagnostics))


@dataclass(frozen=True)
class TargetSpec:
    """A shooting target.

    ``kind`` is ``"flux2"`` or ``"flux1"`` (``value`` in units of
    ``Phi / (2 pi)``) or ``"energy"`` (physical energy; ``tol`` is then
    relative).
    """

    kind: str
    value: float
    L: float = 0.0
    tol: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("flux2", "flux1", "energy"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if not (self.tol > 0 and math.isfinite(self.value) and math.isfinite(self.L)):
            raise ValueError("value and L must be finite and tol positive")

    def validate(self, params: VortexParams):
        if self.kind == "flux2":
            lo, hi = params.flux2_interval
            if not lo < self.value < hi:
                raise TargetRejected(f"flux2 target {self.value} not in the open interval ({lo:g}, {hi:g})")
        elif self.kind == "flux1":
            if not self.value > params.flux1_lower:
                raise TargetRejected(f"flux1 target {self.value} must exceed {params.flux1_lower:g}")
        elif not self.value > 0:
            raise TargetRejected("energy target must be positive")

    def achieved(self, out: ShotOutcome):
        if self.kind == "flux2":
            return out.flux2_over_2pi
        if self.kind == "flux1":
            return out.flux1_over_2pi
        return out.energy

    def g(self, out: ShotOutcome):
        """Signed mismatch; divergent shots are ordered by the limit they miss."""
        if out.verdict == DIVERGENT:
            # F2 <= 2 (N2 + 1) lies below every flux2 target; F1 and E are infinite
            return -math.inf if self.kind == "flux2" else math.inf
        if out.verdict != INTEGRABLE:
            return math.nan
        if self.kind == "energy":
            return math.log(out.energy) - math.log(self.value)
        return self.achieved(out) - self.value

    def matched(self, out: ShotOutcome):
        if out.verdict != INTEGRABLE:
            return False
        if self.kind == "energy":
            return abs(out.energy - self.value) <= self.tol * self.value
        return abs(self.achieved(out) - self.value) <= self.tol


def _probe_order(alpha_lo, alpha_hi, alpha_limit, step=2.0, grow=10.0):
    pts = [0.0]
    k = 1
    while k * step <= max(-alpha_lo, alpha_hi) + 1e-12:
        if k * step <= alpha_hi + 1e-12:
            pts.append(k * step)
        if -k * step >= alpha_lo - 1e-12:
            pts.append(-k * step)
        k += 1
    hi, lo = alpha_hi, alpha_lo
    while hi < alpha_limit or lo > -alpha_limit:
        if hi < alpha_limit:
            hi = min(hi + grow, alpha_limit)
            pts.append(hi)
        if lo > -alpha_limit:
            lo = max(lo - grow, -alpha_limit)
            pts.append(lo)
    return pts


def _sign_changes(probes):
    items = sorted(probes.items())
    return [
        (a, b) for (a, ga), (b, gb) in zip(items, items[1:])
        if not (math.isnan(ga) or math.isnan(gb)) and np.sign(ga) != np.sign(gb)
    ]


def _shoot(spec, params, ctl, alpha):
    out = classify(alpha, spec.L, params, ctl)
    if out.verdict == INCONCLUSIVE:
        retry = classify(alpha, spec.L, params, ctl.tightened())
        retry.diagnostics.insert(0, "retried at 10x tighter tolerances")
        out = retry
    return out


def solve_target(spec: TargetSpec, params: VortexParams, controls: IntegrationControls | None = None,
                 alpha_lo=-20.0, alpha_hi=20.0, alpha_limit=50.0, alpha_tol=1e-10, max_iter=100):
    """Find ``alpha`` on line ``spec.L`` whose run matches the target.

    Returns
    -------
    (ShotOutcome, RadialProfile)
        ``outcome.diagnostics`` lists further sign changes of the shooting
        function seen among the bracketing probes.

    Raises
    ------
    TargetRejected
        Before any integration, when the target is not admissible.
    TargetUnreachable
        When no sign change is found for ``alpha`` in
        ``[-alpha_limit, alpha_limit]``.
    PrecisionError
        When bisection meets an inconclusive shot that a tighter retry does
        not resolve, or the bracket collapses without meeting ``spec.tol``.
    """
    spec.validate(params)
    ctl = controls or IntegrationControls()
    probes = {}
    outcomes = {}
    bracket = None
    for a in _probe_order(alpha_lo, alpha_hi, alpha_limit):
        out = _shoot(spec, params, ctl, a)
        outcomes[a] = out
        probes[a] = spec.g(out)
        if spec.matched(out):
            bracket = (a, a)
            break
        keys = sorted(probes)
        i = keys.index(a)
        for j in (i - 1, i + 1):
            if 0 <= j < len(keys):
                b = keys[j]
                ga, gb = probes[a], probes[b]
                if not (math.isnan(ga) or math.isnan(gb)) and np.sign(ga) != np.sign(gb):
                    # only neighbours between the probe and the origin count as outward expansion
                    if abs(b) <= abs(a):
                        bracket = (min(a, b), max(a, b))
                        break
        if bracket:
            break
    if bracket is None:
        raise TargetUnreachable(
            f"no sign change of the {spec.kind} mismatch for alpha in [{-alpha_limit}, {alpha_limit}]")

    extra = [c for c in _sign_changes(probes) if c != bracket]
    lo, hi = bracket
    if lo == hi:
        best = outcomes[lo]
    else:
        g_lo = probes[lo]
        best = None
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            out = _shoot(spec, params, ctl, mid)
            gm = spec.g(out)
            if math.isnan(gm):
                raise PrecisionError(
                    f"inconclusive shot at alpha={mid} inside bracket [{lo}, {hi}]; tighten the integrator tolerances")
            if spec.matched(out):
                best = out
                break
            if np.sign(gm) == np.sign(g_lo):
                lo, g_lo = mid, gm
            else:
                hi = mid
            if hi - lo < alpha_tol:
                break
        if best is None:
            raise PrecisionError(f"bracket [{lo}, {hi}] collapsed without meeting tol={spec.tol}")
    if extra:
        best.diagnostics.append(
            "additional sign changes between probes: " + ", ".join(f"[{a:g}, {b:g}]" for a, b in extra))
    return best, best.profile


def verify_rk4(out: ShotOutcome, params: VortexParams, factor=4):
    """Re-integrate a shot with fixed-step RK4 and compare ``F2(inf)``.

    Uses ``factor`` times as many steps as the adaptive run, uniformly in
    ``ln r``, up to the same terminal radius; the same tail correction is
    applied.  Returns ``(f2_rk4, |f2_rk4 - f2_adaptive|)``.
    """
    prof = out.profile
    if prof is None or out.verdict != INTEGRABLE:
        raise ValueError("verification needs an integrable outcome with its profile")
    y = rk4_fixed(params.n1, params.n2, out.init, prof.terminal_r, factor * prof.nsteps, r_start=prof.r[0])
    r = prof.terminal_r
    u = y[0] + 2 * params.n1 * math.log(r)
    v = y[1] + 2 * params.n2 * math.log(r)
    t = tail_terms(r, u, v, -y[2], -y[3], y[4], y[5], y[6], params.n1, params.n2)
    return t.f2_inf, abs(t.f2_inf - out.f2_inf)


@dataclass
class ScanRow:
    alpha: float
    alpha2: float
    verdict: str
    F1_inf: float
    F2_inf: float
    flux1_over_2pi: float
    flux2_over_2pi: float
    energy: float
    beta1: float
    beta2: float
    note: str = ""

    @classmethod
    def from_outcome(cls, out: ShotOutcome):
        if out.verdict == INTEGRABLE:
            vals = (out.f1_inf, out.f2_inf, out.flux1_over_2pi, out.flux2_over_2pi, out.energy,
                    out.beta1, out.beta2)
        elif out.verdict == DIVERGENT:
            vals = (math.inf, out.f2_inf, math.inf, out.flux2_over_2pi, math.inf, math.inf,
                    out.beta2)
        else:
            vals = (math.nan,) * 7
        return cls(out.alpha, out.init.alpha2, out.verdict, *vals, note="; ".join(out.diagnostics))


def _scan_one(args):
    alpha, L, params, controls = args
    return ScanRow.from_outcome(classify(alpha, L, params, controls, keep_profile=False))


def scan(alpha_grid, L, params: VortexParams, controls: IntegrationControls | None = None, jobs=1):
    """Classify every ``alpha`` of a grid; rows come back in grid order.

    ``jobs > 1`` spreads the shots over a process pool.  Shots are
    independent and deterministic, so the table does not depend on ``jobs``.
    """
    grid = [float(a) for a in alpha_grid]
    if not all(math.isfinite(a) for a in grid):
        raise ValueError("alpha grid must be finite")
    work = [(a, float(L), params, controls) for a in grid]
    if jobs <= 1 or len(work) <= 1:
        return [_scan_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_scan_one, work))
