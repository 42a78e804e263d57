"""Assembly of the JSON run reports written by the command-line tools."""

from __future__ import annotations

import math
from dataclasses import asdict

from .diagnostics import pohozaev_report
from .functionals import INTEGRABLE, tail_extrapolate
from .io import SPEC_VERSION
from .params import VortexParams, alt_energy, physical_energy

__all__ = ["diagnostics_block", "solve_report", "check_report"]


def diagnostics_block(profile, estimate):
    """Pohozaev residuals, limit identities and predicate flags of a run."""
    rep = pohozaev_report(profile, estimate)
    d = rep.as_dict()
    flags = d.pop("predicate_flags")
    return d, flags


def _limits(params: VortexParams, est):
    integrable = est.decided == INTEGRABLE
    reasons = {}
    if integrable:
        energy = physical_energy(params, est.int_eu, est.int_ev)
        energy_alt = alt_energy(params, est.int_eu, est.int_ev)
    else:
        energy = energy_alt = math.inf if math.isinf(est.f1_inf) else math.nan
        why = "run is not integrable" if est.decided != "inconclusive" else "verdict inconclusive"
        for k in ("energy.canonical", "energy.alt"):
            reasons[k] = why
    block = {
        "F1_inf": est.f1_inf,
        "F2_inf": est.f2_inf,
        "beta1": est.beta1,
        "beta2": est.beta2,
        "flux1_over_2pi": est.flux1_over_2pi,
        "flux2_over_2pi": est.flux2_over_2pi,
        "energy": {
            "canonical": energy,
            "alt": energy_alt,
            "convention": "canonical = N(N-1) sigma k/(4 pi) (Phi1 - Phi2); alt doubles it",
        },
        "int_euv": est.int_euv,
        "int_eu": est.int_eu,
        "int_ev": est.int_ev,
        "uncertainty": dict(est.uncertainty),
    }
    if not integrable:
        for k in ("F1_inf", "flux1_over_2pi", "beta1", "int_ev"):
            if not math.isfinite(block[k]):
                reasons[k] = "diverges on a non-integrable run"
    return block, reasons


def _solver(profile):
    return {
        "controls": profile.controls.as_dict(),
        "termination": profile.termination,
        "terminal_r": profile.terminal_r,
        "r_start": float(profile.r[0]),
        "n_checkpoints": int(profile.r.size),
        "nfev": int(profile.nfev),
        "nsteps": int(profile.nsteps),
        "wall_time": float(profile.wall_time),
    }


def solve_report(params: VortexParams, outcome, profile, target=None, files=None,
                 verification=None, notes=None):
    """Report of a solve run (a target solve or a single shot)."""
    est = outcome.estimate
    limits, reasons = _limits(params, est)
    pz, flags = diagnostics_block(profile, est)
    rep = {
        "spec_version": SPEC_VERSION,
        "command": "solve",
        "params": asdict(params) | {"lambda": params.lam},
        "init": {"alpha1": outcome.init.alpha1, "alpha2": outcome.init.alpha2,
                 "L": outcome.init.L, "alpha": outcome.alpha},
        "target": None if target is None else {
            "kind": target.kind, "value": target.value, "L": target.L, "tol": target.tol,
            "F_value": 2 * target.value if target.kind != "energy" else None,
        },
        "verdict": outcome.verdict,
        **limits,
        "pohozaev": pz,
        "predicate_flags": flags,
        "verification": verification,
        "files": dict(files or {}),
        "solver": _solver(profile),
        "diagnostics": list(outcome.diagnostics) + list(notes or []),
        "null_reasons": reasons,
    }
    return rep


def check_report(params: VortexParams, profile, source):
    """Report of diagnostics recomputed from a stored profile."""
    est = tail_extrapolate(profile)
    limits, reasons = _limits(params, est)
    pz, flags = diagnostics_block(profile, est)
    verdict = {"non-integrable": "divergent"}.get(est.decided, est.decided)
    return {
        "spec_version": SPEC_VERSION,
        "command": "check",
        "source": str(source),
        "params": asdict(params) | {"lambda": params.lam},
        "init": {"alpha1": profile.init.alpha1, "alpha2": profile.init.alpha2, "L": profile.init.L},
        "verdict": verdict,
        **limits,
        "pohozaev": pz,
        "predicate_flags": flags,
        "solver": _solver(profile),
        "diagnostics": list(est.diagnostics),
        "null_reasons": reasons,
    }
