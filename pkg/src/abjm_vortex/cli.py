"""Command-line interface: ``solve``, ``scan``, ``baseline``, ``perturb``, ``check``.

Exit codes: 0 success, 2 target unreachable, 3 inconclusive classification,
4 invalid arguments, 5 unreadable or ill-formed input file.

Settings come from command-line flags, then from the JSON file given by
``--config`` (keys are the long flag names, with ``-`` or ``_``), then from
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as vio
from .fields import reconstruct
from .liouville import _log_baseline, liouville_mass, phi0, psi0, sigma_integrals
from .params import VortexParams
from .perturbation import concentration_report
from .report import check_report, solve_report
from .shooter import InitialData, IntegrationControls
from .targeting import (
    INCONCLUSIVE,
    PrecisionError,
    TargetRejected,
    TargetSpec,
    TargetUnreachable,
    classify,
    scan,
    solve_target,
    verify_rk4,
)

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_UNREACHABLE", "EXIT_INCONCLUSIVE",
           "EXIT_BAD_ARGS", "EXIT_BAD_INPUT"]

EXIT_OK = 0
EXIT_UNREACHABLE = 2
EXIT_INCONCLUSIVE = 3
EXIT_BAD_ARGS = 4
EXIT_BAD_INPUT = 5

DEFAULTS = {
    "n1": 1, "n2": 1, "sigma": 0.5, "k": 1.0, "nmat": 2,
    "tol": 1e-10, "rmax": 1e12, "out_dir": ".", "format": "csv",
    "L": 0.0, "target_tol": 1e-4, "verify": False,
    "jobs": 1, "alpha_steps": 25,
    "eps_list": "0.1,0.05,0.025",
    "r_min": 1e-3, "r_max": 1e3, "points": 121,
}

_TARGETS = ("target_flux2", "target_flux1", "target_energy", "alpha")


class UsageError(Exception):
    """Bad command-line or configuration input (exit code 4)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _model_flags(p):
    g = p.add_argument_group("model")
    g.add_argument("--n1", type=int, help="multiplicity of the first zero (default 1)")
    g.add_argument("--n2", type=int, help="multiplicity of the second zero (default 1)")
    g.add_argument("--sigma", type=float, help="mass parameter (default 0.5)")
    g.add_argument("--k", type=float, help="Chern-Simons level (default 1)")
    g.add_argument("--nmat", type=int, help="gauge group rank N (default 2)")
    g.add_argument("--config", type=Path, help="JSON file of default settings")


def _solver_flags(p):
    g = p.add_argument_group("integration")
    g.add_argument("--tol", type=float, help="relative tolerance (default 1e-10; atol = tol/100)")
    g.add_argument("--rmax", type=float, help="radius cap, dimensionless (default 1e12)")


def build_parser():
    p = _Parser(prog="abjm-vortex", description="Radial self-dual vortices of a two-field Chern-Simons model.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="hit a flux or energy target, or run one shot")
    _model_flags(s)
    _solver_flags(s)
    s.add_argument("--L", type=float, help="line offset of the initial data (default 0)")
    s.add_argument("--target-flux2", type=float, help="target Phi2/(2 pi)")
    s.add_argument("--target-flux1", type=float, help="target Phi1/(2 pi)")
    s.add_argument("--target-energy", type=float, help="target energy")
    s.add_argument("--alpha", type=float, help="single shot at this alpha")
    s.add_argument("--target-tol", type=float, help="target tolerance (default 1e-4)")
    s.add_argument("--verify", action="store_const", const=True,
                   help="re-integrate with fixed-step RK4 and report the difference")
    s.add_argument("--out-dir", type=Path, help="output directory (default .)")
    s.add_argument("--format", choices=("csv", "json"),
                   help="stdout format: one-line csv summary or the full json report")

    c = sub.add_parser("scan", help="classify a grid of shots along one line")
    _model_flags(c)
    _solver_flags(c)
    c.add_argument("--alpha-min", type=float)
    c.add_argument("--alpha-max", type=float)
    c.add_argument("--alpha-steps", type=int, help="number of grid points (default 25)")
    c.add_argument("--L", type=float)
    c.add_argument("--jobs", type=int, help="worker processes (default 1)")
    c.add_argument("--out-dir", type=Path)

    b = sub.add_parser("baseline", help="tabulate the Liouville profile")
    _model_flags(b)
    b.add_argument("--r-min", type=float)
    b.add_argument("--r-max", type=float)
    b.add_argument("--points", type=int)
    b.add_argument("--out-dir", type=Path)

    q = sub.add_parser("perturb", help="first-order concentrating profiles")
    _model_flags(q)
    q.add_argument("--eps-list", type=str, help="comma-separated decreasing eps values")
    q.add_argument("--out-dir", type=Path)

    k = sub.add_parser("check", help="recompute diagnostics of a stored profile CSV")
    k.add_argument("profile", type=Path)
    _model_flags(k)
    k.add_argument("--report", type=Path, help="solve report giving init data and controls")
    k.add_argument("--out-dir", type=Path)
    return p


def _load_config(path):
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return {str(key).lstrip("-").replace("-", "_"): v for key, v in data.items()}


def resolve_settings(ns):
    """Merge flags over the config file over the defaults."""
    flags = {k: v for k, v in vars(ns).items() if v is not None}
    cfg = _load_config(flags.get("config"))
    known = set(vars(ns)) | set(DEFAULTS)
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    out = dict(DEFAULTS)
    out.update(cfg)
    out.update(flags)
    return argparse.Namespace(**out)


def _params(a):
    try:
        return VortexParams(n1=a.n1, n2=a.n2, sigma=a.sigma, k=a.k, n_mat=a.nmat)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _controls(a):
    try:
        return IntegrationControls(rtol=float(a.tol), atol=float(a.tol) / 100, r_max=float(a.rmax))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _emit(path, report):
    return vio.write_report(path, report)


def cmd_solve(a):
    params = _params(a)
    ctl = _controls(a)
    chosen = [t for t in _TARGETS if getattr(a, t, None) is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --target-flux2, --target-flux1, --target-energy, --alpha")
    out_dir = Path(a.out_dir)
    which = chosen[0]
    target = None
    if which == "alpha":
        out = classify(float(a.alpha), float(a.L), params, ctl)
        prof = out.profile
        if prof is None:
            print(f"inconclusive: {'; '.join(out.diagnostics)}", file=sys.stderr)
            return EXIT_INCONCLUSIVE
    else:
        kind = which.removeprefix("target_")
        try:
            target = TargetSpec(kind, float(getattr(a, which)), float(a.L), float(a.target_tol))
            target.validate(params)
        except (TargetRejected, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        try:
            out, prof = solve_target(target, params, ctl)
        except TargetUnreachable as exc:
            print(f"unreachable: {exc}", file=sys.stderr)
            return EXIT_UNREACHABLE
        except PrecisionError as exc:
            print(f"inconclusive: {exc}", file=sys.stderr)
            return EXIT_INCONCLUSIVE

    verification = None
    if a.verify and out.verdict == "integrable":
        f2_rk4, diff = verify_rk4(out, params)
        verification = {"method": "fixed-step RK4, 4x steps", "F2_inf": f2_rk4, "abs_diff": diff}

    files = {
        "profile": str(vio.write_profile_csv(out_dir / "profile.csv", prof)),
        "fields": str(vio.write_field_csv(out_dir / "fields.csv", reconstruct(prof, params))),
    }
    files["report"] = str(out_dir / "solve_report.json")
    body = _emit(files["report"], solve_report(params, out, prof, target, files, verification))

    if a.format == "json":
        print(json.dumps(body, indent=2))
    else:
        print(f"verdict={out.verdict} alpha={out.alpha!r} alpha2={out.init.alpha2!r} "
              f"flux1_over_2pi={out.flux1_over_2pi:.10g} flux2_over_2pi={out.flux2_over_2pi:.10g} "
              f"energy={out.energy:.10g} report={files['report']}")
    return EXIT_INCONCLUSIVE if out.verdict == INCONCLUSIVE else EXIT_OK


def cmd_scan(a):
    params = _params(a)
    ctl = _controls(a)
    if getattr(a, "alpha_min", None) is None or getattr(a, "alpha_max", None) is None:
        raise UsageError("--alpha-min and --alpha-max are required")
    lo, hi, n = float(a.alpha_min), float(a.alpha_max), int(a.alpha_steps)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo or n < 1 or (n == 1 and hi != lo):
        raise UsageError("need finite alpha-min <= alpha-max and alpha-steps >= 1")
    if int(a.jobs) < 1:
        raise UsageError("--jobs must be >= 1")
    grid = np.linspace(lo, hi, n)
    rows = scan(grid, float(a.L), params, ctl, jobs=int(a.jobs))
    out_dir = Path(a.out_dir)
    p1 = vio.write_scan_csv(out_dir / "scan.csv", rows)
    p2 = vio.write_flux_region_csv(out_dir / "flux_region.csv", rows)
    counts = {}
    for r in rows:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    print(" ".join(f"{k}={v}" for k, v in sorted(counts.items())) + f" scan={p1} flux_region={p2}")
    return EXIT_OK


def cmd_baseline(a):
    params = _params(a)
    n1, n2 = params.n1, params.n2
    if not (0 < a.r_min < a.r_max) or int(a.points) < 2:
        raise UsageError("need 0 < r-min < r-max and points >= 2")
    r = np.logspace(math.log10(a.r_min), math.log10(a.r_max), int(a.points))
    u0, v0 = _log_baseline(r, n1, n2)
    rows = zip(r, u0, v0, np.exp(u0), np.exp(v0), 2 * np.exp(u0 + v0), phi0(r, n1, n2), psi0(r, n1, n2))
    path = vio.write_table(Path(a.out_dir) / "baseline.csv",
                           ("r", "u0", "v0", "eu0", "ev0", "rho", "phi0", "psi0"), rows)
    s1, s2 = sigma_integrals(n1, n2)
    print(f"sigma1={s1!r} sigma2={s2!r} mass={liouville_mass(n1, n2)!r} table={path}")
    return EXIT_OK


def cmd_perturb(a):
    params = _params(a)
    try:
        eps = [float(x) for x in str(a.eps_list).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --eps-list: {exc}") from exc
    if not eps:
        raise UsageError("--eps-list is empty")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rows = concentration_report(eps, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    header = ("eps", "flux1_over_2pi", "flux2_over_2pi", "energy", "mass_inside", "mass_total",
              "mass_fraction", "radius_inside", "residual1", "residual2")
    table = [(r.eps, r.flux1_over_2pi, r.flux2_over_2pi, r.energy, r.mass_inside, r.mass_total,
              r.mass_fraction, r.radius_inside, *r.residual) for r in rows]
    path = vio.write_table(Path(a.out_dir) / "perturb.csv", header, table)
    for r in rows:
        print(f"eps={r.eps:g} flux1_over_2pi={r.flux1_over_2pi:.8f} "
              f"flux2_over_2pi={r.flux2_over_2pi:.8f} energy={r.energy:.6g}")
    print(f"table={path}")
    return EXIT_OK


def _report_context(path):
    try:
        rep = json.loads(Path(path).read_text(encoding="utf-8"))
        init = InitialData(rep["init"]["alpha1"], rep["init"]["alpha2"], rep["init"].get("L"))
        ctl = IntegrationControls(**rep["solver"]["controls"])
        return init, ctl, rep["solver"]["termination"]
    except OSError as exc:
        raise vio.InputFileError(f"cannot open ({exc.strerror})", path) from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise vio.InputFileError(f"not a solve report ({exc})", path) from exc


def cmd_check(a):
    params = _params(a)
    init = ctl = term = None
    if getattr(a, "report", None) is not None:
        init, ctl, term = _report_context(a.report)
    prof = vio.read_profile_csv(a.profile, params.n1, params.n2, init, ctl, term)
    rep = check_report(params, prof, a.profile)
    path = Path(a.out_dir) / "check_report.json"
    body = vio.write_report(path, rep)
    flags = body["predicate_flags"]
    bad = [k for k, v in flags.items() if not v]
    pz = body["pohozaev"]
    worst = max(pz["max_res_uv"], pz["max_res_u"], pz["max_res_v"])
    print(f"verdict={body['verdict']} max_pohozaev={worst:.3e} "
          f"flags_failed={','.join(bad) or 'none'} report={path}")
    return EXIT_OK


_COMMANDS = {"solve": cmd_solve, "scan": cmd_scan, "baseline": cmd_baseline,
             "perturb": cmd_perturb, "check": cmd_check}


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        a = resolve_settings(ns)
        return _COMMANDS[a.command](a)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except vio.InputFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
