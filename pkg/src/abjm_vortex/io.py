"""CSV tables and JSON reports.

CSV files are UTF-8 with LF line endings and one header row.  Floats are
written with ``repr`` so that reading them back gives bit-identical values;
non-finite values appear as ``inf``, ``-inf`` and ``nan``.  JSON reports
never contain non-finite numbers: such fields become ``null`` and the reason
is recorded under ``null_reasons``.
"""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .fields import FIELD_COLUMNS
from .functionals import settled_f2, tail_terms
from .shooter import InitialData, IntegrationControls, RadialProfile, _series_state

__all__ = [
    "SPEC_VERSION",
    "PROFILE_COLUMNS",
    "SCAN_COLUMNS",
    "FLUX_REGION_COLUMNS",
    "InputFileError",
    "format_float",
    "write_table",
    "read_table",
    "write_profile_csv",
    "read_profile_csv",
    "infer_initial_data",
    "infer_termination",
    "write_field_csv",
    "write_scan_csv",
    "write_flux_region_csv",
    "sanitize",
    "write_report",
    "load_schema",
]

SPEC_VERSION = "1.0"

# dU, dV are derivatives in r; the three cumulative integrals follow so that
# a stored profile carries everything the diagnostics need
PROFILE_COLUMNS = ("r", "U", "V", "dU", "dV", "F1", "F2", "Iuv", "Iu", "Iv")
SCAN_COLUMNS = (
    "alpha", "alpha2", "verdict", "F1_inf", "F2_inf", "flux1_over_2pi", "flux2_over_2pi",
    "energy", "beta1", "beta2", "note",
)
FLUX_REGION_COLUMNS = ("alpha", "flux1_over_2pi", "flux2_over_2pi")


class InputFileError(ValueError):
    """Unreadable or ill-formed input file; ``line`` is 1-based when known."""

    def __init__(self, msg, path=None, line=None):
        where = f"{path}" if path is not None else "input"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {msg}")
        self.path, self.line = path, line


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _cell(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(x)


def write_table(path, header, rows):
    """Write ``rows`` (sequences matching ``header``) as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
    return path


def read_table(path, header):
    """Read a numeric CSV written by :func:`write_table`.

    Returns a dict of float arrays keyed by column.  Raises
    :class:`InputFileError` with the offending line number on a bad header,
    a short row or an unparsable number, and on a file with no data rows.
    """
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputFileError(f"cannot open ({exc.strerror})", path) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise InputFileError("empty file", path, 1) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise InputFileError(str(exc), path, 1) from exc
        if tuple(got) != tuple(header):
            raise InputFileError(f"expected header {','.join(header)}", path, 1)
        cols = [[] for _ in header]
        try:
            for row in reader:
                line = reader.line_num
                if len(row) != len(header):
                    raise InputFileError(f"expected {len(header)} fields, found {len(row)}", path, line)
                for c, cell in zip(cols, row):
                    try:
                        c.append(float(cell))
                    except ValueError:
                        raise InputFileError(f"not a number: {cell!r}", path, line) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise InputFileError(str(exc), path, reader.line_num) from exc
    if not cols[0]:
        raise InputFileError("no data rows", path, 2)
    return {h: np.array(c) for h, c in zip(header, cols)}


def write_profile_csv(path, profile: RadialProfile):
    cols = (profile.r, profile.U, profile.V, profile.dU, profile.dV, profile.F1, profile.F2,
            profile.Iuv, profile.Iu, profile.Iv)
    return write_table(path, PROFILE_COLUMNS, zip(*cols))


def infer_initial_data(r0, u0, v0, n1, n2, iterations=4):
    """Invert the series start: ``(alpha1, alpha2)`` from ``U, V`` at ``r0``."""
    a1, a2 = float(u0), float(v0)
    for _ in range(iterations):
        y = _series_state(InitialData(a1, a2), r0, n1, n2)
        a1 += u0 - y[0]
        a2 += v0 - y[1]
    return InitialData(a1, a2)


def read_profile_csv(path, n1, n2, init=None, controls=None, termination=None):
    """Rebuild a :class:`RadialProfile` from a profile CSV.

    ``init`` defaults to the initial data implied by the first row and
    ``termination`` to the one implied by the last row (see
    :func:`infer_termination`).
    """
    t = read_table(path, PROFILE_COLUMNS)
    r = t["r"]
    if np.any(~np.isfinite(r)) or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise InputFileError("radii must be positive, finite and increasing", path)
    for k in ("U", "V", "F1", "F2", "Iuv", "Iu", "Iv"):
        if not np.all(np.isfinite(t[k])):
            bad = int(np.flatnonzero(~np.isfinite(t[k]))[0])
            raise InputFileError(f"non-finite {k}", path, bad + 2)
    if init is None:
        init = infer_initial_data(r[0], t["U"][0], t["V"][0], n1, n2)
    prof = RadialProfile(
        n1=n1, n2=n2, init=init, controls=controls or IntegrationControls(),
        r=r, U=t["U"], V=t["V"], F1=t["F1"], F2=t["F2"],
        Iuv=t["Iuv"], Iu=t["Iu"], Iv=t["Iv"],
        termination=termination or "stored",
        notes=[f"read from {path}"],
    )
    if termination is None:
        prof.termination = infer_termination(prof)
    return prof


def infer_termination(profile):
    """Termination reason consistent with the last row of a stored profile.

    Returns ``"v_cap"`` or ``"non_integrable"`` when the final state shows
    a divergent run, otherwise ``"stored"``, which the tail analysis treats
    like a run that reached its radius cap.
    """
    i = -1
    r, u, v = profile.r[i], profile.u[i], profile.v[i]
    f1, f2 = profile.F1[i], profile.F2[i]
    ctl = profile.controls
    if v > ctl.v_cap and f2 < 2 * profile.n2:
        return "v_cap"
    last = tail_terms(r, u, v, f1, f2, profile.Iuv[i], profile.Iu[i], profile.Iv[i],
                      profile.n1, profile.n2)
    sb = settled_f2(r, u, v, f1, f2, profile.n1, profile.n2)
    if not last.valid and sb is not None and u < 0 and sb[0] < 2 * (profile.n2 + 1) - ctl.band:
        return "non_integrable"
    return "stored"


def write_field_csv(path, table):
    cols = table.columns()
    return write_table(path, FIELD_COLUMNS, zip(*(cols[c] for c in FIELD_COLUMNS)))


def write_scan_csv(path, rows):
    return write_table(path, SCAN_COLUMNS, ([getattr(r, c) for c in SCAN_COLUMNS] for r in rows))


def write_flux_region_csv(path, rows):
    pts = [(r.alpha, r.flux1_over_2pi, r.flux2_over_2pi) for r in rows if r.verdict == "integrable"]
    return write_table(path, FLUX_REGION_COLUMNS, pts)


def sanitize(obj, reasons=None, prefix=""):
    """Copy of ``obj`` with non-finite floats replaced by ``None``.

    ``reasons`` (a dict) receives ``dotted.key -> reason`` for each
    replacement; an existing entry for the key is kept.
    """
    if reasons is None:
        reasons = {}
    if isinstance(obj, dict):
        return {k: sanitize(v, reasons, f"{prefix}{k}.") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v, reasons, f"{prefix}{i}.") for i, v in enumerate(obj)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            key = prefix[:-1]
            reasons.setdefault(key, "diverges" if math.isinf(x) else "undetermined")
            return None
        return x
    return obj


def write_report(path, report: dict):
    """Write a report as JSON; non-finite numbers become ``null`` with reasons."""
    reasons = dict(report.get("null_reasons", {}))
    body = sanitize({k: v for k, v in report.items() if k != "null_reasons"}, reasons)
    body["null_reasons"] = reasons
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(body, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return body


def load_schema():
    """The JSON schema of solve reports shipped with the package."""
    text = resources.files(__package__).joinpath("schema/solve_report.schema.json").read_text("utf-8")
    return json.loads(text)
