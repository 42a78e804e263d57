import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from jsonschema import Draft202012Validator

from abjm_vortex import io as vio
from abjm_vortex.diagnostics import pohozaev_report
from abjm_vortex.fields import FIELD_COLUMNS, reconstruct
from abjm_vortex.functionals import tail_extrapolate
from abjm_vortex.params import VortexParams
from abjm_vortex.report import check_report, solve_report
from abjm_vortex.shooter import InitialData, _series_state
from abjm_vortex.targeting import ScanRow
from conftest import shot, solved

P = VortexParams()


@given(st.floats(allow_nan=True, allow_infinity=True))
def test_format_float_round_trip(x):
    back = float(vio.format_float(x))
    assert (math.isnan(x) and math.isnan(back)) or back == x


def test_profile_round_trip(tmp_path, integrable_run):
    prof, est = integrable_run
    path = vio.write_profile_csv(tmp_path / "p.csv", prof)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.startswith(",".join(vio.PROFILE_COLUMNS).encode())
    back = vio.read_profile_csv(path, 1, 1, prof.init, prof.controls, prof.termination)
    for k in ("r", "U", "V", "F1", "F2", "Iuv", "Iu", "Iv"):
        assert np.array_equal(getattr(back, k), getattr(prof, k))
    e2 = tail_extrapolate(back)
    assert (e2.f1_inf, e2.f2_inf) == (est.f1_inf, est.f2_inf)


def test_inferred_init_and_termination(tmp_path, integrable_run, divergent_run):
    prof, est = integrable_run
    path = vio.write_profile_csv(tmp_path / "p.csv", prof)
    back = vio.read_profile_csv(path, 1, 1)
    assert back.init.alpha1 == pytest.approx(5.0, abs=1e-12)
    assert back.init.alpha2 == pytest.approx(5.0, abs=1e-12)
    assert tail_extrapolate(back).decided == est.decided
    dprof, _ = divergent_run
    dpath = vio.write_profile_csv(tmp_path / "d.csv", dprof)
    dback = vio.read_profile_csv(dpath, 1, 1)
    assert dback.termination in ("v_cap", "non_integrable")
    assert tail_extrapolate(dback).decided == "non-integrable"


def test_infer_initial_data_inverts_series():
    r0 = 1e-3
    y = _series_state(InitialData(2.0, -1.0), r0, 2, 1)
    got = vio.infer_initial_data(r0, y[0], y[1], 2, 1)
    assert (got.alpha1, got.alpha2) == pytest.approx((2.0, -1.0), abs=1e-13)


@pytest.mark.parametrize("mutate,line", [
    (lambda lines: lines[:1], 2),
    (lambda lines: ["r,U"] + lines[1:], 1),
    (lambda lines: lines[:3] + [lines[3].rsplit(",", 2)[0]] + lines[4:], 4),
    (lambda lines: lines[:5] + [lines[5].replace(",", ",x", 1)] + lines[6:], 6),
])
def test_bad_profile_reports_line(tmp_path, integrable_run, mutate, line):
    good = vio.write_profile_csv(tmp_path / "p.csv", integrable_run[0]).read_text().splitlines()
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(mutate(good)) + "\n")
    with pytest.raises(vio.InputFileError) as exc:
        vio.read_profile_csv(bad, 1, 1)
    assert exc.value.line == line
    assert f":{line}:" in str(exc.value)


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(vio.InputFileError):
        vio.read_table(tmp_path / "nope.csv", vio.PROFILE_COLUMNS)
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(vio.InputFileError) as exc:
        vio.read_table(tmp_path / "e.csv", vio.PROFILE_COLUMNS)
    assert exc.value.line == 1


def test_non_monotone_radii_rejected(tmp_path, integrable_run):
    lines = vio.write_profile_csv(tmp_path / "p.csv", integrable_run[0]).read_text().splitlines()
    lines[2], lines[3] = lines[3], lines[2]
    (tmp_path / "b.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(vio.InputFileError):
        vio.read_profile_csv(tmp_path / "b.csv", 1, 1)


def test_field_and_scan_tables(tmp_path, integrable_run):
    prof, _ = integrable_run
    t = vio.read_table(vio.write_field_csv(tmp_path / "f.csv", reconstruct(prof, P)), FIELD_COLUMNS)
    assert t["r_phys"].size == prof.r.size
    rows = [ScanRow.from_outcome(shot(a, 0.0)) for a in (-15.0, 5.0)]
    vio.write_scan_csv(tmp_path / "s.csv", rows)
    vio.write_flux_region_csv(tmp_path / "fr.csv", rows)
    lines = (tmp_path / "fr.csv").read_text().splitlines()
    assert lines[0] == ",".join(vio.FLUX_REGION_COLUMNS) and len(lines) == 2
    scan_lines = (tmp_path / "s.csv").read_text().splitlines()
    assert scan_lines[0] == ",".join(vio.SCAN_COLUMNS) and ",inf," in scan_lines[1]


def test_sanitize_records_reasons():
    reasons = {"a.b": "kept"}
    out = vio.sanitize({"a": {"b": math.inf, "c": [1.0, math.nan]}, "d": np.float64(2.0),
                        "e": np.bool_(True)}, reasons)
    assert out == {"a": {"b": None, "c": [1.0, None]}, "d": 2.0, "e": True}
    assert reasons == {"a.b": "kept", "a.c.1": "undetermined"}


def _validator():
    schema = vio.load_schema()
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def test_solve_report_matches_schema(tmp_path):
    out, prof = solved("flux2", 2.5, 0.0)
    body = vio.write_report(tmp_path / "r.json", solve_report(P, out, prof))
    _validator().validate(body)
    text = (tmp_path / "r.json").read_text()
    assert "NaN" not in text and "Infinity" not in text
    assert json.loads(text)["spec_version"] == vio.SPEC_VERSION


def test_divergent_reports_match_schema(tmp_path, divergent_run):
    out = shot(-15.0, 0.0)
    body = vio.write_report(tmp_path / "r.json", solve_report(P, out, out.profile))
    _validator().validate(body)
    assert body["F1_inf"] is None and "F1_inf" in body["null_reasons"]
    chk = vio.write_report(tmp_path / "c.json", check_report(P, divergent_run[0], "x.csv"))
    _validator().validate(chk)
    assert chk["verdict"] == "divergent"


def test_check_reproduces_solve_diagnostics(tmp_path):
    out, prof = solved("flux2", 2.5, 0.0)
    path = vio.write_profile_csv(tmp_path / "p.csv", prof)
    back = vio.read_profile_csv(path, 1, 1, prof.init, prof.controls, prof.termination)
    a = pohozaev_report(prof, out.estimate).as_dict()
    b = pohozaev_report(back).as_dict()
    assert a == b
