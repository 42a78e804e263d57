import math

import numpy as np
import pytest

from abjm_vortex import targeting
from abjm_vortex.functionals import INCONCLUSIVE
from abjm_vortex.params import VortexParams
from abjm_vortex.shooter import IntegrationControls
from abjm_vortex.targeting import (
    DIVERGENT,
    PrecisionError,
    ScanRow,
    TargetRejected,
    TargetSpec,
    TargetUnreachable,
    classify,
    scan,
    solve_target,
    verify_rk4,
)
from conftest import shot, solved

P11 = VortexParams(1, 1)


@pytest.mark.parametrize("kind,value", [("flux2", 2.0), ("flux2", 3.0), ("flux2", 3.5),
                                        ("flux1", 3.0), ("flux1", 2.0), ("energy", 0.0),
                                        ("energy", -1.0)])
def test_inadmissible_targets_rejected_before_integration(kind, value, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("integrated")
    monkeypatch.setattr(targeting, "classify", boom)
    with pytest.raises(TargetRejected):
        solve_target(TargetSpec(kind, value), P11)


@pytest.mark.parametrize("kw", [dict(kind="flux3", value=2.5), dict(kind="flux2", value=math.nan),
                                dict(kind="flux2", value=2.5, tol=0.0),
                                dict(kind="flux2", value=2.5, L=math.inf)])
def test_target_spec_validation(kw):
    with pytest.raises(ValueError):
        TargetSpec(**kw)


def test_classify_divergent_and_large_alpha():
    low = shot(-15.0, 0.0)
    assert low.verdict == DIVERGENT and math.isinf(low.energy) and math.isinf(low.f1_inf)
    high = shot(12.0, 0.0)
    assert high.verdict == "integrable"
    assert abs(high.f2_inf - 6.0) < 0.2


def test_classify_is_deterministic():
    a = classify(3.0, 0.0, P11)
    b = classify(3.0, 0.0, P11)
    assert (a.f1_inf, a.f2_inf, a.energy) == (b.f1_inf, b.f2_inf, b.energy)
    assert np.array_equal(a.profile.U, b.profile.U)


@pytest.mark.parametrize("value", [2.2, 2.5, 2.8])
def test_flux2_target(value):
    out, prof = solved("flux2", value, 0.0)
    assert abs(out.flux2_over_2pi - value) <= 1e-4
    assert prof is out.profile and out.verdict == "integrable"
    assert out.f1_inf > 2 * 3


def test_distinct_lines_give_distinct_data():
    outs = [solved("flux2", 2.5, L)[0] for L in (-2.0, 0.0, 2.0)]
    pairs = {(round(o.init.alpha1, 8), round(o.init.alpha2, 8)) for o in outs}
    assert len(pairs) == 3
    for o in outs:
        assert abs(o.flux2_over_2pi - 2.5) <= 1e-4


def test_flux1_target():
    out, _ = solved("flux1", 3.5, 0.0)
    assert abs(out.flux1_over_2pi - 3.5) <= 1e-4


def test_energy_target():
    spec = TargetSpec("energy", 0.1, 0.0, tol=1e-4)
    out, _ = solve_target(spec, P11)
    assert abs(out.energy - 0.1) <= 1e-4 * 0.1


def test_unreachable_inside_small_box():
    spec = TargetSpec("flux2", 2.95)
    with pytest.raises(TargetUnreachable):
        solve_target(spec, P11, alpha_lo=-1.0, alpha_hi=1.0, alpha_limit=1.0)


def test_precision_error_on_inconclusive_bisection(monkeypatch):
    real = targeting.classify
    probes = {float(k) for k in range(-50, 51, 2)}

    def flaky(alpha, L, params, controls=None, keep_profile=True):
        out = real(alpha, L, params, controls, keep_profile)
        if alpha not in probes:
            out.verdict = INCONCLUSIVE
        return out
    monkeypatch.setattr(targeting, "classify", flaky)
    with pytest.raises(PrecisionError):
        solve_target(TargetSpec("flux2", 2.5), P11)


def test_verify_rk4_agrees():
    out, _ = solved("flux2", 2.5, 0.0)
    f2, diff = verify_rk4(out, P11)
    assert diff < 1e-5 and f2 == pytest.approx(out.f2_inf, abs=1e-5)


def test_verify_rk4_needs_integrable():
    with pytest.raises(ValueError):
        verify_rk4(shot(-15.0, 0.0), P11)


def test_scan_order_and_jobs_independence():
    grid = np.linspace(-6, 10, 9)
    ctl = IntegrationControls()
    one = scan(grid, 0.0, P11, ctl, jobs=1)
    four = scan(grid, 0.0, P11, ctl, jobs=4)
    assert [r.alpha for r in one] == list(grid)
    assert one == four


def test_scan_rows_respect_necessary_conditions():
    rows = scan(np.linspace(-10, 14, 13), 0.0, P11)
    verdicts = [r.verdict for r in rows]
    assert verdicts[0] == DIVERGENT and verdicts[-1] == "integrable"
    for r in rows:
        if r.verdict == "integrable":
            assert 4 < r.F2_inf < 6 < r.F1_inf
            assert r.beta1 > 2 and 1 < r.beta2 < 2


def test_scan_rejects_non_finite_grid():
    with pytest.raises(ValueError):
        scan([0.0, math.nan], 0.0, P11)


def test_scan_row_divergent_fields():
    row = ScanRow.from_outcome(shot(-15.0, 0.0))
    assert math.isinf(row.F1_inf) and math.isfinite(row.F2_inf)


def test_energy_decreases_with_alpha():
    e = [shot(a, 0.0).energy for a in (4.0, 8.0, 12.0)]
    assert e[0] > e[1] > e[2] > 0
