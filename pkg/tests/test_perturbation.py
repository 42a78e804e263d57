import math
import warnings

import numpy as np
import pytest

from abjm_vortex import liouville as lv
from abjm_vortex.params import VortexParams
from abjm_vortex.perturbation import (
    PerturbProfile,
    concentration_report,
    make_profile,
    perturb_profile,
    profile_fluxes,
    scaled_residual_norm,
    u2_v2,
)
from oracles import U2_SLOPE_N11, laplacian_fd

EPS = [0.1, 0.05, 0.025]


def test_u2_v2_vanish_at_origin():
    u2, v2 = u2_v2(np.array([0.0]), 1, 2)
    assert u2[0] == 0.0 and v2[0] == 0.0


@pytest.mark.parametrize("n1,n2", [(1, 1), (1, 2), (3, 1)])
def test_first_order_equations(n1, n2):
    r = np.logspace(-1.5, 1.5, 13)
    eu = lv.exp_u0(r, n1, n2)
    ev = lv.exp_v0(r, n1, n2)
    u2, v2 = u2_v2(r, n1, n2)
    lap_u = laplacian_fd(lambda x: u2_v2(x, n1, n2)[0], r)
    lap_v = laplacian_fd(lambda x: u2_v2(x, n1, n2)[1], r)
    assert np.max(np.abs(lap_u + eu * ev * (u2 + v2) + ev)) < 1e-6
    assert np.max(np.abs(lap_v + eu * ev * (u2 + v2) - eu)) < 1e-6


def test_log_slopes_n11():
    r = np.logspace(2, 4, 41)
    u2, v2 = u2_v2(r, 1, 1)
    assert np.polyfit(np.log(r), u2, 1)[0] == pytest.approx(U2_SLOPE_N11, rel=1e-4)
    assert np.polyfit(np.log(r), v2, 1)[0] == pytest.approx(-U2_SLOPE_N11, rel=1e-4)


def test_log_slopes_general():
    n1, n2 = 1, 3
    s1, s2 = lv.sigma_integrals(n1, n2)
    r = np.logspace(3, 5, 41)
    u2, v2 = u2_v2(r, n1, n2)
    assert np.polyfit(np.log(r), u2, 1)[0] == pytest.approx(-(s1 + s2) / 2, rel=1e-5)
    assert np.polyfit(np.log(r), v2, 1)[0] == pytest.approx(-(s1 - s2) / 2, rel=1e-5)


def test_eps_validation():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            perturb_profile(bad, 1.0, 1, 1)
    with pytest.warns(RuntimeWarning):
        perturb_profile(0.3, 1.0, 1, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        perturb_profile(0.2, 1.0, 1, 1)


def test_profile_formula():
    eps, r = 0.05, np.array([1e-3, 0.05, 2.0])
    u, v = perturb_profile(eps, r, 2, 1)
    u0, v0 = lv._log_baseline(r / eps, 2, 1)
    u2, v2 = u2_v2(r / eps, 2, 1)
    assert np.allclose(u, u0 + eps * u2 + math.log(1 / eps), atol=1e-14)
    assert np.allclose(v, v0 + eps * v2 + math.log(1 / eps), atol=1e-14)


def test_profile_invariant():
    p = make_profile(0.1, 2, 1)
    assert p.r.size > 100
    with pytest.raises(ValueError):
        PerturbProfile(eps=0.1, n1=2, n2=1, r=p.r, u=p.u + 1e-3, v=p.v)


@pytest.fixture(scope="module")
def report_n11():
    return concentration_report(EPS, VortexParams(1, 1))


def test_fluxes_approach_limit(report_n11):
    m = 3
    for key in ("flux1_over_2pi", "flux2_over_2pi"):
        gaps = [abs(getattr(row, key) - m) for row in report_n11]
        assert gaps[0] > gaps[1] > gaps[2]
    diffs = [row.flux1_over_2pi - row.flux2_over_2pi for row in report_n11]
    assert diffs[0] > diffs[1] > diffs[2] > 0


def test_energy_decreasing(report_n11):
    e = [row.energy for row in report_n11]
    assert e[0] > e[1] > e[2] > 0
    # the energy is linear in eps to leading order
    assert e[2] / e[0] == pytest.approx(0.25, rel=0.05)


def test_mass_concentrates(report_n11):
    assert all(row.mass_fraction >= 0.9 for row in report_n11)


def test_residual_shrinks_at_least_linearly(report_n11):
    for a, b in zip(report_n11, report_n11[1:]):
        assert b.residual[0] <= a.residual[0] / 2
        assert b.residual[1] <= a.residual[1] / 2


def test_small_integrals_scale_with_eps():
    a = profile_fluxes(0.05, 1, 2)
    b = profile_fluxes(0.025, 1, 2)
    assert b.int_eu / a.int_eu == pytest.approx(0.5, rel=0.05)
    assert b.int_ev / a.int_ev == pytest.approx(0.5, rel=0.05)
    assert a.f1 == pytest.approx(a.int_euv + a.int_ev)
    assert a.f2 == pytest.approx(a.int_euv - a.int_eu)


def test_decay_exponents_of_profile():
    n1, n2, eps = 2, 1, 0.025
    r = np.logspace(5, 6, 41)
    u, v = perturb_profile(eps, r, n1, n2)
    beta1 = -np.polyfit(np.log(r), u, 1)[0] / 2
    beta2 = -np.polyfit(np.log(r), v, 1)[0] / 2
    assert beta1 == pytest.approx(n2 + 1, abs=0.2)
    assert beta2 == pytest.approx(n1 + 1, abs=0.2)


def test_residual_norm_direct_small_eps():
    a = scaled_residual_norm(0.02, 1, 1)
    b = scaled_residual_norm(0.01, 1, 1)
    assert b[0] < a[0] / 3 and b[1] < a[1] / 3


def test_report_requires_decreasing():
    with pytest.raises(ValueError):
        concentration_report([0.05, 0.1], VortexParams())
