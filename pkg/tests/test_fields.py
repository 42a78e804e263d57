import math

import numpy as np
import pytest
from scipy.integrate import simpson

from abjm_vortex.fields import (
    FIELD_COLUMNS,
    FieldSample,
    flux_difference_energy,
    flux_quadrature,
    reconstruct,
    totals,
)
from abjm_vortex.functionals import slope_fit
from abjm_vortex.params import VortexParams
from conftest import run

P = VortexParams(1, 1)


def _decade(prof):
    return prof.r >= prof.terminal_r / 10


def test_flux_quadrature_matches_functional(integrable_run):
    prof, est = integrable_run
    phi1, phi2 = flux_quadrature(prof, P, est)
    assert phi1 == pytest.approx(math.pi * est.f1_inf, rel=1e-6)
    assert phi2 == pytest.approx(math.pi * est.f2_inf, rel=1e-6)


def test_energy_two_ways(integrable_run):
    prof, est = integrable_run
    t = totals(prof, P, est)
    assert t.energy == pytest.approx(flux_difference_energy(P, t.phi1, t.phi2), rel=1e-10)
    assert t.energy_alt == pytest.approx(2 * t.energy, rel=1e-15)
    phi1, phi2, e = t
    assert (phi1, phi2, e) == (t.phi1, t.phi2, t.energy)


def test_energy_density_integrates_to_energy(integrable_run):
    prof, est = integrable_run
    tab = reconstruct(prof, P)
    x = np.log(tab.r_phys)
    body = 2 * math.pi * simpson(tab.r_phys**2 * tab.energy_density, x=x)
    tail = flux_difference_energy(P, *flux_quadrature(prof, P, est)) - flux_difference_energy(
        P, 2 * math.pi * simpson(tab.r_phys**2 * tab.f12_1, x=x),
        2 * math.pi * simpson(tab.r_phys**2 * tab.f12_2, x=x))
    assert body + tail == pytest.approx(totals(prof, P, est).energy, rel=1e-6)


def test_sign_structure(integrable_run):
    prof, _ = integrable_run
    tab = reconstruct(prof, P)
    assert np.all(tab.f12_1 > 0)
    away = np.abs(prof.v) > 1e-8
    assert np.array_equal(np.sign(tab.f12_2[away]), np.sign(prof.v[away]))
    assert np.all(tab.phi1_sq > 0) and np.all(tab.dphi2_sq >= 0)


def test_decay_slopes(integrable_run):
    prof, est = integrable_run
    tab = reconstruct(prof, P)
    sel = _decade(prof)
    cases = [
        (tab.f12_1, -2 * est.beta2),
        (np.abs(tab.f12_2), -2 * est.beta1),
        (tab.dphi1_sq, -2 * est.beta1 - 2),
        (tab.dphi2_sq, -2 * est.beta2 - 2),
    ]
    for col, want in cases:
        got = slope_fit(tab.r_phys[sel], np.log(col[sel]))
        assert abs(got - want) / abs(want) < 0.02


def test_values_at_origin():
    p = VortexParams(2, 1, sigma=1.0, k=3.0)
    prof, _ = run(2, 1, 1.5, -0.5)
    tab = reconstruct(prof, p)
    r0 = prof.r[0]
    c2 = p.sigma * p.k / (2 * math.pi)
    assert tab.phi1_sq[0] == pytest.approx(c2 * math.exp(1.5) * r0**4, rel=1e-6)
    assert tab.phi2_sq[0] == pytest.approx(c2 * math.exp(-0.5) * r0**2, rel=1e-6)
    # f12_1 -> 2 sigma^2 e^v and f12_2 -> -2 sigma^2 e^u at the vortex point
    assert tab.f12_1[0] == pytest.approx(2 * math.exp(-0.5) * r0**2, rel=1e-6)
    assert tab.r_phys[0] == pytest.approx(r0 / 2)


@pytest.mark.parametrize("sigma,k", [(0.5, 1.0), (2.0, 1.0), (1.0, 7.0)])
def test_sigma_and_k_scaling(integrable_run, sigma, k):
    prof, est = integrable_run
    p = VortexParams(1, 1, sigma=sigma, k=k)
    phi1, phi2 = flux_quadrature(prof, p, est)
    assert phi1 == pytest.approx(math.pi * est.f1_inf, rel=1e-6)
    assert phi2 == pytest.approx(math.pi * est.f2_inf, rel=1e-6)
    base = totals(prof, P, est).energy
    assert totals(prof, p, est).energy == pytest.approx(base * sigma * k / 0.5, rel=1e-12)


def test_table_rows(integrable_run):
    tab = reconstruct(integrable_run[0], P)
    row = tab[3]
    assert isinstance(row, FieldSample)
    assert row.f12_1 == tab.f12_1[3]
    assert len(list(tab)) == len(tab)
    assert tuple(tab.columns()) == FIELD_COLUMNS
    assert "energy_density" in tab.metadata
