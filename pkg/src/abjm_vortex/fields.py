"""Physical field magnitudes reconstructed from a dimensionless radial run.

Lengths scale back by ``r_phys = r / sqrt(lambda)``; ``u`` and ``v`` are
unchanged by the rescaling, so only radial derivatives pick up a factor
``sqrt(lambda)``.  With ``c^2 = sigma k / (2 pi)`` the magnitudes are

    |phi1|^2 = (sigma k / 2 pi) e^u,      |phi2|^2 = (sigma k / 2 pi) e^v,
    f12_1    = 2 sigma^2 e^v (e^u + 1),   f12_2    = 2 sigma^2 e^u (e^v - 1),
    |D phi1|^2 = (sigma k / 4 pi) e^u |u'|^2 lambda   (same for v).

The energy density is the self-dual one,
``N(N-1)/2 * c^2 * (f12_1 - f12_2)``.  The total divergences that separate
it from the full density integrate to zero and are left out pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .functionals import tail_extrapolate
from .params import VortexParams, alt_energy, physical_energy

__all__ = [
    "FIELD_COLUMNS",
    "FieldSample",
    "FieldTable",
    "reconstruct",
    "Totals",
    "totals",
    "flux_quadrature",
    "flux_difference_energy",
]

FIELD_COLUMNS = (
    "r_phys", "phi1_sq", "phi2_sq", "f12_1", "f12_2", "dphi1_sq", "dphi2_sq", "energy_density",
)


@dataclass(frozen=True)
class FieldSample:
    """Field magnitudes at one radius (physical units)."""

    r_phys: float
    phi1_sq: float
    phi2_sq: float
    f12_1: float
    f12_2: float
    dphi1_sq: float
    dphi2_sq: float
    energy_density: float


@dataclass
class FieldTable:
    """Column arrays of :class:`FieldSample` values on a profile grid.

    Indexing and iteration yield :class:`FieldSample` rows.
    """

    r_phys: np.ndarray
    phi1_sq: np.ndarray
    phi2_sq: np.ndarray
    f12_1: np.ndarray
    f12_2: np.ndarray
    dphi1_sq: np.ndarray
    dphi2_sq: np.ndarray
    energy_density: np.ndarray
    metadata: dict

    def __len__(self):
        return len(self.r_phys)

    def __getitem__(self, i):
        return FieldSample(*(float(getattr(self, c)[i]) for c in FIELD_COLUMNS))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def columns(self):
        """Mapping of column name to array, in CSV order."""
        return {c: getattr(self, c) for c in FIELD_COLUMNS}


def reconstruct(profile, params: VortexParams) -> FieldTable:
    """Physical field magnitudes on the checkpoint grid of ``profile``.

    The profile should be integrable; nothing here depends on that, but the
    fields of a divergent run carry infinite flux.
    """
    lam = params.lam
    sk = params.sigma * params.k
    s2 = params.sigma**2
    e_u, e_v = np.exp(profile.u), np.exp(profile.v)
    du = (2 * profile.n1 - profile.F1) / profile.r
    dv = (2 * profile.n2 - profile.F2) / profile.r
    f1 = 2 * s2 * e_v * (e_u + 1)
    f2 = 2 * s2 * e_u * (e_v - 1)
    nn = params.n_mat * (params.n_mat - 1)
    return FieldTable(
        r_phys=profile.r / math.sqrt(lam),
        phi1_sq=sk / (2 * math.pi) * e_u,
        phi2_sq=sk / (2 * math.pi) * e_v,
        f12_1=f1,
        f12_2=f2,
        dphi1_sq=sk / (4 * math.pi) * e_u * du**2 * lam,
        dphi2_sq=sk / (4 * math.pi) * e_v * dv**2 * lam,
        energy_density=nn * sk / (4 * math.pi) * (f1 - f2),
        metadata={
            "energy_density": "self-dual density N(N-1)/2 c^2 (f12_1 - f12_2); "
                              "total divergence terms omitted",
            "lambda": lam,
            "c_sq": sk / (2 * math.pi),
        },
    )


@dataclass(frozen=True)
class Totals:
    """Fluxes and energy of an integrable solution."""

    phi1: float
    phi2: float
    energy: float
    energy_alt: float

    def __iter__(self):
        # unpacks as (Phi1, Phi2, E)
        return iter((self.phi1, self.phi2, self.energy))


def totals(profile, params: VortexParams, estimate=None) -> Totals:
    """Total fluxes ``Phi_i = pi F_i(inf)`` and the energy.

    The energy comes from the tail-corrected radial integrals; ``energy_alt``
    is the same quantity under the doubled flux-difference prefactor.
    """
    est = tail_extrapolate(profile) if estimate is None else estimate
    return Totals(
        phi1=math.pi * est.f1_inf,
        phi2=math.pi * est.f2_inf,
        energy=physical_energy(params, est.int_eu, est.int_ev),
        energy_alt=alt_energy(params, est.int_eu, est.int_ev),
    )


def flux_quadrature(profile, params: VortexParams, estimate=None):
    """Fluxes ``2 pi int f12_i r dr`` by Simpson quadrature in ``ln r``.

    Uses only the reconstructed fields, not the accumulated functionals,
    except beyond the last radius where the tail terms of ``estimate`` are
    added.  The piece below the first checkpoint is neglected.

    Returns
    -------
    (Phi1, Phi2) : tuple of float
    """
    est = tail_extrapolate(profile) if estimate is None else estimate
    table = reconstruct(profile, params)
    x = np.log(table.r_phys)
    r2 = table.r_phys**2
    t_uv = est.int_euv - profile.Iuv[-1]
    t_u = est.int_eu - profile.Iu[-1]
    t_v = est.int_ev - profile.Iv[-1]
    # dimensionless tails -> physical: 2 sigma^2 / lambda = 1/2
    scale = 2 * params.sigma**2 / params.lam
    phi1 = 2 * math.pi * (simpson(r2 * table.f12_1, x=x) + scale * (t_uv + t_v))
    phi2 = 2 * math.pi * (simpson(r2 * table.f12_2, x=x) + scale * (t_uv - t_u))
    return phi1, phi2


def flux_difference_energy(params: VortexParams, phi1, phi2):
    """Energy ``N(N-1) sigma k / (4 pi) * (Phi1 - Phi2)``."""
    nn = params.n_mat * (params.n_mat - 1)
    return nn * params.sigma * params.k / (4 * math.pi) * (phi1 - phi2)
