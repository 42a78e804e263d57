"""Physical parameters and unit conversions.

All solvers in this package work with the dimensionless radial system in
which the coupling ``lambda = 4 sigma**2`` has been scaled to one
(``r = sqrt(lambda) * r_phys``).  Physical units only enter here, when
fluxes and energies are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "VortexParams",
    "lambda_of",
    "flux_from_functional",
    "energy_from_integrals",
    "physical_energy",
    "alt_energy",
]


@dataclass(frozen=True)
class VortexParams:
    """Winding multiplicities and physical constants of a vortex.

    Parameters
    ----------
    n1, n2 : int
        Vanishing orders of the two scalar fields at the vortex point.
        Both must be at least one (the linearised problem around the
        Liouville profile has an infinite mass integral otherwise).
    sigma : float
        Mass deformation parameter, > 0.
    k : float
        Chern-Simons level, > 0.
    n_mat : int
        Matrix size N of the gauge group; only enters the energy prefactor
        ``N (N - 1)``.
    """

    n1: int = 1
    n2: int = 1
    sigma: float = 0.5
    k: float = 1.0
    n_mat: int = 2

    def __post_init__(self):
        for name in ("n1", "n2"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be a finite positive number, got {self.sigma!r}")
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be a finite positive number, got {self.k!r}")
        if int(self.n_mat) != self.n_mat or self.n_mat < 2:
            raise ValueError(f"n_mat must be an integer >= 2, got {self.n_mat!r}")
        object.__setattr__(self, "n_mat", int(self.n_mat))

    @property
    def lam(self) -> float:
        return lambda_of(self)

    @property
    def m(self) -> int:
        """Total order ``N1 + N2 + 1`` of the interaction term."""
        return self.n1 + self.n2 + 1

    @property
    def flux2_interval(self) -> tuple[float, float]:
        """Open interval of admissible ``Phi_2 / (2 pi)``."""
        return float(self.n2 + 1), float(self.m)

    @property
    def flux1_lower(self) -> float:
        """Open lower bound of admissible ``Phi_1 / (2 pi)``."""
        return float(self.m)

    @property
    def energy_prefactor(self) -> float:
        return self.n_mat * (self.n_mat - 1) * self.sigma**3 * self.k


def lambda_of(params: VortexParams) -> float:
    """Coupling ``lambda = 4 sigma**2`` of the elliptic system."""
    return 4.0 * params.sigma**2


def flux_from_functional(f_inf: float) -> float:
    """Magnetic flux ``Phi = pi * F(inf)`` from a limiting radial functional.

    ``Phi / (2 pi) = F(inf) / 2`` is the normalisation used for targets.
    """
    return math.pi * f_inf


def energy_from_integrals(params: VortexParams, int_eu: float, int_ev: float) -> float:
    """Energy ``N (N-1) sigma**3 k (int_eu + int_ev)``.

    ``int_eu`` and ``int_ev`` are the radial integrals of ``t e^u`` and
    ``t e^v`` measured in physical radius.  Use :func:`physical_energy` to
    start from the dimensionless integrals produced by the shooter.
    """
    if int_eu < 0 or int_ev < 0:
        raise ValueError("radial integrals of positive densities must be >= 0")
    return params.energy_prefactor * (int_eu + int_ev)


def physical_energy(params: VortexParams, int_eu_dimless: float, int_ev_dimless: float) -> float:
    """Energy from dimensionless radial integrals.

    Converting ``t -> t / sqrt(lambda)`` divides each radial integral by
    ``lambda``; the result equals ``N(N-1) sigma k / 4 * (F1 - F2)`` which is
    the flux-difference form of the self-dual energy.
    """
    lam = lambda_of(params)
    return energy_from_integrals(params, int_eu_dimless / lam, int_ev_dimless / lam)


def alt_energy(params: VortexParams, int_eu_dimless: float, int_ev_dimless: float) -> float:
    """Energy under the ``N(N-1) sigma k / (2 pi)`` flux-difference prefactor.

    This convention is exactly twice :func:`physical_energy`; it is reported
    alongside the canonical value and never used for targeting.
    """
    return 2.0 * physical_energy(params, int_eu_dimless, int_ev_dimless)
