"""Radial non-topological vortices of a two-field self-dual Chern-Simons model.

The package integrates the radial reduction of the elliptic system
``-Delta u = e^v (e^u + 1)``, ``-Delta v = e^u (e^v - 1)`` with vortex
sources of multiplicities ``N1, N2`` at the origin, classifies shots as
integrable or divergent, and shoots for prescribed fluxes or energies.
"""

from .params import VortexParams, alt_energy, energy_from_integrals, physical_energy
from .shooter import InitialData, IntegrationControls, RadialProfile, integrate
from .functionals import TailEstimate, tail_extrapolate
from .targeting import ShotOutcome, TargetSpec, classify, scan, solve_target
from .fields import reconstruct, totals

__version__ = "1.0.0"

__all__ = [
    "VortexParams",
    "energy_from_integrals",
    "physical_energy",
    "alt_energy",
    "InitialData",
    "IntegrationControls",
    "RadialProfile",
    "integrate",
    "TailEstimate",
    "tail_extrapolate",
    "ShotOutcome",
    "TargetSpec",
    "classify",
    "scan",
    "solve_target",
    "reconstruct",
    "totals",
]
