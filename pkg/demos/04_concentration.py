# %% [markdown]
# # Concentration at large initial data
#
# As ``alpha`` grows the solution concentrates: ``F2(inf)`` climbs toward
# ``2 (N1 + N2 + 1)`` and, after rescaling, ``U + V`` approaches an explicit
# Liouville profile.  The convergence is slow, and no rate is claimed.

# %%
from abjm_vortex import VortexParams, classify
from abjm_vortex.diagnostics import blowup_limit_check
from abjm_vortex.perturbation import concentration_report

params = VortexParams()
outs = [classify(a, 0.0, params) for a in (4.0, 8.0, 12.0, 16.0)]
rep = blowup_limit_check([o.profile for o in outs], [o.estimate for o in outs])
for a, f2, gap, d in zip(rep.alphas, rep.f2_inf, rep.gaps, rep.sup_distance):
    print(f"alpha={a:5.1f}  F2(inf)={f2:.6f}  gap to 6={gap:.4f}  sup distance={d:.3g}")
print("monotone:", rep.monotone_f2, rep.monotone_distance)

# %% [markdown]
# The small-``eps`` side of the same limit, from the first-order
# perturbative profile around the Liouville solution: both fluxes approach
# ``N1 + N2 + 1`` and the energy vanishes linearly in ``eps``.

# %%
for row in concentration_report([0.2, 0.1, 0.05, 0.025], params):
    print(f"eps={row.eps:6.3f}  Phi1/2pi={row.flux1_over_2pi:.5f}  Phi2/2pi={row.flux2_over_2pi:.5f}  "
          f"energy={row.energy:.5f}  core mass fraction={row.mass_fraction:.6f}")
