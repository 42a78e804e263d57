# %% [markdown]
# # Classifying shots along a line of initial data
#
# Initial data ``(alpha1, alpha2)`` are taken on the line
# ``alpha2 = ((2 N2 + 1) alpha - L) / (2 N1 + 1)``.  Small ``alpha`` gives
# runs whose first flux diverges; large ``alpha`` gives integrable
# vortices whose fluxes approach ``N1 + N2 + 1`` from opposite sides.

# %%
import numpy as np

from abjm_vortex import VortexParams, classify, scan

params = VortexParams(n1=1, n2=1)
for alpha in (-10.0, 0.0, 5.0):
    out = classify(alpha, 0.0, params)
    print(f"alpha={alpha:6.1f}  verdict={out.verdict:10s}  F2(inf)={out.f2_inf:.6f}  "
          f"termination={out.profile.termination}")

# %% [markdown]
# A scan maps the admissible region.  Integrable rows have
# ``Phi2 / 2pi`` in ``(N2 + 1, N1 + N2 + 1)`` and ``Phi1 / 2pi`` above
# ``N1 + N2 + 1``.  Rows are independent, so the pool size does not change
# the table.

# %%
rows = scan(np.linspace(-4, 14, 10), 0.0, params, jobs=2)
print(f"{'alpha':>7} {'verdict':>10} {'Phi1/2pi':>10} {'Phi2/2pi':>10} {'energy':>10}")
for r in rows:
    print(f"{r.alpha:7.2f} {r.verdict:>10} {r.flux1_over_2pi:10.5f} {r.flux2_over_2pi:10.5f} {r.energy:10.4g}")

# %% [markdown]
# The diverging side of the transition: the run stops once the flux of
# the second field has settled below ``2 (N2 + 1)``, which already rules out
# an integrable vortex.

# %%
out = classify(-3.0, 0.0, params)
print(out.diagnostics)
