# %% [markdown]
# # The Liouville baseline
#
# Far inside the vortex core the two-field system reduces to a Liouville
# system with explicit radial solutions.  This script checks the closed
# forms, the mass identity and the two kernel functions of the linearised
# operator, then solves one inhomogeneous problem with the Green solver.

# %%
import numpy as np

from abjm_vortex import liouville as lv

n1, n2 = 1, 1
r = np.logspace(-2, 2, 9)
pts = [lv.baseline(x, n1, n2) for x in r]
for p in pts[::2]:
    print(f"r={p.r:8.3g}  e^u0={p.eu0:.6g}  e^v0={p.ev0:.6g}")

# %% [markdown]
# The interaction density integrates to ``2 (N1 + N2 + 1)`` for every pair
# of multiplicities.

# %%
for a, b in [(1, 1), (1, 2), (2, 3), (3, 3)]:
    print(f"N=({a},{b})  mass={lv.liouville_mass(a, b):.12f}  expected={2 * (a + b + 1)}")

# %% [markdown]
# ``phi0`` is the bounded kernel element; ``psi0`` is the second, log-growing
# one.  Their Wronskian times ``r`` equals one.

# %%
h = 1e-6
x = np.array([0.3, 1.0, 4.0])
dphi = (lv.phi0(x * (1 + h), n1, n2) - lv.phi0(x * (1 - h), n1, n2)) / (2 * h * x)
dpsi = (lv.psi0(x * (1 + h), n1, n2) - lv.psi0(x * (1 - h), n1, n2)) / (2 * h * x)
print("r W(phi0, psi0) =", x * (lv.phi0(x, n1, n2) * dpsi - dphi * lv.psi0(x, n1, n2)))

# %% [markdown]
# Green solve with source ``e^{u0} + e^{v0}``: the solution grows like
# ``-c_f ln r`` and ``c_f`` is the constant that fixes the first-order flux
# correction.

# %%
f = lambda t: lv.exp_u0(t, n1, n2) + lv.exp_v0(t, n1, n2)  # noqa: E731
solver = lv.GreenSolver(f, n1, n2)
big = np.logspace(3, 6, 4)
print("w(r) + c_f ln r =", solver(big) + solver.c_f * np.log(big))
s1, s2 = lv.sigma_integrals(n1, n2)
print(f"sigma1={s1:.3g}  sigma2={s2:.12f}  4 pi/sqrt(3)={4 * np.pi / np.sqrt(3):.12f}")
