# %% [markdown]
# # Interpolation families and the exponent calculus
#
# The hardness argument runs the algorithm on m correlated inputs that share
# the edges among the first tau processed vertices.  At desk scale we can
# build such families, check their structure and evaluate the exponents.

# %%
import numpy as np

from lcis import (
    OgpParams,
    build_family,
    exponent_report,
    greedy_as_online,
    psi_min_check,
    run_family,
    run_online,
    sample_pair,
    stopping_time_tau,
)

params = OgpParams.from_eps(1.0, 64)
print(params, "tau threshold", params.tau_threshold, "large size", params.large_size)

y = sample_pair(64, seed=1)
sol, tr = run_online(greedy_as_online(), y)
tau = stopping_time_tau(tr, params.tau_threshold)
print("greedy size", sol.size, "tau", tau)

# %%
fam = build_family(y, tr, tau, params.m, seed=7)
run = run_family(greedy_as_online(), fam, params.large_size)
print("member sizes", run.sizes)
print("all members large:", run.success)
mask = fam.fixed_mask(1)
print("fixed pairs per graph:", mask.sum() // 2)

# %% [markdown]
# Psi at its minimum must stay at least 1 for the first-moment bound to close.

# %%
for eps in (0.25, 0.5, 1.0, 2.0):
    c = psi_min_check(eps)
    print(f"eps={eps}: m={c.m} alpha*={c.alpha_min:.3f} psi_min={c.psi_min:.6f} pass={c.passed}")

rep = exponent_report(1.0, n=1 << 20)
for row in rep["grid"][:3]:
    print({k: round(v, 3) for k, v in row.items()})
