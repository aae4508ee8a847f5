# %% [markdown]
# # Greedy common induced subgraph on G(n, 1/2)
#
# Sample a pair of random graphs, run the greedy algorithm and look at what it
# found.  Everything is seeded, so rerunning prints the same numbers.

# %%
import math

import numpy as np

from lcis import exact_lcis, greedy_lcis, sample_pair, verify_solution

y = sample_pair(256, seed=1)
print(y.g1, y.g2)

# %% [markdown]
# The solution pairs `s1[i]` with `s2[i]`; the transcript keeps one record per round.

# %%
sol, tr = greedy_lcis(y)
print("size", sol.size, "vs 2 log2 n =", 2 * math.log2(y.n))
print("valid:", verify_solution(y, sol))
print("first rounds:")
print(tr.to_jsonl().splitlines()[0])
print(tr.to_jsonl().splitlines()[1])

# %% [markdown]
# Partial solution size over rounds.  Growth slows down as the matched list
# gets longer, since each new pair must agree with every matched vertex.

# %%
sizes = np.array(tr.sizes())
for t in (8, 32, 64, 128, 256):
    print(f"t={t:4d}  |S|={sizes[t - 1]}")

# %% [markdown]
# On small inputs the exact solver shows how much greedy leaves on the table.

# %%
for n in (10, 14, 18):
    small = sample_pair(n, seed=n)
    g = greedy_lcis(small, transcript=False)[0].size
    e = exact_lcis(small)
    print(f"n={n}: greedy={g} exact={e.size} ({e.flag}, {e.nodes} nodes)")
