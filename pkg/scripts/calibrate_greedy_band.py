"""Pilot run that fixes the accepted band for mean greedy size / (2 log2 n).

The pilot uses its own master seed so the acceptance run is an independent
sample.  Writes tests/golden/greedy_band.json.
"""

import json
import sys
from pathlib import Path

from lcis.greedy import greedy_size_stats

PILOT_SEED = 0x5EED_B0A7
TRIALS = 60
MARGIN = 0.04  # about 4 combined standard errors of the mean ratio

out = Path(__file__).resolve().parent.parent / "tests" / "golden" / "greedy_band.json"
bands = {}
for n in (1 << 10, 1 << 12, 1 << 14):
    st = greedy_size_stats(n, TRIALS, PILOT_SEED)
    bands[str(n)] = {
        "pilot_mean_ratio": st.ratio,
        "pilot_mean": st.mean,
        "pilot_std": st.std,
        "b_lo": round(st.ratio - MARGIN, 4),
        "b_hi": round(st.ratio + MARGIN, 4),
    }
    print(n, bands[str(n)], file=sys.stderr, flush=True)
out.write_text(json.dumps({"pilot_seed": PILOT_SEED, "trials": TRIALS, "margin": MARGIN,
                           "bands": bands}, indent=2) + "\n")
