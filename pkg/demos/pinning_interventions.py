"""
Pinning one node
================

Clamp a node to state 0 for a whole Monte-Carlo run and compare noise and
basin switching against an unpinned control.
"""

import numpy as np

from tipinfo import SimConfig, intervention_sweep, krackhardt_kite, simulate

g = krackhardt_kite()
ctrl = simulate(SimConfig(g, beta=0.534, steps=1_000_000, seed=0))
print("control: transitions", ctrl.stats.transitions,
      "time below 0.5", round(ctrl.stats.frac_time_below, 3))

# %%
# Three seeds, every node pinned in turn
res = intervention_sweep([g], 0.534, seeds=(0, 12, 123), steps=500_000)
control = sum(s.transitions for s in res.controls.values())
per_node = np.zeros(g.n)
for r in res.records:
    per_node[r.pinned_node] += r.transitions
print("transitions relative to control:", np.round(per_node / control, 2))
