"""
Routes to the tipping point
===========================

Every way of flipping half the kite, one node at a time, from the all-zero
state, scored by the probability the Glauber chain takes exactly that route.
"""

import numpy as np

from tipinfo import (ModelParams, enumerate_tipping_trajectories, flip_expectations,
                     krackhardt_kite, max_likelihood_trajectories)

g = krackhardt_kite()
trajs = enumerate_tipping_trajectories(g, ModelParams(beta=0.534))
print(len(trajs), "trajectories")

best = max_likelihood_trajectories(trajs)
print(len(best), "share the top probability:")
for t in best:
    print("  ", t.nodes)

# %%
# Which nodes tend to be in state 1 at each stage of the climb
e = flip_expectations(trajs, g.n)
print("P(node flipped) by number of flips so far")
print(np.round(e, 3))
