"""
Information flow on the kite network
====================================

Exact lagged mutual information between each node and the whole system,
conditioned on starting in a given macrostate, then the role score built
from its short-term area and its long-term plateau.
"""

import warnings

import numpy as np

from tipinfo import (ModelParams, boltzmann_distribution, curve_features, info_curves,
                     krackhardt_kite, macrostate_marginal, match_noise, role_scores)

g = krackhardt_kite()
print("degrees:", g.degrees)

# complexity matching picks one temperature; the working point below is the
# value at which the kite dynamics actually switch between basins
print("complexity-matched beta:", round(match_noise(g), 4))
params = ModelParams(beta=0.534)

# the stationary macrostate distribution has two symmetric humps
marginal = macrostate_marginal(boltzmann_distribution(g, params), g.n)
print("P(<S> = k/10):", np.round(marginal, 4))

# %%
# One curve per (node, partition). All nodes of a partition are propagated
# together as columns of one matrix.
curves = info_curves(g, params, t_max=300)
node3_half = next(c for c in curves if c.node == 3 and c.gamma == 0.5)
print("node 3 at gamma=0.5, I(t) for t=0,10,100,300:",
      np.round(node3_half.values[[0, 10, 100, 300]], 4))

# %%
# Fit each curve with two exponentials and an offset. The offset is omega,
# the area above it is mu.
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    feats = curve_features(curves, g.n)
roles = role_scores(feats.mu, feats.omega)

print("node  mu*    omega*  role")
for v in np.argsort(-roles.role):
    print(f"{v:>4}  {roles.mu_star[v]:.3f}  {roles.omega_star[v]:.3f}  {roles.role[v]:+.3f}")
