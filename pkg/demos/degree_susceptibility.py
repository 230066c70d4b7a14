"""
Degree and flip susceptibility
==============================

A node surrounded by mostly-agreeing neighbours: how likely is it to flip,
as a function of how many neighbours it has?
"""

import numpy as np

from tipinfo import susceptibility_curve

for k in (1, 2, 4, 8):
    c = susceptibility_curve(k, beta=0.5, f=np.array([0.5, 0.6, 0.7, 0.8, 0.9]))
    print(f"k={k}:", np.round(c.expectation, 4))

# at f = 0.5 the neighbourhood carries no preference and every degree gives 1/2
