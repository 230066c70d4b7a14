"""
A random-graph ensemble
=======================

Draw connected Erdos-Renyi graphs, keeping one per isomorphism class.
"""

from collections import Counter

from tipinfo import erdos_renyi_ensemble

graphs = erdos_renyi_ensemble(n=10, p=0.2, count=100, seed=0)
print(len(graphs), "graphs")
print("edge counts:", sorted(Counter(g.n_edges for g in graphs).items()))
print(graphs[0].to_edgelist())
