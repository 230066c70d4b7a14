import math

import numpy as np
import pytest

from tipinfo.graph import krackhardt_kite, path_graph
from tipinfo.ising import ModelParams, transfer_operator
from tipinfo.paths import (
    Trajectory,
    enumerate_tipping_trajectories,
    flip_expectations,
    max_likelihood_trajectories,
)

KITE_MIRROR = {0: 1, 1: 0, 2: 4, 4: 2, 5: 6, 6: 5, 3: 3, 7: 7, 8: 8, 9: 9}


@pytest.fixture(scope="module")
def kite_trajs():
    return enumerate_tipping_trajectories(krackhardt_kite(), ModelParams(0.534))


def test_counts(kite_trajs):
    assert len(kite_trajs) == 30240 == math.perm(10, 5)
    assert len(enumerate_tipping_trajectories(path_graph(4), ModelParams(1.0))) == 12


def test_odd_n_rejected():
    with pytest.raises(ValueError):
        enumerate_tipping_trajectories(path_graph(5), ModelParams(1.0))


def test_trajectory_shape(kite_trajs):
    top = max(t.log_prob for t in kite_trajs)
    for t in kite_trajs[::997]:
        s = t.states
        assert s[0] == 0 and len(s) == 6
        assert all(bin(b).count("1") == a for a, b in enumerate(s))
        assert all(bin(x ^ y).count("1") == 1 for x, y in zip(s, s[1:]))
        assert t.log_prob <= top and math.exp(t.log_prob) <= 1


def test_log_prob_matches_operator():
    g = path_graph(4)
    p = ModelParams(0.9)
    op = transfer_operator(g, p).dense()
    for t in enumerate_tipping_trajectories(g, p):
        s = t.states
        expected = sum(math.log(op[a, b]) for a, b in zip(s, s[1:]))
        assert t.log_prob == pytest.approx(expected, abs=1e-12)


def test_comaximal_kite(kite_trajs):
    best = max_likelihood_trajectories(kite_trajs)
    assert all(t.nodes[0] in (9, 2, 4) for t in best)
    assert sum(t.nodes[0] == 9 for t in best) > len(best) / 2
    # the kite mirror automorphism maps the co-maximal set onto itself
    seqs = {t.nodes for t in best}
    assert {tuple(KITE_MIRROR[v] for v in s) for s in seqs} == seqs


def test_single_input():
    t = Trajectory((0, 1), -3.0)
    assert max_likelihood_trajectories([t]) == [t]


def test_flip_expectations(kite_trajs):
    e = flip_expectations(kite_trajs, 10)
    assert e.shape == (10, 6)
    np.testing.assert_array_equal(e[:, 0], 0.0)
    np.testing.assert_allclose(e.sum(axis=0), np.arange(6), atol=1e-12)
    assert e[9, 1] > np.delete(e[:, 1], 9).max()
    u = flip_expectations(kite_trajs, 10, weighting="uniform")
    np.testing.assert_allclose(u[:, 1], 0.1, atol=1e-12)
