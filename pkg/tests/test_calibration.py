import numpy as np
import pytest

from tipinfo.calibration import (
    CalibrationError,
    complexity_curve,
    match_noise,
    statistical_complexity,
)
from tipinfo.graph import Graph, krackhardt_kite, path_graph
from tipinfo.ising import ModelParams, boltzmann_distribution


def test_uniform_and_point_mass():
    u = statistical_complexity(np.full(16, 1 / 16))
    assert u.disequilibrium == pytest.approx(0.0, abs=1e-15) and u.complexity == pytest.approx(0.0, abs=1e-15)
    pm = statistical_complexity(np.eye(8)[3])
    assert pm.entropy_normalized == 0.0 and pm.complexity == 0.0


def test_two_state_hand_value():
    r = statistical_complexity([0.75, 0.25])
    h = -(0.75 * np.log2(0.75) + 0.25 * np.log2(0.25))
    assert r.entropy_normalized == pytest.approx(h, abs=1e-15)
    assert r.entropy_normalized == pytest.approx(0.81128, abs=1e-5)
    assert r.disequilibrium == pytest.approx(0.125, abs=1e-15)
    assert r.complexity == pytest.approx(0.10141, abs=1e-5)


def test_permutation_invariant():
    rng = np.random.default_rng(0)
    p = rng.dirichlet(np.ones(32))
    a = statistical_complexity(p)
    b = statistical_complexity(rng.permutation(p))
    assert a.complexity == pytest.approx(b.complexity, rel=1e-12)


def test_needs_two_states():
    with pytest.raises(ValueError):
        statistical_complexity([1.0])


def _grid_argmax(g, lo, hi, npts):
    ts = np.linspace(lo, hi, npts)
    cs = [statistical_complexity(boltzmann_distribution(g, ModelParams(1 / t))).complexity for t in ts]
    return ts[int(np.argmax(cs))], np.array(cs)


@pytest.mark.parametrize("g", [krackhardt_kite(), path_graph(6), Graph(3, [(0, 1), (1, 2), (0, 2)])])
def test_maximizer_beats_grid(g):
    beta = match_noise(g, (0.5, 10.0))
    c_star = statistical_complexity(boltzmann_distribution(g, ModelParams(beta))).complexity
    _, cs = _grid_argmax(g, 0.5, 10.0, 100)
    assert c_star >= cs.max() - 1e-12
    # endpoints are strictly worse than the optimum
    assert cs[0] < c_star and cs[-1] < c_star


def test_two_node_grid_oracle():
    g = Graph(2, [(0, 1)])
    t_grid, _ = _grid_argmax(g, 0.1, 10.0, 1000)
    assert 1 / match_noise(g, (0.1, 10.0)) == pytest.approx(t_grid, abs=1e-3 + 9.9 / 999)


def test_kite_grid_oracle():
    g = krackhardt_kite()
    t_grid, _ = _grid_argmax(g, 0.5, 3.0, 2501)
    assert 1 / match_noise(g) == pytest.approx(t_grid, abs=2e-3)


def test_flat_complexity_fails():
    # an isolated node has a uniform Boltzmann distribution at every temperature
    with pytest.raises(CalibrationError):
        match_noise(Graph(1, []), (0.5, 5.0))


def test_complexity_curve_fields():
    rows = complexity_curve(path_graph(4), [0.5, 1.0, 2.0])
    assert [r.temperature for r in rows] == pytest.approx([0.5, 1.0, 2.0])
    assert all(r.complexity == pytest.approx(r.entropy_normalized * r.disequilibrium) for r in rows)
