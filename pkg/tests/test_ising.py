import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import energy as oracle_energy
from tipinfo.graph import Graph, krackhardt_kite, path_graph
from tipinfo.ising import (
    ExactnessCapError,
    ModelParams,
    boltzmann_distribution,
    energies,
    glauber_accept,
    hamiltonian,
    macrostate_marginal,
    popcount,
    propagate,
    total_variation,
    transfer_operator,
    write_distribution_csv,
)


def test_hamiltonian_examples():
    edge = Graph(2, [(0, 1)])
    assert hamiltonian(0b11, edge, ModelParams(1.0)) == -1.0
    kite = krackhardt_kite()
    assert hamiltonian(0, kite, ModelParams(1.0)) == -18.0
    assert hamiltonian(2**10 - 1, kite, ModelParams(1.0)) == -18.0


def test_hamiltonian_field():
    g = Graph(2, [(0, 1)])
    p = ModelParams(1.0, h=(0.5, -0.25))
    # spins (+1, -1): -J*(-1) - (0.5*1 + -0.25*-1)
    assert hamiltonian(0b01, g, p) == pytest.approx(1.0 - 0.75)
    assert energies(g, p)[0b01] == pytest.approx(0.25)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**10 - 1))
def test_global_flip_symmetry(cfg):
    kite = krackhardt_kite()
    p = ModelParams(0.7)
    assert hamiltonian(cfg, kite, p) == hamiltonian(cfg ^ (2**10 - 1), kite, p)


def test_vectorised_energies_match_oracle():
    kite = krackhardt_kite()
    e = energies(kite, ModelParams(1.0))
    edges = kite.sorted_edges()
    for s in range(0, 1024, 37):
        assert e[s] == oracle_energy(s, 10, edges)


def test_glauber_accept_values():
    assert glauber_accept(0.0, 3.0) == 0.5
    assert glauber_accept(7.0, 0.0) == 0.5
    assert glauber_accept(2.0, 1.0) == pytest.approx(1.0 / (1.0 + np.e**2), abs=1e-15)
    assert glauber_accept(2.0, 1.0) == pytest.approx(0.11920, abs=1e-5)
    with pytest.raises(ValueError):
        glauber_accept(1.0, -1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(0, 5))
def test_glauber_detailed_balance_ratio(d, beta):
    lhs = glauber_accept(d, beta) / glauber_accept(-d, beta)
    assert lhs == pytest.approx(np.exp(-beta * d), rel=1e-9)


def test_glauber_monotone():
    d = np.linspace(-10, 10, 101)
    p = glauber_accept(d, 0.8)
    assert np.all(np.diff(p) < 0)


def test_single_node_operator():
    op = transfer_operator(Graph(1, []), ModelParams(2.3))
    np.testing.assert_allclose(op.dense(), np.full((2, 2), 0.5))


def test_rows_stochastic_and_single_flip():
    g = krackhardt_kite()
    op = transfer_operator(g, ModelParams(0.534))
    m = op.matrix
    np.testing.assert_allclose(np.asarray(m.sum(axis=1)).ravel(), 1.0, atol=1e-12)
    assert m.data.min() >= 0
    for s in (0, 5, 513, 1023):
        row = op.row(s)
        assert len(row) <= g.n + 1
        for tgt, _ in row:
            assert tgt == s or bin(tgt ^ s).count("1") == 1


def test_two_node_stationary_is_boltzmann():
    g = Graph(2, [(0, 1)])
    p = ModelParams(1.0)
    dense = transfer_operator(g, p).dense()
    vals, vecs = np.linalg.eig(dense.T)
    v = np.real(vecs[:, np.argmin(abs(vals - 1))])
    v /= v.sum()
    w = np.exp(-1.0 * np.array([-1.0, 1.0, 1.0, -1.0]))
    np.testing.assert_allclose(v, w / w.sum(), atol=1e-12)


def test_boltzmann_limits():
    g = krackhardt_kite()
    np.testing.assert_allclose(boltzmann_distribution(g, ModelParams(0.0)), 1 / 1024)
    d = boltzmann_distribution(g, ModelParams(0.9))
    np.testing.assert_allclose(d, d[::-1], atol=1e-15)  # s ^ all-ones reverses the index
    assert d.sum() == pytest.approx(1.0, abs=1e-12)


def test_kite_bimodal_marginal():
    g = krackhardt_kite()
    marg = macrostate_marginal(boltzmann_distribution(g, ModelParams(0.534)), 10)
    np.testing.assert_allclose(marg, marg[::-1], atol=1e-14)
    assert marg.argmax() in (0, 10)
    assert marg[5] < marg[0]


def test_detailed_balance_and_stationarity():
    for g in (krackhardt_kite(), path_graph(6)):
        p = ModelParams(0.534)
        pi = boltzmann_distribution(g, p)
        op = transfer_operator(g, p)
        m = op.matrix.tocoo()
        flux = pi[m.row] * m.data
        rev = pi[m.col] * np.asarray(op.matrix[m.col, m.row]).ravel()
        assert np.max(np.abs(flux - rev)) < 1e-12
        assert np.max(np.abs(propagate(op, pi, 25) - pi)) < 1e-10


def test_propagate_basic():
    g = krackhardt_kite()
    op = transfer_operator(g, ModelParams(0.534))
    d = np.zeros(1024)
    d[0] = 1
    np.testing.assert_array_equal(propagate(op, d, 0), d)
    one = propagate(op, d, 1)
    support = set(np.flatnonzero(one))
    assert support <= {0} | {1 << i for i in range(10)}
    assert one.sum() == pytest.approx(1.0, abs=1e-12)


def test_tv_to_stationary_non_increasing():
    g = path_graph(5)
    p = ModelParams(0.8)
    op = transfer_operator(g, p)
    pi = boltzmann_distribution(g, p)
    d = np.zeros(32)
    d[0] = 1
    tvs = []
    for _ in range(60):
        tvs.append(total_variation(d, pi))
        d = propagate(op, d, 1)
    assert np.all(np.diff(tvs) <= 1e-14)


def test_exactness_cap():
    with pytest.raises(ExactnessCapError):
        transfer_operator(path_graph(21), ModelParams(1.0))


def test_popcount():
    np.testing.assert_array_equal(popcount([0, 1, 3, 1023]), [0, 1, 2, 10])


def test_distribution_csv(tmp_path):
    g = Graph(2, [(0, 1)])
    d = boltzmann_distribution(g, ModelParams(1.0))
    f = tmp_path / "d.csv"
    write_distribution_csv(f, d, 2)
    lines = f.read_text().splitlines()
    assert lines[0] == "state,probability"
    assert lines[1].startswith("00,") and lines[4].startswith("11,")
    assert sum(float(x.split(",")[1]) for x in lines[1:]) == pytest.approx(1.0)
