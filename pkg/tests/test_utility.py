import itertools

import numpy as np
import pytest

from conftest import random_graph
from linkmirage import (Clustering, Graph, PerturbParams, TemporalGraphSequence,
                        expected_degree_report, linkmirage_sequence, pagerank,
                        ratio_cut, spectral_metrics, structural_metrics,
                        transition_matrix, tv_distance, ud_upper_bound,
                        utility_distance)
from linkmirage.utility import is_bipartite, is_connected, mixing_time, slem


def complete_graph(n):
    return Graph([(i, j) for i in range(n) for j in range(i + 1, n)])


# -- utility distance -------------------------------------------------------------


def test_ud_zero_for_identical_sequences(rng):
    g = random_graph(10, 0.4, rng, ensure_edge=True)
    seq = TemporalGraphSequence([g, g])
    for l in (1, 2, 5):
        report = utility_distance(seq, [g, g], l)
        assert report.aggregate == 0.0
        assert report.per_timestamp == [0.0, 0.0]


def test_ud_l1_matches_hand_composed_oracle(rng):
    g = random_graph(6, 0.5, rng, ensure_edge=True)
    gp = random_graph(6, 0.5, rng, ensure_edge=True)
    seq = TemporalGraphSequence([g])
    report = utility_distance(seq, [gp], 1)
    expected = tv_distance(transition_matrix(g), transition_matrix(gp))
    assert report.per_timestamp[0] == pytest.approx(expected, abs=1e-12)
    assert report.aggregate == pytest.approx(expected, abs=1e-12)


def test_ud_misaligned_sequences_error(rng):
    g = random_graph(5, 0.5, rng, ensure_edge=True)
    seq = TemporalGraphSequence([g, g])
    with pytest.raises(ValueError):
        utility_distance(seq, [g], 1)


def test_ud_power_contraction_corollary(rng):
    g = random_graph(12, 0.3, rng, ensure_edge=True)
    gp = random_graph(12, 0.3, rng, ensure_edge=True)
    seq = TemporalGraphSequence([g])
    base = utility_distance(seq, [gp], 1).aggregate
    for l in (2, 3, 5):
        assert utility_distance(seq, [gp], l).aggregate <= l * base + 1e-9


def ring_community_graph(n_blocks=3, block_size=60, width=2, seed=7):
    # planted partition whose blocks are ring lattices: dense short-range
    # structure inside communities, so k-hop walks travel farther as k grows
    rng = np.random.default_rng(seed)
    edges = []
    for b in range(n_blocks):
        base = b * block_size
        for i in range(block_size):
            for d in range(1, width + 1):
                edges.append((base + i, base + (i + d) % block_size))
    for b in range(n_blocks):
        for _ in range(3):
            u = b * block_size + int(rng.integers(0, block_size))
            v = ((b + 1) % n_blocks) * block_size + int(rng.integers(0, block_size))
            edges.append((min(u, v), max(u, v)))
    return Graph(edges)


def test_ud_trends_with_k_and_l():
    # mean over seeds: UD grows with k (walks stray farther) and shrinks
    # with l once k >= 2 (longer application walks forgive local noise)
    g = ring_community_graph()
    seq = TemporalGraphSequence([g])
    agg = {}
    for k in (1, 2, 4, 8):
        runs = {1: [], 3: []}
        for seed in range(6):
            gp = linkmirage_sequence(seq, PerturbParams(k=k, seed=seed))
            for l in (1, 3):
                runs[l].append(utility_distance(seq, gp, l).aggregate)
        agg[k] = {l: float(np.mean(v)) for l, v in runs.items()}
    assert agg[1][1] <= agg[2][1] <= agg[4][1] <= agg[8][1]
    for k in (2, 8):
        assert agg[k][3] <= agg[k][1]


# -- ratio cut and the structural bound ---------------------------------------------


def test_ratio_cut_single_community(triangle):
    c = Clustering.from_groups([[0, 1, 2]])
    assert ratio_cut(triangle, c) == 0.0


def test_ratio_cut_two_triangles_bridge():
    g = Graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    c = Clustering.from_groups([[0, 1, 2], [3, 4, 5]])
    assert ratio_cut(g, c) == pytest.approx(1.0 / 6.0)


def test_ratio_cut_matches_per_edge_oracle(rng):
    g = random_graph(12, 0.35, rng, ensure_edge=True)
    labels = rng.integers(0, 3, size=12)
    groups = [[v for v in range(12) if labels[v] == c] for c in range(3)]
    c = Clustering.from_groups([grp for grp in groups if grp])
    inter = sum(1 for u, v in g.edges if labels[int(u)] != labels[int(v)])
    assert ratio_cut(g, c) == pytest.approx(inter / 12)


def test_ud_upper_bound_values():
    assert ud_upper_bound(0.0, [0.0, 0.0], 3) == 0.0
    assert ud_upper_bound(0.1, [0.2], 2) == pytest.approx(1.2)


# -- degree expectation --------------------------------------------------------------


def test_degree_report_single_edge_exact():
    g = Graph([(0, 1)])
    report = expected_degree_report(g, PerturbParams(k=1, seed=3), 1000,
                                    np.random.default_rng(5))
    assert np.array_equal(report.mean, [1.0, 1.0])
    assert np.array_equal(report.z_score, [0.0, 0.0])


def test_degree_report_k3_within_3_sigma():
    g = Graph([(0, 1), (1, 2), (0, 2)])
    report = expected_degree_report(g, PerturbParams(k=1, seed=3), 5000,
                                    np.random.default_rng(6))
    assert np.abs(report.z_score).max() <= 3.0


def test_degree_report_requires_trials():
    with pytest.raises(ValueError):
        expected_degree_report(Graph([(0, 1)]), PerturbParams(k=1), 10,
                               np.random.default_rng(0))


# -- pagerank -------------------------------------------------------------------------


def test_pagerank_regular_graph_uniform():
    g = complete_graph(6)
    scores = pagerank(g)
    assert np.allclose(scores, 1.0 / 6.0, atol=1e-9)


def test_pagerank_two_vertices():
    scores = pagerank(Graph([(0, 1)]))
    assert np.allclose(scores, [0.5, 0.5], atol=1e-9)


def test_pagerank_sums_to_one_nonnegative(rng):
    for _ in range(10):
        g = random_graph(int(rng.integers(2, 25)), 0.3, rng)
        scores = pagerank(g)
        assert abs(scores.sum() - 1.0) <= 1e-9
        assert (scores >= 0).all()


# -- structural metrics ----------------------------------------------------------------


def brute_structural(g: Graph):
    verts = [int(v) for v in g.vertices]
    triangles = 0
    for a, b, c in itertools.combinations(verts, 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            triangles += 1
    triples = sum(g.degree(v) * (g.degree(v) - 1) // 2 for v in verts)
    cc = 3 * triangles / triples if triples else 0.0
    xs, ys = [], []
    for u, v in g.edges:
        xs += [g.degree(u), g.degree(v)]
        ys += [g.degree(v), g.degree(u)]
    xs, ys = np.array(xs, float), np.array(ys, float)
    if len(xs) < 2 or xs.std() == 0 or ys.std() == 0:
        assort = 0.0
    else:
        assort = float(np.corrcoef(xs, ys)[0, 1])
    return cc, assort


def test_k3_clustering_coefficient_one(triangle):
    assert structural_metrics(triangle)["clustering_coefficient"] == pytest.approx(1.0)


def test_star_clustering_coefficient_zero():
    g = Graph([(0, 1), (0, 2), (0, 3), (0, 4)])
    assert structural_metrics(g)["clustering_coefficient"] == 0.0


def test_structural_matches_bruteforce(rng):
    for _ in range(8):
        g = random_graph(20, 0.25, rng, ensure_edge=True)
        got = structural_metrics(g)
        cc, assort = brute_structural(g)
        assert got["clustering_coefficient"] == pytest.approx(cc, abs=1e-12)
        if not got["assortativity_degenerate"]:
            assert got["assortativity"] == pytest.approx(assort, abs=1e-12)


def test_regular_graph_assortativity_degenerate():
    got = structural_metrics(complete_graph(5))
    assert got["assortativity"] == 0.0
    assert got["assortativity_degenerate"]


# -- spectral metrics --------------------------------------------------------------------


def dense_slem(g: Graph, lazy=False):
    p = transition_matrix(g).matrix.toarray()
    if lazy:
        p = 0.5 * (p + np.eye(p.shape[0]))
    eigs = np.sort(np.real(np.linalg.eigvals(p)))[::-1]
    return max(abs(eigs[1]), abs(eigs[-1])) if eigs.size > 1 else 0.0


def test_slem_complete_graphs_analytic():
    for n in (3, 4, 6, 9):
        assert slem(complete_graph(n)) == pytest.approx(1.0 / (n - 1), abs=1e-9)


def test_slem_matches_dense_eigensolve(rng):
    count = 0
    while count < 10:
        g = random_graph(int(rng.integers(4, 15)), 0.45, rng, ensure_edge=True)
        if not is_connected(g):
            continue
        count += 1
        assert slem(g) == pytest.approx(dense_slem(g), abs=1e-8)


def test_mixing_time_k3_matches_row_power_scan(triangle):
    eps = 0.01
    tau, converged = mixing_time(triangle, eps)
    assert converged
    p = transition_matrix(triangle).matrix.toarray()
    pi = np.array([2, 2, 2]) / 6
    m = p.copy()
    r = 1
    while 0.5 * np.abs(m - pi).sum(axis=1).max() >= eps:
        m = m @ p
        r += 1
    assert tau == r


def test_bipartite_reports_not_converged():
    g = Graph([(0, 1), (1, 2), (2, 3), (0, 3)])   # 4-cycle
    assert is_bipartite(g)
    metrics = spectral_metrics(g, epsilon=0.05)
    assert not metrics["mixing_converged"]
    assert metrics["mixing_time"] is None


def test_lazy_chain_mixes_bipartite():
    g = Graph([(0, 1), (1, 2), (2, 3), (0, 3)])
    metrics = spectral_metrics(g, epsilon=0.05, lazy=True)
    assert metrics["mixing_converged"]
    assert metrics["slem"] < 1.0


def test_slem_bounds(rng):
    count = 0
    while count < 10:
        g = random_graph(int(rng.integers(3, 12)), 0.5, rng, ensure_edge=True)
        if not is_connected(g):
            continue
        count += 1
        mu = slem(g)
        assert 0.0 <= mu <= 1.0 + 1e-12
        if not is_bipartite(g):
            assert mu < 1.0


def test_spectral_requires_connected():
    g = Graph([(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        spectral_metrics(g)
