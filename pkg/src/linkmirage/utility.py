"""Utility metrics: walk-distribution distance, its structural bound, degree
expectation, and the graph analytics used to audit perturbed topologies."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graphs import Graph, TemporalGraphSequence
from .markov import matrix_power, transition_matrix, tv_distance
from .perturb import PerturbParams, build_step_plan


@dataclass(frozen=True)
class UtilityReport:
    """Per-timestamp utility distance and, when supplied, its upper bound."""

    l: int
    per_timestamp: list
    aggregate: float
    ratio_cuts: list | None = None
    epsilon: float | None = None
    bound: float | None = None


def utility_distance(seq: TemporalGraphSequence, perturbed, l: int) -> UtilityReport:
    """Average row-TV between l-step walk distributions, per timestamp.

    The aggregate is the mean over timestamps. Original and perturbed
    snapshots must share vertex sets at every t.
    """
    if l < 1:
        raise ValueError("application parameter l must be >= 1")
    perturbed = list(perturbed)
    if len(perturbed) != len(seq):
        raise ValueError("original and perturbed sequences are misaligned")
    per_t = []
    for g, gp in zip(seq.snapshots, perturbed):
        if not np.array_equal(g.vertices, gp.vertices):
            raise ValueError("original and perturbed snapshots differ in vertices")
        p_l = matrix_power(transition_matrix(g), l)
        q_l = matrix_power(transition_matrix(gp), l)
        per_t.append(tv_distance(p_l, q_l))
    return UtilityReport(l=l, per_timestamp=per_t,
                         aggregate=float(np.mean(per_t)))


def ratio_cut(graph: Graph, clustering) -> float:
    """Inter-community edge count divided by vertex count."""
    if graph.num_vertices == 0:
        return 0.0
    inter = sum(1 for u, v in graph.edges
                if clustering.assignment[int(u)] != clustering.assignment[int(v)])
    return inter / graph.num_vertices


def ud_upper_bound(epsilon: float, deltas, l: int) -> float:
    """Mean over timestamps of 2l(epsilon + delta_t)."""
    if epsilon < 0 or any(d < 0 for d in deltas):
        raise ValueError("epsilon and ratio cuts must be nonnegative")
    deltas = list(deltas)
    if not deltas:
        raise ValueError("need at least one ratio cut")
    return float(np.mean([2.0 * l * (epsilon + d) for d in deltas]))


@dataclass(frozen=True)
class DegreeReport:
    vertices: np.ndarray
    original: np.ndarray
    mean: np.ndarray
    z_score: np.ndarray
    trials: int


def expected_degree_report(graph: Graph, params: PerturbParams, trials: int,
                           rng: np.random.Generator) -> DegreeReport:
    """Monte Carlo check that perturbation preserves expected degrees.

    Runs the full pipeline (cluster once, then re-draw intra walks and inter
    rewiring per trial) and accumulates walker-incidence degrees, whose
    expectation equals the original degree exactly. z is the standardized
    deviation of the Monte Carlo mean from the original degree.
    """
    if trials < 1000:
        raise ValueError("degree expectation needs >= 1000 trials")
    plan = build_step_plan(graph, None, params)
    n = graph.num_vertices
    acc = np.zeros(n, dtype=np.float64)
    acc2 = np.zeros(n, dtype=np.float64)
    for _ in range(trials):
        d = plan.sample_degrees(params, rng)
        acc += d
        acc2 += d.astype(np.float64) ** 2
    mean = acc / trials
    var = np.maximum(acc2 / trials - mean ** 2, 0.0)
    se = np.sqrt(var / trials)
    deg = graph.degrees.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (mean - deg) / se,
                     np.where(mean == deg, 0.0, np.inf))
    return DegreeReport(vertices=graph.vertices, original=deg, mean=mean,
                        z_score=z, trials=trials)


# -- graph analytics -----------------------------------------------------------


def pagerank(graph: Graph, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 10_000) -> np.ndarray:
    """Pagerank scores by power iteration, aligned with graph.vertices.

    Scores sum to 1; isolated vertices hold their own teleport mass via the
    lazy self-loop row of the transition matrix.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    n = graph.num_vertices
    if n == 0:
        return np.empty(0)
    p = transition_matrix(graph).matrix
    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iter):
        nxt = damping * (x @ p) + teleport
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    raise RuntimeError(f"pagerank failed to converge within {max_iter} iterations")


def structural_metrics(graph: Graph) -> dict:
    """Global clustering coefficient and degree assortativity.

    Degree-regular graphs have undefined assortativity (zero variance); it is
    reported as 0.0 with the degenerate flag set.
    """
    n = graph.num_vertices
    indptr, indices = graph.csr_adjacency
    adj = sp.csr_matrix((np.ones(indices.size), indices.copy(), indptr.copy()),
                        shape=(n, n))
    deg = graph.degrees.astype(np.float64)
    triangles = float((adj @ adj).multiply(adj).sum()) / 6.0
    triples = float((deg * (deg - 1) / 2.0).sum())
    cc = 3.0 * triangles / triples if triples > 0 else 0.0

    degenerate = False
    if graph.num_edges < 2:
        assort = 0.0
        degenerate = True
    else:
        ids = graph.vertices
        iu = np.searchsorted(ids, graph.edges[:, 0])
        iv = np.searchsorted(ids, graph.edges[:, 1])
        xs = np.concatenate([deg[iu], deg[iv]])
        ys = np.concatenate([deg[iv], deg[iu]])
        sx, sy = xs.std(), ys.std()
        if sx == 0 or sy == 0:
            assort = 0.0
            degenerate = True
        else:
            assort = float(np.corrcoef(xs, ys)[0, 1])
    return {"clustering_coefficient": cc, "assortativity": assort,
            "assortativity_degenerate": degenerate}


def is_connected(graph: Graph) -> bool:
    n = graph.num_vertices
    if n <= 1:
        return True
    indptr, indices = graph.csr_adjacency
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in indices[indptr[v]:indptr[v + 1]]:
            if not seen[w]:
                seen[w] = True
                queue.append(int(w))
    return bool(seen.all())


def is_bipartite(graph: Graph) -> bool:
    n = graph.num_vertices
    indptr, indices = graph.csr_adjacency
    color = np.full(n, -1, dtype=np.int8)
    for s in range(n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in indices[indptr[v]:indptr[v + 1]]:
                if color[w] < 0:
                    color[w] = 1 - color[v]
                    queue.append(int(w))
                elif color[w] == color[v]:
                    return False
    return True


def slem(graph: Graph, lazy: bool = False, tol: float = 1e-13,
         max_iter: int = 200_000) -> float:
    """Second largest eigenvalue modulus of the walk matrix.

    Power iteration on the degree-symmetrized operator with the stationary
    direction deflated; with ``lazy`` the chain is (P+I)/2.
    """
    if not is_connected(graph):
        raise ValueError("SLEM is defined here for connected graphs only")
    n = graph.num_vertices
    if n <= 1:
        return 0.0
    indptr, indices = graph.csr_adjacency
    deg = graph.degrees.astype(np.float64)
    inv_sqrt = 1.0 / np.sqrt(deg)
    data = np.concatenate([inv_sqrt[i] * inv_sqrt[indices[indptr[i]:indptr[i + 1]]]
                           for i in range(n)]) if indices.size else np.empty(0)
    s = sp.csr_matrix((data, indices.copy(), indptr.copy()), shape=(n, n))
    if lazy:
        s = 0.5 * (s + sp.identity(n, format="csr"))
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)
    x = np.random.default_rng(0xD1CE).standard_normal(n)
    x -= (top @ x) * top
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = s @ x
        y -= (top @ y) * top
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        if abs(norm - est) < tol:
            return float(norm)
        est = norm
        x = y / norm
    return float(est)


def mixing_time(graph: Graph, epsilon: float, lazy: bool = False,
                max_steps: int = 10_000) -> tuple[int | None, bool]:
    """Smallest r with max_v TV(P^r(v), pi) < epsilon, by direct row powers.

    Returns (r, converged). Bipartite chains never converge unless ``lazy``
    applies (P+I)/2, and are reported immediately as not converged.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    if not is_connected(graph):
        raise ValueError("mixing time is defined here for connected graphs only")
    if is_bipartite(graph) and not lazy and graph.num_vertices > 1:
        return None, False
    p = transition_matrix(graph).matrix.toarray()
    if lazy:
        p = 0.5 * (p + np.eye(graph.num_vertices))
    deg = graph.degrees.astype(np.float64)
    pi = deg / deg.sum() if deg.sum() else np.full(graph.num_vertices, 1.0)
    m = p.copy()
    for r in range(1, max_steps + 1):
        worst = 0.5 * np.abs(m - pi).sum(axis=1).max()
        if worst < epsilon:
            return r, True
        m = m @ p
    return None, False


def spectral_metrics(graph: Graph, epsilon: float = 0.05, lazy: bool = False,
                     max_steps: int = 10_000) -> dict:
    """SLEM and mixing time of a connected graph's walk."""
    tau, converged = mixing_time(graph, epsilon, lazy=lazy, max_steps=max_steps)
    return {"slem": slem(graph, lazy=lazy), "mixing_time": tau,
            "mixing_converged": converged}
