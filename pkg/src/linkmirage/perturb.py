"""Link obfuscation: static random-walk perturbation, inter-community
rewiring, and the selective dynamic pipeline over temporal sequences.

The static scheme replaces every original edge with one fake edge: a k-hop
random walk starts at a uniformly chosen endpoint of the edge and the walk's
terminal becomes the fake neighbor. Starting each walk at a uniformly chosen
endpoint makes the start distribution stationary, which is what preserves
every vertex's expected degree exactly, for any k.

The dynamic pipeline re-clusters each snapshot against the previous one,
reuses the previous perturbation verbatim for unchanged communities and for
inter-community pairs whose both sides are unchanged, and re-perturbs only
what changed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clustering import (Clustering, CommunityDiff, MergeHistory, changed_link_set,
                         classify_communities, cluster_static, recluster_dynamic)
from .graphs import Graph, TemporalGraphSequence
from .markov import walk_terminals

INTER_FORMS = ("appendixC", "algorithm1")

# spawn_key namespaces so mechanisms never share streams for the same (seed, t)
_NS_DYNAMIC = 0
_NS_STATIC = 1
_NS_HAY = 2


@dataclass(frozen=True)
class PerturbParams:
    """Knobs of the obfuscation pipeline.

    k is the random-walk length (larger k = more noise), m the freeing
    radius for dynamic re-clustering, theta the unchanged-community overlap
    threshold, and seed the root of every derived random stream.
    """

    k: int = 2
    m: int = 2
    theta: float = 0.8
    seed: int = 0
    inter_cluster_form: str = "appendixC"
    k_per_community: dict | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("walk length k must be >= 1")
        if self.m < 0:
            raise ValueError("freeing radius m must be >= 0")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must lie in (0, 1]")
        if self.inter_cluster_form not in INTER_FORMS:
            raise ValueError(f"inter_cluster_form must be one of {INTER_FORMS}")

    def k_for(self, label: int) -> int:
        if self.k_per_community and label in self.k_per_community:
            return int(self.k_per_community[label])
        return self.k


@dataclass
class PerturbationRecord:
    """Per-community and per-pair perturbed edges of one timestamp.

    Unchanged communities at t+1 copy their entry verbatim, which is what
    makes selective perturbation possible.
    """

    timestamp: int
    clustering: Clustering
    history: MergeHistory
    intra: dict = field(default_factory=dict)   # label -> ndarray (m, 2)
    inter: dict = field(default_factory=dict)   # (a, b) -> ndarray (m, 2)

    def validate(self) -> None:
        for label, edges in self.intra.items():
            members = self.clustering.communities[label]
            for u, v in np.asarray(edges).reshape(-1, 2):
                if int(u) not in members or int(v) not in members:
                    raise ValueError(f"intra edge ({u},{v}) leaves community {label}")
        for (a, b), edges in self.inter.items():
            ca = self.clustering.communities[a]
            cb = self.clustering.communities[b]
            for u, v in np.asarray(edges).reshape(-1, 2):
                u, v = int(u), int(v)
                if not ((u in ca and v in cb) or (u in cb and v in ca)):
                    raise ValueError(f"inter edge ({u},{v}) does not cross ({a},{b})")

    def to_json_obj(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "communities": {str(lab): sorted(mem)
                            for lab, mem in self.clustering.communities.items()},
            "history": self.history.to_json_obj(),
            "intra": {str(lab): np.asarray(e).reshape(-1, 2).tolist()
                      for lab, e in self.intra.items()},
            "inter": {f"{a},{b}": np.asarray(e).reshape(-1, 2).tolist()
                      for (a, b), e in self.inter.items()},
        }

    @staticmethod
    def from_json_obj(obj) -> "PerturbationRecord":
        clustering = Clustering.from_groups(obj["communities"].values())
        record = PerturbationRecord(
            timestamp=int(obj["timestamp"]),
            clustering=clustering,
            history=MergeHistory.from_json_obj(obj["history"]),
        )
        record.intra = {int(lab): np.asarray(e, dtype=np.int64).reshape(-1, 2)
                        for lab, e in obj["intra"].items()}
        record.inter = {tuple(int(x) for x in key.split(",")):
                        np.asarray(e, dtype=np.int64).reshape(-1, 2)
                        for key, e in obj["inter"].items()}
        return record


# -- static perturbation ----------------------------------------------------


def draw_walker_edges(graph: Graph, k: int,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One raw fake edge per original edge, as (starts, terminals) positions.

    Each edge starts a k-hop walk at a uniformly chosen endpoint. Terminals
    may equal their start (self-loop); callers decide how to handle that.
    """
    edges = graph.edges
    ids = graph.vertices
    if edges.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    iu = np.searchsorted(ids, edges[:, 0])
    iv = np.searchsorted(ids, edges[:, 1])
    pick = rng.random(edges.shape[0]) < 0.5
    starts = np.where(pick, iu, iv)
    terms = walk_terminals(graph, starts, k, rng)
    return starts, terms


def perturb_static(graph: Graph, k: int, rng: np.random.Generator) -> Graph:
    """Static random-walk perturbation of a whole graph (or community subgraph).

    Deletes all original edges; each original edge is replaced by the fake
    edge (start, terminal) of its k-hop walk. Walks that return to their
    start are redrawn up to 10 times and dropped if still self-looping;
    duplicate fake edges collapse. The vertex set is preserved.
    """
    if k < 1:
        raise ValueError("walk length k must be >= 1")
    starts, terms = draw_walker_edges(graph, k, rng)
    for _ in range(10):
        loop = starts == terms
        if not loop.any():
            break
        terms = terms.copy()
        terms[loop] = walk_terminals(graph, starts[loop], k, rng)
    keep = starts != terms
    ids = graph.vertices
    fake = np.column_stack([ids[starts[keep]], ids[terms[keep]]])
    return Graph(fake, vertices=ids)


# -- inter-community rewiring ------------------------------------------------


@dataclass(frozen=True)
class _PairTask:
    a: int
    b: int
    nodes_a: np.ndarray     # marginal raw ids in a
    nodes_b: np.ndarray
    deg_a: np.ndarray       # inter-degrees, aligned with nodes_a
    deg_b: np.ndarray
    n_edges: int            # |E_ab|

    def probabilities(self, form: str) -> np.ndarray:
        grid = np.outer(self.deg_a, self.deg_b) / float(self.n_edges)
        if form == "algorithm1":
            grid = grid * (self.nodes_a.size
                           / float(self.nodes_a.size + self.nodes_b.size))
        return np.minimum(grid, 1.0)

    def sample(self, rng: np.random.Generator, form: str) -> np.ndarray:
        mask = rng.random((self.nodes_a.size, self.nodes_b.size)) < self.probabilities(form)
        ai, bj = np.nonzero(mask)
        return np.column_stack([self.nodes_a[ai], self.nodes_b[bj]])


def _pair_tasks(graph: Graph, clustering: Clustering) -> list:
    """Marginal-node structure of every community pair with >= 1 inter edge."""
    groups = {}
    for u, v in graph.edges:
        cu = clustering.assignment[int(u)]
        cv = clustering.assignment[int(v)]
        if cu == cv:
            continue
        if cu < cv:
            groups.setdefault((cu, cv), []).append((int(u), int(v)))
        else:
            groups.setdefault((cv, cu), []).append((int(v), int(u)))
    tasks = []
    for (a, b) in sorted(groups):
        pairs = np.asarray(groups[(a, b)], dtype=np.int64)
        nodes_a, deg_a = np.unique(pairs[:, 0], return_counts=True)
        nodes_b, deg_b = np.unique(pairs[:, 1], return_counts=True)
        tasks.append(_PairTask(a=a, b=b, nodes_a=nodes_a, nodes_b=nodes_b,
                               deg_a=deg_a, deg_b=deg_b, n_edges=pairs.shape[0]))
    return tasks


def perturb_intercluster(graph: Graph, clustering: Clustering,
                         rng: np.random.Generator,
                         form: str = "appendixC") -> dict:
    """Rewire inter-community links; returns {(a, b): edge array}.

    For each community pair connected in the original graph, every pair of
    marginal nodes (i in a, j in b) gets an edge independently with
    probability min(1, p_ij). The default form p_ij = deg_a(i)*deg_b(j)/|E_ab|
    preserves every marginal node's expected inter-degree; the asymmetric
    "algorithm1" form multiplies by |v_a|/(|v_a|+|v_b|) with a the smaller
    community label. Degrees and |E_ab| count only edges between a and b.
    """
    if form not in INTER_FORMS:
        raise ValueError(f"unknown inter-cluster form {form!r}")
    tasks = _pair_tasks(graph, clustering)
    streams = rng.spawn(len(tasks))
    return {(t.a, t.b): t.sample(s, form) for t, s in zip(tasks, streams)}


# -- selective dynamic pipeline ----------------------------------------------


@dataclass(frozen=True)
class _StepPlan:
    """Deterministic structure of one timestamp's perturbation.

    Splitting plan construction from sampling lets hypothesis re-perturbation
    and degree experiments redraw the random part thousands of times without
    re-clustering.
    """

    graph: Graph
    clustering: Clustering
    history: MergeHistory
    diff: CommunityDiff
    subgraphs: dict          # label -> community subgraph (changed labels only)
    pair_tasks: list
    reused_intra: dict       # label -> edges copied from t-1
    reused_inter: dict       # (a, b) -> edges copied from t-1

    @property
    def changed_labels(self) -> list:
        return sorted(self.subgraphs)

    def spawn_streams(self, rng: np.random.Generator) -> tuple[dict, list]:
        """Per-community and per-pair child generators in canonical order."""
        labels = self.changed_labels
        children = rng.spawn(len(labels) + len(self.pair_tasks))
        return dict(zip(labels, children)), children[len(labels):]

    def sample_edges(self, params: PerturbParams, rng: np.random.Generator,
                     threads: int = 1) -> tuple[dict, dict]:
        """Draw one perturbation: returns (intra edges by label, inter by pair)."""
        comm_streams, pair_streams = self.spawn_streams(rng)
        intra = dict(self.reused_intra)

        def one(label):
            sub = self.subgraphs[label]
            fake = perturb_static(sub, params.k_for(label), comm_streams[label])
            return label, fake.edges

        if threads > 1 and len(self.subgraphs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for label, edges in pool.map(one, self.changed_labels):
                    intra[label] = edges
        else:
            for label in self.changed_labels:
                intra[label] = one(label)[1]

        inter = dict(self.reused_inter)
        reused_pairs = set(self.reused_inter)
        for task, stream in zip(self.pair_tasks, pair_streams):
            if (task.a, task.b) in reused_pairs:
                continue
            inter[(task.a, task.b)] = task.sample(stream, params.inter_cluster_form)
        return intra, inter

    def sample_degrees(self, params: PerturbParams,
                       rng: np.random.Generator) -> np.ndarray:
        """Walker-incidence degrees of one raw draw, aligned with graph.vertices.

        Counts the fake-edge multiset before self-loop handling and
        deduplication (a self-terminal walk counts 2 at its vertex), plus the
        Bernoulli inter edges; the expected value is exactly the original
        degree for every vertex.
        """
        comm_streams, pair_streams = self.spawn_streams(rng)
        ids = self.graph.vertices
        deg = np.zeros(ids.size, dtype=np.int64)
        for label in self.changed_labels:
            sub = self.subgraphs[label]
            starts, terms = draw_walker_edges(sub, params.k_for(label),
                                              comm_streams[label])
            local = np.bincount(starts, minlength=sub.num_vertices) \
                + np.bincount(terms, minlength=sub.num_vertices)
            deg[np.searchsorted(ids, sub.vertices)] += local
        for label, edges in self.reused_intra.items():
            if len(edges):
                pos = np.searchsorted(ids, np.asarray(edges).ravel())
                deg += np.bincount(pos, minlength=ids.size)
        reused_pairs = set(self.reused_inter)
        for task, stream in zip(self.pair_tasks, pair_streams):
            if (task.a, task.b) in reused_pairs:
                continue
            mask = stream.random((task.nodes_a.size, task.nodes_b.size)) \
                < task.probabilities(params.inter_cluster_form)
            deg[np.searchsorted(ids, task.nodes_a)] += mask.sum(axis=1)
            deg[np.searchsorted(ids, task.nodes_b)] += mask.sum(axis=0)
        for pair, edges in self.reused_inter.items():
            if len(edges):
                pos = np.searchsorted(ids, np.asarray(edges).ravel())
                deg += np.bincount(pos, minlength=ids.size)
        return deg


def _filter_to_vertices(edges, graph: Graph) -> np.ndarray:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        return edges
    ok = np.isin(edges[:, 0], graph.vertices) & np.isin(edges[:, 1], graph.vertices)
    return edges[ok]


def build_step_plan(g_t: Graph, prev, params: PerturbParams) -> "_StepPlan":
    """Cluster, classify, and lay out reuse for one timestamp (no randomness)."""
    if prev is None:
        clustering, history = cluster_static(g_t)
        diff = classify_communities(None, clustering, params.theta)
        prev_record = None
    else:
        prev_graph, prev_record = prev
        changed = changed_link_set(prev_graph, g_t)
        clustering, history = recluster_dynamic(
            g_t, (prev_record.clustering, prev_record.history), changed, params.m)
        diff = classify_communities(prev_record.clustering, clustering, params.theta)

    subgraphs = {label: g_t.subgraph(clustering.communities[label])
                 for label in diff.changed}
    reused_intra = {}
    for prev_label, cur_label in diff.unchanged:
        reused_intra[cur_label] = _filter_to_vertices(
            prev_record.intra.get(prev_label, np.empty((0, 2), np.int64)), g_t)

    pair_tasks = _pair_tasks(g_t, clustering)
    reused_inter = {}
    if prev_record is not None:
        cur_to_prev = {cur: prv for prv, cur in diff.unchanged}
        for task in pair_tasks:
            pa, pb = cur_to_prev.get(task.a), cur_to_prev.get(task.b)
            if pa is None or pb is None:
                continue
            key = (pa, pb) if pa < pb else (pb, pa)
            if key in prev_record.inter:
                reused_inter[(task.a, task.b)] = _filter_to_vertices(
                    prev_record.inter[key], g_t)
    return _StepPlan(graph=g_t, clustering=clustering, history=history, diff=diff,
                     subgraphs=subgraphs, pair_tasks=pair_tasks,
                     reused_intra=reused_intra, reused_inter=reused_inter)


def _step_rng(params: PerturbParams, t: int, namespace: int = _NS_DYNAMIC):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=params.seed, spawn_key=(namespace, t)))


def linkmirage_step(g_t: Graph, prev, params: PerturbParams,
                    rng: np.random.Generator | None = None,
                    threads: int = 1) -> tuple[Graph, PerturbationRecord, Clustering]:
    """One timestamp of the selective perturbation pipeline.

    ``prev`` is None at t=0, otherwise (previous graph, previous record).
    At t=0 every community is perturbed; at t>0 unchanged communities and
    unchanged inter pairs reuse the recorded edges verbatim and only the
    rest is re-sampled. Deterministic given (inputs, params, rng seed) and
    independent of thread count.
    """
    t = 0 if prev is None else prev[1].timestamp + 1
    if rng is None:
        rng = _step_rng(params, t)
    plan = build_step_plan(g_t, prev, params)
    intra, inter = plan.sample_edges(params, rng, threads=threads)
    record = PerturbationRecord(timestamp=t, clustering=plan.clustering,
                                history=plan.history, intra=intra, inter=inter)
    pieces = [np.asarray(e).reshape(-1, 2) for e in intra.values()] \
        + [np.asarray(e).reshape(-1, 2) for e in inter.values()]
    edges = np.concatenate(pieces) if pieces else np.empty((0, 2), np.int64)
    g_prime = Graph(edges, vertices=g_t.vertices)
    return g_prime, record, plan.clustering


def linkmirage_run(seq: TemporalGraphSequence, params: PerturbParams,
                   threads: int = 1) -> tuple[list, list]:
    """Fold the step over a sequence; returns (perturbed graphs, records)."""
    graphs, records = [], []
    prev = None
    for t, g_t in enumerate(seq.snapshots):
        g_prime, record, _ = linkmirage_step(
            g_t, prev, params, rng=_step_rng(params, t), threads=threads)
        graphs.append(g_prime)
        records.append(record)
        prev = (g_t, record)
    return graphs, records


def linkmirage_sequence(seq: TemporalGraphSequence, params: PerturbParams,
                        threads: int = 1) -> list:
    """Perturbed graph for every snapshot of the sequence."""
    return linkmirage_run(seq, params, threads=threads)[0]


def perturb_static_baseline_sequence(seq: TemporalGraphSequence, k: int,
                                     seed: int) -> list:
    """Whole-snapshot static perturbation, independently at each timestamp."""
    out = []
    for t, g_t in enumerate(seq.snapshots):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(_NS_STATIC, t)))
        out.append(perturb_static(g_t, k, rng))
    return out


# -- r-delete / r-insert comparator -------------------------------------------


def hay_baseline(graph: Graph, r: int | None, rng: np.random.Generator) -> Graph:
    """Delete r uniformly chosen real edges and insert r uniform fake ones.

    r defaults to round(0.5 * |E|). The output has exactly |E| edges.
    """
    m = graph.num_edges
    if r is None:
        r = int(round(0.5 * m))
    if not 0 <= r <= m:
        raise ValueError("r must lie in [0, |E|]")
    keep_mask = np.ones(m, dtype=bool)
    if r:
        keep_mask[rng.choice(m, size=r, replace=False)] = False
    kept = graph.edges[keep_mask]
    existing = graph.edge_set()
    ids = graph.vertices
    inserted = []
    seen = set()
    while len(inserted) < r:
        u = int(ids[rng.integers(0, ids.size)])
        v = int(ids[rng.integers(0, ids.size)])
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in existing or key in seen:
            continue
        seen.add(key)
        inserted.append(key)
    edges = np.vstack([kept, np.asarray(inserted, dtype=np.int64).reshape(-1, 2)]) \
        if (len(kept) or inserted) else np.empty((0, 2), np.int64)
    return Graph(edges, vertices=ids)


def hay_baseline_sequence(seq: TemporalGraphSequence, seed: int,
                          r_fraction: float = 0.5) -> list:
    out = []
    for t, g_t in enumerate(seq.snapshots):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(_NS_HAY, t)))
        out.append(hay_baseline(g_t, int(round(r_fraction * g_t.num_edges)), rng))
    return out
