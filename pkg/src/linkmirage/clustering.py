"""Greedy maximum-modularity clustering with a replayable merge history.

The static clusterer is the agglomerative scheme: start from singletons and
repeatedly merge the connected pair of communities with the largest positive
modularity gain. Its merge history supports the dynamic backtracking step:
on graph evolution, vertices near changed links are freed from the previous
hierarchy, the untouched remainder of each community is frozen into one
virtual node, and the agglomeration is re-run over virtual nodes plus freed
singletons.

Community labels are the minimum member vertex id, which makes merge events
and tie-breaking deterministic.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .graphs import Graph


@dataclass(frozen=True)
class Clustering:
    """A partition of a vertex set: assignment and its inverse."""

    assignment: dict            # vertex id -> community label
    communities: dict           # community label -> frozenset of vertex ids

    @staticmethod
    def from_groups(groups) -> "Clustering":
        communities = {}
        assignment = {}
        for g in groups:
            members = frozenset(int(v) for v in g)
            if not members:
                raise ValueError("empty community")
            label = min(members)
            communities[label] = members
            for v in members:
                if v in assignment:
                    raise ValueError(f"vertex {v} assigned twice")
                assignment[v] = label
        return Clustering(assignment=assignment, communities=communities)

    def label_of(self, v: int) -> int:
        return self.assignment[int(v)]

    def __len__(self) -> int:
        return len(self.communities)

    def covers(self, vertices) -> bool:
        return set(self.assignment) == {int(v) for v in vertices}


@dataclass(frozen=True)
class MergeEvent:
    child_a: int
    child_b: int
    parent: int
    delta: float
    carried: bool = False     # rebuilt from a previous clustering, not chosen by gain


@dataclass(frozen=True)
class MergeHistory:
    """Ordered merge events; replaying them from singletons rebuilds the result."""

    events: tuple

    def replay(self, vertices) -> Clustering:
        comms = {int(v): {int(v)} for v in vertices}
        for ev in self.events:
            a = comms.pop(ev.child_a)
            b = comms.pop(ev.child_b)
            comms[ev.parent] = a | b
        return Clustering.from_groups(comms.values())

    def to_json_obj(self) -> list:
        return [{"child_a": e.child_a, "child_b": e.child_b, "parent": e.parent,
                 "delta": e.delta, "carried": e.carried} for e in self.events]

    @staticmethod
    def from_json_obj(obj) -> "MergeHistory":
        return MergeHistory(tuple(
            MergeEvent(int(e["child_a"]), int(e["child_b"]), int(e["parent"]),
                       float(e["delta"]), bool(e.get("carried", False)))
            for e in obj))


@dataclass(frozen=True)
class CommunityDiff:
    """Changed/unchanged split of current communities against the previous ones."""

    unchanged: list             # (previous label, current label) matched pairs
    changed: list               # current labels with no match above threshold
    threshold: float

    @property
    def prev_for(self) -> dict:
        return {cur: prev for prev, cur in self.unchanged}


def modularity(graph: Graph, clustering: Clustering) -> float:
    """Newman modularity Q = sum_c [e_c/m - (d_c/2m)^2]; 0 for edgeless graphs."""
    m = graph.num_edges
    if m == 0:
        return 0.0
    if not clustering.covers(graph.vertices):
        raise ValueError("clustering does not partition the graph's vertices")
    intra = {}
    for u, v in graph.edges:
        cu = clustering.assignment[int(u)]
        if cu == clustering.assignment[int(v)]:
            intra[cu] = intra.get(cu, 0) + 1
    q = 0.0
    for label, members in clustering.communities.items():
        d_c = sum(graph.degree(v) for v in members)
        q += intra.get(label, 0) / m - (d_c / (2.0 * m)) ** 2
    return q


class _GreedyMerger:
    """Weighted agglomeration over basis elements with a lazy max-heap.

    Elements are vertex sets; edge weights between elements count underlying
    graph edges, so quotient modularity equals modularity of the expanded
    partition. Gain of merging i,j is w_ij/m - 2*a_i*a_j.
    """

    def __init__(self, graph: Graph, basis):
        self.graph = graph
        self.m = graph.num_edges
        self.members = {}
        self.strength = {}      # a_c = d_c / 2m
        self.neighbors = {}     # label -> {other label: cross-edge weight}
        self.events = []

        owner = {}
        for elem in basis:
            elem = frozenset(int(v) for v in elem)
            label = min(elem)
            self.members[label] = set(elem)
            for v in elem:
                owner[v] = label
        if self.m == 0:
            return
        for label, mem in self.members.items():
            self.strength[label] = sum(graph.degree(v) for v in mem) / (2.0 * self.m)
            self.neighbors[label] = {}
        for u, v in graph.edges:
            cu, cv = owner[int(u)], owner[int(v)]
            if cu == cv:
                continue
            a, b = (cu, cv) if cu < cv else (cv, cu)
            self.neighbors[a][b] = self.neighbors[a].get(b, 0) + 1
            self.neighbors[b][a] = self.neighbors[b].get(a, 0) + 1

        self.heap = []
        for a in sorted(self.neighbors):
            for b in sorted(self.neighbors[a]):
                if a < b:
                    self._push(a, b)

    def _gain(self, a: int, b: int) -> float:
        w = self.neighbors[a].get(b, 0)
        return w / self.m - 2.0 * self.strength[a] * self.strength[b]

    def _push(self, a: int, b: int) -> None:
        a, b = (a, b) if a < b else (b, a)
        gain = self._gain(a, b)
        # a pair's gain only changes when one side merges (it is re-pushed
        # then), so non-positive candidates can safely be dropped here
        if gain > 0.0:
            heapq.heappush(self.heap, (-gain, a, b))

    def run(self) -> None:
        if self.m == 0:
            return
        while self.heap:
            neg_gain, a, b = heapq.heappop(self.heap)
            # an entry is stale once either side merged; recomputing the gain
            # detects that (equal gain means an identical, still-valid action)
            if (a not in self.members or b not in self.members
                    or b not in self.neighbors[a]
                    or self._gain(a, b) != -neg_gain):
                continue
            self._merge(a, b, -neg_gain)

    def _merge(self, a: int, b: int, gain: float, carried: bool = False) -> None:
        parent = min(a, b)
        other = max(a, b)
        self.events.append(MergeEvent(a, b, parent, gain, carried))
        self.members[parent] |= self.members.pop(other)
        self.strength[parent] += self.strength.pop(other)
        nbr_p = self.neighbors[parent]
        nbr_o = self.neighbors.pop(other)
        nbr_p.pop(other, None)
        nbr_o.pop(parent, None)
        for x, w in nbr_o.items():
            nbr_p[x] = nbr_p.get(x, 0) + w
            self.neighbors[x].pop(other, None)
        for x in sorted(nbr_p):
            self.neighbors[x][parent] = nbr_p[x]
            self._push(parent, x)

    def clustering(self) -> Clustering:
        return Clustering.from_groups(self.members.values())


def cluster_static(graph: Graph) -> tuple[Clustering, MergeHistory]:
    """Greedy maximum-modularity clustering from singletons.

    Merges stop when no connected pair has a positive modularity gain. Ties
    break on the lexicographically smallest (min label, max label) pair, so
    the result is deterministic.
    """
    if graph.num_vertices == 0:
        raise ValueError("cannot cluster an empty graph")
    merger = _GreedyMerger(graph, [{int(v)} for v in graph.vertices])
    merger.run()
    return merger.clustering(), MergeHistory(tuple(merger.events))


def freed_vertices(graph: Graph, changed_links, m_hops: int) -> set:
    """Vertices of ``graph`` within m hops of any endpoint of the changed links."""
    seeds = set()
    for u, v in changed_links:
        for x in (int(u), int(v)):
            if graph.has_vertex(x):
                seeds.add(x)
    freed = set(seeds)
    frontier = deque((s, 0) for s in sorted(seeds))
    while frontier:
        v, dist = frontier.popleft()
        if dist == m_hops:
            continue
        for w in graph.neighbors(v):
            w = int(w)
            if w not in freed:
                freed.add(w)
                frontier.append((w, dist + 1))
    return freed


def _carried_events(groups) -> list:
    events = []
    for members in groups:
        ordered = sorted(members)
        label = ordered[0]
        for v in ordered[1:]:
            events.append(MergeEvent(label, v, label, 0.0, carried=True))
    return events


def recluster_dynamic(graph: Graph, prev: tuple[Clustering, MergeHistory],
                      changed_links, m_hops: int) -> tuple[Clustering, MergeHistory]:
    """Re-cluster a snapshot by backtracking the previous clustering.

    Frees every vertex within ``m_hops`` of a changed link plus all new
    vertices; each previous community minus its freed (or departed) members
    is frozen into one virtual node; the greedy agglomeration then runs over
    virtual nodes and freed singletons. The frozen previous partition itself
    is kept as a candidate, so the result is never worse than not re-clustering.
    """
    prev_clustering, _prev_history = prev
    present = set(int(v) for v in graph.vertices)
    new_vertices = present - set(prev_clustering.assignment)
    freed = freed_vertices(graph, changed_links, m_hops) | new_vertices

    basis = []
    for members in prev_clustering.communities.values():
        kept = (set(members) & present) - freed
        if kept:
            basis.append(kept)
    basis.extend({v} for v in sorted(freed))

    merger = _GreedyMerger(graph, basis)
    carried = _carried_events(sorted((b for b in basis if len(b) > 1), key=min))
    merger.run()
    greedy_clustering = merger.clustering()
    greedy_history = MergeHistory(tuple(carried + merger.events))

    frozen_groups = [g for g in ((set(members) & present)
                                 for members in prev_clustering.communities.values()) if g]
    frozen_groups.extend({v} for v in sorted(new_vertices))
    frozen_clustering = Clustering.from_groups(frozen_groups)

    if modularity(graph, frozen_clustering) > modularity(graph, greedy_clustering) + 1e-15:
        history = MergeHistory(tuple(_carried_events(
            sorted((g for g in frozen_groups if len(g) > 1), key=min))))
        return frozen_clustering, history
    return greedy_clustering, greedy_history


def changed_link_set(prev_graph: Graph, cur_graph: Graph) -> set:
    """Symmetric difference of edge sets; covers edges of added/removed vertices."""
    return set(prev_graph.edge_set() ^ cur_graph.edge_set())


def classify_communities(prev: Clustering | None, cur: Clustering,
                         theta: float) -> CommunityDiff:
    """Greedy maximum-overlap matching of current to previous communities.

    Pairs with vertex Jaccard overlap >= theta are unchanged; everything
    else, including all communities when there is no previous clustering,
    is changed.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("overlap threshold must lie in (0, 1]")
    if prev is None or not prev.communities:
        return CommunityDiff(unchanged=[], changed=sorted(cur.communities),
                             threshold=theta)
    candidates = []
    for cur_label, cur_members in cur.communities.items():
        seen = set()
        for v in cur_members:
            p = prev.assignment.get(v)
            if p is None or p in seen:
                continue
            seen.add(p)
            prev_members = prev.communities[p]
            inter = len(cur_members & prev_members)
            jac = inter / len(cur_members | prev_members)
            if jac >= theta:
                candidates.append((-jac, p, cur_label))
    candidates.sort()
    matched_prev, matched_cur, unchanged = set(), set(), []
    for neg_jac, p, c in candidates:
        if p in matched_prev or c in matched_cur:
            continue
        matched_prev.add(p)
        matched_cur.add(c)
        unchanged.append((p, c))
    changed = sorted(set(cur.communities) - matched_cur)
    unchanged.sort(key=lambda pc: pc[1])
    return CommunityDiff(unchanged=unchanged, changed=changed, threshold=theta)


def clustering_csv_lines(clustering: Clustering) -> list:
    """Rows of the 'vertex,community' serialization, sorted by vertex."""
    lines = ["vertex,community"]
    for v in sorted(clustering.assignment):
        lines.append(f"{v},{clustering.assignment[v]}")
    return lines
