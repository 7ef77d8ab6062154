"""Undirected labeled graphs, temporal sequences, and edge-list I/O.

Vertex ids are arbitrary nonnegative integers that are stable across time
(the same id denotes the same user in every snapshot). Internally every
graph remaps its ids to dense positions 0..n-1 for O(1) sparse indexing;
the raw<->internal map is exposed via ``vertices`` / ``index_of``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or manifest files (reports file:line)."""


def _canonical_edges(edges) -> np.ndarray:
    """Deduplicated (min,max) edge array, lexicographically sorted."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                     dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if (arr[:, 0] == arr[:, 1]).any():
        bad = arr[arr[:, 0] == arr[:, 1]][0, 0]
        raise ValueError(f"self-loop on vertex {bad} is not allowed")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    arr = np.unique(np.column_stack([lo, hi]), axis=0)
    return arr


class Graph:
    """Immutable simple undirected graph.

    Parameters
    ----------
    edges : iterable of (u, v)
        Unordered vertex id pairs; duplicates and reversed copies collapse.
    vertices : iterable of int, optional
        Extra vertex ids to keep (isolated vertices); endpoints of ``edges``
        are always included.
    """

    __slots__ = ("_ids", "_edges", "_index", "_indptr", "_indices", "_degrees")

    def __init__(self, edges=(), vertices=None):
        edge_arr = _canonical_edges(edges)
        ids = edge_arr.ravel()
        if vertices is not None:
            extra = np.asarray(list(vertices), dtype=np.int64)
            ids = np.concatenate([ids, extra])
        ids = np.unique(ids)
        if ids.size and ids[0] < 0:
            raise ValueError("vertex ids must be nonnegative")
        self._ids = ids
        self._edges = edge_arr
        self._index = {int(v): i for i, v in enumerate(ids)}

        # CSR adjacency over internal positions, neighbor lists sorted.
        n = ids.size
        if edge_arr.size:
            iu = np.searchsorted(ids, edge_arr[:, 0])
            iv = np.searchsorted(ids, edge_arr[:, 1])
            both = np.concatenate([np.column_stack([iu, iv]),
                                   np.column_stack([iv, iu])])
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            counts = np.bincount(both[:, 0], minlength=n)
            self._indices = np.ascontiguousarray(both[:, 1])
        else:
            counts = np.zeros(n, dtype=np.int64)
            self._indices = np.empty(0, dtype=np.int64)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self._degrees = counts.astype(np.int64)
        for a in (self._ids, self._edges, self._indptr, self._indices, self._degrees):
            a.flags.writeable = False

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        """Sorted raw vertex ids; position in this array is the internal index."""
        return self._ids

    @property
    def edges(self) -> np.ndarray:
        """Canonical (min,max) edge array, shape (m, 2), sorted."""
        return self._edges

    @property
    def num_vertices(self) -> int:
        return int(self._ids.size)

    @property
    def num_edges(self) -> int:
        return int(self._edges.shape[0])

    def index_of(self, v: int) -> int:
        return self._index[int(v)]

    def has_vertex(self, v: int) -> bool:
        return int(v) in self._index

    def degree(self, v: int) -> int:
        return int(self._degrees[self._index[int(v)]])

    @property
    def degrees(self) -> np.ndarray:
        """Degrees indexed by internal position."""
        return self._degrees

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted raw ids of v's neighbors."""
        i = self._index[int(v)]
        return self._ids[self._indices[self._indptr[i]:self._indptr[i + 1]]]

    @property
    def csr_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) over internal positions, for vectorized walks."""
        return self._indptr, self._indices

    def has_edge(self, u: int, v: int) -> bool:
        iu = self._index.get(int(u))
        iv = self._index.get(int(v))
        if iu is None or iv is None:
            return False
        row = self._indices[self._indptr[iu]:self._indptr[iu + 1]]
        pos = np.searchsorted(row, iv)
        return bool(pos < row.size and row[pos] == iv)

    def edge_set(self) -> frozenset:
        return frozenset((int(u), int(v)) for u, v in self._edges)

    # -- derived graphs ----------------------------------------------------

    def subgraph(self, vertices) -> "Graph":
        """Induced subgraph on the given raw ids (kept even if isolated)."""
        keep = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
        if self._edges.size:
            mask = np.isin(self._edges[:, 0], keep) & np.isin(self._edges[:, 1], keep)
            sub_edges = self._edges[mask]
        else:
            sub_edges = self._edges
        return Graph(sub_edges, vertices=keep)

    def with_vertices(self, vertices) -> "Graph":
        """Same edges with the vertex set extended by ``vertices``."""
        return Graph(self._edges, vertices=np.union1d(self._ids, np.asarray(list(vertices), dtype=np.int64)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self._ids, other._ids)
                and np.array_equal(self._edges, other._edges))

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_vertices}, |E|={self.num_edges})"


@dataclass(frozen=True)
class TemporalGraphSequence:
    """Ordered snapshots G_0..G_T sharing a global vertex id namespace."""

    snapshots: list
    timestamps: list = field(default_factory=list)

    def __post_init__(self):
        if not self.snapshots:
            raise ValueError("a temporal sequence needs at least one snapshot")
        if not self.timestamps:
            object.__setattr__(self, "timestamps", list(range(len(self.snapshots))))
        if len(self.timestamps) != len(self.snapshots):
            raise ValueError("timestamps and snapshots must align")
        if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, t: int) -> Graph:
        return self.snapshots[t]


# -- file formats ----------------------------------------------------------


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list ('u v' per line, '#' comments).

    Raises
    ------
    GraphFormatError
        On unparseable lines or self-loops, reporting path and line number.
    """
    edges = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 'u v', got {line.strip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(
                    f"{path}:{lineno}: vertex ids must be integers, got {line.strip()!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: vertex ids must be nonnegative")
            if u == v:
                raise GraphFormatError(f"{path}:{lineno}: self-loop {u}-{v} rejected")
            edges.append((u, v))
    return Graph(edges)


def write_edge_list(graph: Graph, path, header_lines=()) -> None:
    """Write the canonical sorted edge list, with optional '#' header lines."""
    with open(path, "w", encoding="ascii") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def load_sequence(manifest_path) -> TemporalGraphSequence:
    """Load a temporal sequence from a manifest of edge-list paths.

    The manifest lists one path per line (relative to the manifest's
    directory), in timestamp order.
    """
    base = os.path.dirname(os.path.abspath(manifest_path))
    paths = []
    with open(manifest_path, "r", encoding="ascii") as fh:
        for line in fh:
            body = line.split("#", 1)[0].strip()
            if body:
                paths.append(body if os.path.isabs(body) else os.path.join(base, body))
    if not paths:
        raise GraphFormatError(f"{manifest_path}: manifest lists no edge-list files")
    for p in paths:
        if not os.path.exists(p):
            raise FileNotFoundError(f"{manifest_path}: listed file not found: {p}")
    return TemporalGraphSequence([load_edge_list(p) for p in paths])


def union_graph(graphs) -> Graph:
    """Union of vertex sets and edge sets of the given graphs."""
    graphs = list(graphs)
    if not graphs:
        raise ValueError("union of zero graphs is undefined")
    edges = np.concatenate([g.edges for g in graphs]) if any(g.num_edges for g in graphs) \
        else np.empty((0, 2), dtype=np.int64)
    verts = np.unique(np.concatenate([g.vertices for g in graphs]))
    return Graph(edges, vertices=verts)
