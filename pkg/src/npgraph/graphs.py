"""Undirected graphs, union-find, and graph comparison."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPath, InputError, VertexMismatch


@dataclass(frozen=True)
class Graph:
    """Vertex labels plus a canonical (sorted, ``i < j``) edge tuple.

    ``weights`` is either ``None`` or a tuple aligned with ``edges``; an
    edgeless graph always has ``weights = None``.
    """

    labels: tuple
    edges: tuple = ()
    weights: tuple = None

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        if len(set(labels)) != len(labels):
            raise InputError("duplicate vertex labels")
        d = len(labels)
        pairs = []
        for e in self.edges:
            i, j = (int(e[0]), int(e[1]))
            if i == j:
                raise InputError(f"self-loop on vertex {i}")
            if not (0 <= i < d and 0 <= j < d):
                raise InputError(f"edge ({i}, {j}) outside {d} vertices")
            pairs.append((min(i, j), max(i, j)))
        weights = self.weights if pairs else None
        if weights is not None:
            weights = tuple(float(w) for w in weights)
            if len(weights) != len(pairs):
                raise InputError("weights do not align with edges")
            order = sorted(range(len(pairs)), key=pairs.__getitem__)
            pairs = [pairs[k] for k in order]
            weights = tuple(weights[k] for k in order)
        else:
            pairs.sort()
        if len(set(pairs)) != len(pairs):
            raise InputError("duplicate edges")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", tuple(pairs))
        object.__setattr__(self, "weights", weights)

    @classmethod
    def empty(cls, labels):
        return cls(tuple(labels))

    @classmethod
    def from_adjacency(cls, adjacency, labels=None, weights=None):
        a = np.asarray(adjacency, dtype=bool)
        d = a.shape[0]
        if labels is None:
            labels = tuple(f"X{j + 1}" for j in range(d))
        edges = [(i, j) for i in range(d) for j in range(i + 1, d) if a[i, j] or a[j, i]]
        w = None
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            w = tuple(weights[i, j] for i, j in edges)
        return cls(tuple(labels), tuple(edges), w)

    @property
    def d(self):
        return len(self.labels)

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_set(self):
        return frozenset(self.edges)

    def adjacency(self):
        a = np.zeros((self.d, self.d), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        return a

    def unweighted(self):
        return Graph(self.labels, self.edges)

    def is_forest(self):
        return self.n_edges <= max(self.d - 1, 0) and is_acyclic(self.d, self.edges)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by rank and path halving."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.components = n

    def find(self, i):
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i, j):
        """Merge the sets of ``i`` and ``j``; False if already joined."""
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1
        self.components -= 1
        return True


def is_acyclic(d, edges):
    """Cycle check by depth-first search (independent of :class:`UnionFind`)."""
    adj = [[] for _ in range(d)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * d
    for root in range(d):
        if seen[root]:
            continue
        seen[root] = True
        stack = [(root, -1)]
        while stack:
            v, parent = stack.pop()
            skipped_parent = False
            for w in adj[v]:
                if w == parent and not skipped_parent:
                    skipped_parent = True
                    continue
                if seen[w]:
                    return False
                seen[w] = True
                stack.append((w, v))
    return True


def _check_vertices(a, b):
    if a.labels != b.labels:
        raise VertexMismatch("graphs have different vertex labels")


def graph_diff(a, b):
    """Symmetric difference and intersection of two edge sets.

    Returns
    -------
    symmetric_difference, common : Graph
        Both unweighted, on the shared vertex labels.
    """
    _check_vertices(a, b)
    ea, eb = a.edge_set(), b.edge_set()
    return Graph(a.labels, tuple(ea ^ eb)), Graph(a.labels, tuple(ea & eb))


def closest_on_path(target, path):
    """Index of the path graph with the fewest edges differing from ``target``.

    Ties go to the smallest index.
    """
    if len(path) == 0:
        raise EmptyPath("empty path")
    et = target.edge_set()
    best, best_size = None, None
    for k, g in enumerate(path):
        _check_vertices(target, g)
        size = len(et ^ g.edge_set())
        if best_size is None or size < best_size:
            best, best_size = k, size
    return best


def edge_f1(estimated, truth):
    """F1 score of an estimated edge set against the true one."""
    est, tru = estimated.edge_set(), truth.edge_set()
    tp = len(est & tru)
    if not est and not tru:
        return 1.0
    if tp == 0:
        return 0.0
    precision = tp / len(est)
    recall = tp / len(tru)
    return 2 * precision * recall / (precision + recall)
