"""Finite metric spaces: validation, generators, and quotients.

Distances are stored as a dense float64 matrix.  All generators are pure
functions of their parameters (and seed), and every returned object is
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial.distance import cdist

from .errors import (
    AsymmetricMatrix,
    DuplicatePoint,
    NonzeroDiagonal,
    SinglePoint,
    TooLarge,
    TooSmall,
    TriangleViolation,
)

REL_TOL = 1e-9


@dataclass(frozen=True)
class FiniteMetric:
    """An n-point metric space given by labels and a distance matrix."""

    labels: tuple
    dist: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.dist.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def d(self, a, b) -> float:
        return float(self.dist[self.index(a), self.index(b)])

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}


def validate(dist_matrix, labels=None, tol: float = REL_TOL) -> FiniteMetric:
    """Check the metric axioms and wrap the matrix in a FiniteMetric.

    Raises AsymmetricMatrix, NonzeroDiagonal, DuplicatePoint or
    TriangleViolation.  The triangle inequality is checked with relative
    tolerance `tol`.
    """
    d = np.array(dist_matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise AsymmetricMatrix("distance matrix must be square")
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise AsymmetricMatrix("distances must be finite and non-negative")
    n = d.shape[0]
    if labels is None:
        labels = tuple(range(n))
    else:
        labels = tuple(labels)
        if len(labels) != n:
            raise AsymmetricMatrix("labels length does not match matrix size")
        if len(set(labels)) != n:
            raise DuplicatePoint("labels must be distinct")
    scale = d.max() if n else 0.0
    if np.any(np.abs(d - d.T) > tol * max(scale, 1.0)):
        raise AsymmetricMatrix("matrix is not symmetric")
    if np.any(np.diag(d) != 0):
        raise NonzeroDiagonal("diagonal entries must be zero")
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] == 0):
        i, j = np.argwhere((d == 0) & off)[0]
        raise DuplicatePoint(f"points {labels[i]} and {labels[j]} coincide")
    # d[i,k] <= d[i,j] + d[j,k] for all i,j,k
    slack = tol * max(scale, 1.0)
    for j in range(n):
        viol = d > d[:, j][:, None] + d[j, :][None, :] + slack
        if viol.any():
            i, k = np.argwhere(viol)[0]
            raise TriangleViolation(int(i), int(k), int(j))
    return FiniteMetric(labels, d)


def aspect_ratio(m: FiniteMetric) -> float:
    """diam(X) divided by the minimum positive distance."""
    if m.n < 2:
        raise SinglePoint("aspect ratio needs at least two points")
    off = ~np.eye(m.n, dtype=bool)
    return float(m.dist.max() / m.dist[off].min())


def min_distance(m: FiniteMetric) -> float:
    off = ~np.eye(m.n, dtype=bool)
    return float(m.dist[off].min())


def diameter(m: FiniteMetric) -> float:
    return float(m.dist.max())


def gen_cycle(n: int) -> FiniteMetric:
    """Shortest-path metric of the unweighted n-cycle."""
    if n < 3:
        raise TooSmall("cycle needs n >= 3")
    idx = np.arange(n)
    diff = np.abs(idx[:, None] - idx[None, :])
    d = np.minimum(diff, n - diff).astype(float)
    return FiniteMetric(tuple(range(n)), d)


def gen_path(n: int) -> FiniteMetric:
    """Shortest-path metric of the unweighted path on n vertices."""
    if n < 2:
        raise TooSmall("path needs n >= 2")
    idx = np.arange(n)
    d = np.abs(idx[:, None] - idx[None, :]).astype(float)
    return FiniteMetric(tuple(range(n)), d)


def diamond_graph(k: int):
    """Vertex labels and edge list of the k-th diamond graph.

    G_1 is the 4-cycle; each iteration replaces every edge by a
    quadrilateral.  Subdivision vertices carry the digit path of the edge
    they split, so canonical copies can be referenced by label prefix.
    """
    if k < 1:
        raise TooSmall("diamond index must be >= 1")
    if k > 6:
        raise TooLarge("diamond index capped at 6 (G_6 has 4096 edges)")
    vertices = ["s", "a", "t", "b"]
    # each edge carries its digit-path id
    edges = [("1", "s", "a"), ("2", "a", "t"), ("3", "s", "b"), ("4", "b", "t")]
    for _ in range(k - 1):
        nxt = []
        for eid, u, v in edges:
            p, q = f"{eid}+", f"{eid}-"
            vertices.extend([p, q])
            nxt.extend(
                [(eid + "1", u, p), (eid + "2", p, v), (eid + "3", u, q), (eid + "4", q, v)]
            )
        edges = nxt
    return vertices, [(u, v) for _, u, v in edges]


def gen_diamond(k: int) -> FiniteMetric:
    """Shortest-path metric of the k-th diamond graph (4^k edges)."""
    vertices, edges = diamond_graph(k)
    pos = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    rows = [pos[u] for u, v in edges] + [pos[v] for u, v in edges]
    cols = [pos[v] for u, v in edges] + [pos[u] for u, v in edges]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, method="D", unweighted=True)
    return FiniteMetric(tuple(vertices), d)


def gen_random(n: int, mode: str, seed: int) -> FiniteMetric:
    """Random test instances: Euclidean points or uniformly perturbed distances."""
    if n < 2:
        raise TooSmall("need n >= 2")
    rng = np.random.default_rng(seed)
    if mode == "euclidean_2d":
        pts = rng.random((n, 2))
        d = cdist(pts, pts)
    elif mode == "uniform_perturbed":
        # i.i.d. distances in [1,2]; always a metric since max <= 2*min
        u = rng.uniform(1.0, 2.0, size=(n, n))
        d = np.triu(u, 1)
        d = d + d.T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return FiniteMetric(tuple(range(n)), d)


def from_graph(n: int, edges, labels=None) -> FiniteMetric:
    """Weighted graph -> metric by shortest-path closure."""
    if n < 1:
        raise TooSmall("graph needs at least one vertex")
    rows, cols, w = [], [], []
    for u, v, weight in edges:
        rows.extend([u, v])
        cols.extend([v, u])
        w.extend([weight, weight])
    adj = csr_matrix((np.asarray(w, dtype=float), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, method="D", directed=False)
    labels = tuple(labels) if labels is not None else tuple(range(n))
    return FiniteMetric(labels, d)


@dataclass(frozen=True)
class QuotientMap:
    """A partition of a metric's points together with the quotient metric."""

    parent: FiniteMetric
    classes: tuple  # tuple of tuples of parent indices
    quotient: FiniteMetric
    delta: float
    class_of: np.ndarray = field(repr=False)  # parent index -> class id

    def __post_init__(self):
        self.class_of.setflags(write=False)


def quotient_at_scale(m: FiniteMetric, delta: float) -> QuotientMap:
    """Merge points connected by steps of length <= delta/(2n); quotient
    distances are the shortest-path closure of minimum cross distances
    (the maximal metric majorized by the original one)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = m.n
    thr = delta / (2 * n)
    adj = csr_matrix(m.dist <= thr)
    m_blocks, cls = connected_components(adj, directed=False)
    classes = tuple(tuple(np.flatnonzero(cls == b)) for b in range(m_blocks))
    if m_blocks == n:
        # all singletons: the maximal majorized metric is the original one
        order = np.argsort(cls, kind="stable")  # class b = point order[b]
        qd = m.dist[np.ix_(order, order)]
        qlabels = tuple(range(m_blocks))
        return QuotientMap(m, classes, FiniteMetric(qlabels, qd), float(delta), cls.copy())
    # minimum cross distance between every pair of classes
    w = np.full((m_blocks, m_blocks), np.inf)
    np.minimum.at(w, (cls[:, None], cls[None, :]), m.dist)
    np.fill_diagonal(w, 0.0)
    qd = shortest_path(w, method="FW") if m_blocks > 1 else np.zeros((1, 1))
    qlabels = tuple(range(m_blocks))
    return QuotientMap(m, classes, FiniteMetric(qlabels, qd), float(delta), cls.copy())
