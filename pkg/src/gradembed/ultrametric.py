"""Ultrametrics as labelled binary trees with LCA distances."""

from __future__ import annotations

import numpy as np

from .errors import AsymmetricMatrix, NonzeroDiagonal, NotUltrametric, UnknownPoint
from .metric import REL_TOL, FiniteMetric


class Node:
    __slots__ = ("delta", "children", "label", "parent")

    def __init__(self, delta=0.0, children=None, label=None):
        self.delta = float(delta)
        self.children = children or []
        self.label = label
        self.parent = None
        for c in self.children:
            c.parent = self

    @property
    def is_leaf(self) -> bool:
        return not self.children


class UltrametricTree:
    """Rooted binary tree with non-increasing level labels; leaves are points.

    The induced distance between two leaves is the label of their least
    common ancestor.
    """

    def __init__(self, root: Node):
        self.root = root
        self._leaves = {}
        self._collect(root)
        self.labels = tuple(self._order)
        self._check()

    def _collect(self, root):
        self._order = []
        stack = [root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                if node.label in self._leaves:
                    raise NotUltrametric(node.label, node.label, None,
                                         f"duplicate leaf label {node.label!r}")
                self._leaves[node.label] = node
                self._order.append(node.label)
            else:
                stack.extend(reversed(node.children))

    def _check(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                if node.delta != 0:
                    raise NotUltrametric(node.label, node.label, None,
                                         "leaf labels must be zero")
                continue
            if len(node.children) != 2:
                raise NotUltrametric(None, None, None,
                                     "internal nodes must have exactly two children")
            for c in node.children:
                if c.delta > node.delta:
                    raise NotUltrametric(None, None, None,
                                         "levels must be non-increasing toward the leaves")
                stack.append(c)

    @property
    def n(self) -> int:
        return len(self.labels)

    def leaf(self, label) -> Node:
        try:
            return self._leaves[label]
        except KeyError:
            raise UnknownPoint(label) from None

    def distance(self, u, v) -> float:
        """Label of lca(u, v); zero when u == v."""
        if u == v:
            self.leaf(u)
            return 0.0
        a, b = self.leaf(u), self.leaf(v)
        seen = set()
        while a is not None:
            seen.add(id(a))
            a = a.parent
        while id(b) not in seen:
            b = b.parent
        return b.delta

    def to_matrix(self) -> np.ndarray:
        """Dense induced distance matrix in leaf label order."""
        pos = {lab: i for i, lab in enumerate(self.labels)}
        d = np.zeros((self.n, self.n))

        def fill(node):
            if node.is_leaf:
                return [pos[node.label]]
            left = fill(node.children[0])
            right = fill(node.children[1])
            d[np.ix_(left, right)] = node.delta
            d[np.ix_(right, left)] = node.delta
            return left + right

        fill(self.root)
        return d

    def to_json(self):
        def enc(node):
            if node.is_leaf:
                return {"leaf": node.label}
            return {"delta": node.delta, "children": [enc(c) for c in node.children]}

        return enc(self.root)

    @classmethod
    def from_json(cls, obj) -> "UltrametricTree":
        def dec(o):
            if "leaf" in o:
                return Node(0.0, label=o["leaf"])
            return Node(o["delta"], children=[dec(c) for c in o["children"]])

        return cls(dec(obj))


def to_metric(t: UltrametricTree) -> FiniteMetric:
    """Materialize the induced n-by-n distance matrix."""
    return FiniteMetric(t.labels, t.to_matrix())


def check_strong_triangle(d: np.ndarray, tol: float = REL_TOL):
    """Return a violating triple (i, j, k) or None."""
    n = d.shape[0]
    scale = d.max() if n else 0.0
    slack = tol * max(scale, 1.0)
    for k in range(n):
        viol = d > np.maximum(d[:, k][:, None], d[k, :][None, :]) + slack
        viol[:, k] = viol[k, :] = False
        np.fill_diagonal(viol, False)
        if viol.any():
            i, j = np.argwhere(viol)[0]
            return int(i), int(j), int(k)
    return None


def from_distance_matrix(m, labels=None, tol: float = REL_TOL) -> UltrametricTree:
    """Build the labelled tree of an ultrametric by single-linkage merging.

    Merges the two clusters at the current minimum cross distance, ties
    broken by lowest point index; multi-way ties become a left-leaning
    chain of equal-level nodes.  The induced distances reproduce the
    input exactly (no recomputation of levels happens).
    """
    if isinstance(m, FiniteMetric):
        d, labels = m.dist, m.labels
    else:
        d = np.asarray(m, dtype=float)
        labels = tuple(labels) if labels is not None else tuple(range(d.shape[0]))
    n = d.shape[0]
    scale = max(d.max() if n else 0.0, 1.0)
    if np.any(np.abs(d - d.T) > tol * scale):
        raise AsymmetricMatrix("matrix is not symmetric")
    if np.any(np.diag(d) != 0):
        raise NonzeroDiagonal("diagonal entries must be zero")
    bad = check_strong_triangle(d, tol)
    if bad is not None:
        raise NotUltrametric(*bad)
    if n == 1:
        return UltrametricTree(Node(0.0, label=labels[0]))
    # clusters as (min leaf index, node, member indices)
    clusters = [(i, Node(0.0, label=labels[i]), [i]) for i in range(n)]
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                dd = d[clusters[a][2][0], clusters[b][2][0]]
                if best is None or dd < best[0]:
                    best = (dd, a, b)
        dd, a, b = best
        _, na, ma = clusters[a]
        _, nb, mb = clusters[b]
        merged = (min(clusters[a][0], clusters[b][0]), Node(dd, children=[na, nb]), ma + mb)
        clusters = [c for i, c in enumerate(clusters) if i not in (a, b)]
        clusters.append(merged)
        clusters.sort(key=lambda c: c[0])
    return UltrametricTree(clusters[0][1])


def random_tree(n: int, seed) -> UltrametricTree:
    """Random binary tree over points 0..n-1 with sorted random levels.

    Levels drawn uniformly from [1, 100] and assigned in decreasing order
    toward the leaves, so every draw is a valid ultrametric tree.
    """
    rng = np.random.default_rng(seed)
    if n == 1:
        return UltrametricTree(Node(0.0, label=0))
    deltas = np.sort(rng.uniform(1.0, 100.0, size=n - 1))
    level = [Node(0.0, label=i) for i in range(n)]
    # merge random pairs bottom-up; assigning levels in increasing order
    # guarantees non-increasing labels along every root-to-leaf path
    for dd in deltas:
        i, j = sorted(rng.choice(len(level), size=2, replace=False))
        a, b = level[i], level[j]
        level = [x for t, x in enumerate(level) if t not in (i, j)]
        level.append(Node(dd, children=[a, b]))
    return UltrametricTree(level[0])
