"""Clustering objective evaluators and dynamic programs on ultrametric trees.

Three objectives are supported: fault-tolerant k-median (each point pays
the distance to its j(x)-th closest center), its facility-location
variant with opening costs, and sum-of-lp-norms clustering.  The first
two are solved exactly on ultrametric trees; the third by a rounding
FPTAS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadEps, KTooLarge, NotAPartition, ProfileExceedsK
from .metric import FiniteMetric
from .ultrametric import UltrametricTree, to_metric

INF = float("inf")


@dataclass(frozen=True)
class ClusteringSolution:
    centers: tuple
    value: float
    objective: str
    clusters: tuple | None = None  # explicit partition, sigma_lp only
    params: dict = field(default_factory=dict)
    metric_tag: str = ""


def profile_vector(labels, profile, k) -> np.ndarray:
    """Fault-tolerance parameters j(x) as an array in leaf-label order."""
    try:
        j = np.array([int(profile[lab]) for lab in labels])
    except KeyError as e:
        raise ProfileExceedsK(f"profile missing point {e.args[0]!r}") from None
    if np.any(j < 1) or np.any(j > k):
        raise ProfileExceedsK(f"profile values must lie in 1..{k}")
    return j


def _center_indices(m: FiniteMetric, centers):
    idx = [m.index(c) for c in centers]
    if len(set(idx)) != len(idx):
        raise ValueError("centers must be distinct")
    return idx


def eval_ft_kmedian(m: FiniteMetric, centers, profile) -> float:
    """Sum over points of the distance to the j(x)-th closest center.

    Ties in closeness are broken by center list order (stable sort).
    """
    idx = _center_indices(m, centers)
    k = len(idx)
    j = profile_vector(m.labels, profile, k)
    d = np.sort(m.dist[:, idx], axis=1, kind="stable")
    return float(d[np.arange(m.n), j - 1].sum())


def eval_facility(m: FiniteMetric, centers, profile, open_cost) -> float:
    """Opening costs of the chosen centers plus the fault-tolerant
    k-median connection cost."""
    total = sum(float(open_cost[c]) for c in centers)
    return total + eval_ft_kmedian(m, centers, profile)


def eval_sigma_lp(m: FiniteMetric, centers, clusters, p) -> float:
    """Sum over clusters of the lp norm of member-to-center distances."""
    if len(centers) != len(clusters):
        raise NotAPartition("need one center per cluster")
    seen = []
    for c in clusters:
        seen.extend(c)
    if sorted(m.index(x) for x in seen) != list(range(m.n)):
        raise NotAPartition("clusters must partition the point set")
    _center_indices(m, centers)
    total = 0.0
    for center, members in zip(centers, clusters):
        if not members:
            continue
        dd = np.array([m.d(x, center) for x in members])
        if p == math.inf:
            total += float(dd.max())
        elif p == 2:
            # sqrt is correctly rounded, so scaling by powers of two stays exact
            total += float(np.sqrt((dd**2).sum()))
        else:
            total += float((dd**p).sum() ** (1.0 / p))
    return total


class _TreeIndex:
    """Postorder arrays over a binary ultrametric tree."""

    def __init__(self, t: UltrametricTree):
        self.tree = t
        self.labels = t.labels
        pos = {lab: i for i, lab in enumerate(t.labels)}
        self.delta: list[float] = []
        self.kids: list[tuple | None] = []
        self.leaves_under: list[list[int]] = []
        self.parent_delta: list[float] = []

        def walk(node):
            if node.is_leaf:
                self.delta.append(0.0)
                self.kids.append(None)
                self.leaves_under.append([pos[node.label]])
            else:
                a = walk(node.children[0])
                b = walk(node.children[1])
                self.delta.append(node.delta)
                self.kids.append((a, b))
                self.leaves_under.append(self.leaves_under[a] + self.leaves_under[b])
            return len(self.delta) - 1

        self.root = walk(t.root)
        self.size = [len(x) for x in self.leaves_under]
        self.parent_delta = [INF] * len(self.delta)
        for v, kk in enumerate(self.kids):
            if kk:
                for c in kk:
                    self.parent_delta[c] = self.delta[v]

    def postorder(self, top=None):
        out = []

        def walk(v):
            if self.kids[v]:
                walk(self.kids[v][0])
                walk(self.kids[v][1])
            out.append(v)

        walk(self.root if top is None else top)
        return out


def _j_prefix(ti: _TreeIndex, j_by_pos: np.ndarray, top: int) -> dict:
    """pref[v][s] = number of leaves under v with j(x) <= s."""
    jmax = len(j_by_pos)
    pref = {}
    for v in ti.postorder(top):
        counts = np.bincount(j_by_pos[ti.leaves_under[v]], minlength=jmax + 2)
        pref[v] = np.cumsum(counts)
    return pref


def solve_ft_kmedian_ultrametric(t: UltrametricTree, k: int, profile) -> ClusteringSolution:
    """Exact fault-tolerant k-median on an ultrametric tree.

    DP over (node, number of centers placed in its subtree); a center
    budget never exceeds the subtree's leaf count, so centers are
    distinct points.  O(k n^2) including the per-subtree j-histograms.
    """
    n = t.n
    if not 1 <= k <= n:
        raise KTooLarge(f"k must lie in 1..{n}")
    ti = _TreeIndex(t)
    j = profile_vector(t.labels, profile, k)
    j_by_pos = np.empty(n, dtype=int)
    j_by_pos[:] = j  # labels order == leaf position order
    pref = _j_prefix(ti, j_by_pos, ti.root)
    cost = {}
    split = {}
    for v in ti.postorder():
        hi = min(k, ti.size[v])
        if ti.kids[v] is None:
            cost[v] = np.zeros(hi + 1)
            continue
        u, w = ti.kids[v]
        cu, cw = cost[u], cost[w]
        pu, pw = pref[u], pref[w]
        dv = ti.delta[v]
        c = np.empty(hi + 1)
        sp = np.empty(hi + 1, dtype=int)
        for s in range(hi + 1):
            lo = max(0, s - (len(cw) - 1))
            up = min(s, len(cu) - 1)
            tt = np.arange(lo, up + 1)
            vals = cu[tt] + cw[s - tt] + dv * ((pu[s] - pu[tt]) + (pw[s] - pw[s - tt]))
            best = int(np.argmin(vals))
            c[s] = vals[best]
            sp[s] = lo + best
        cost[v] = c
        split[v] = sp
    value = float(cost[ti.root][k])
    centers = []
    stack = [(ti.root, k)]
    while stack:
        v, s = stack.pop()
        if ti.kids[v] is None:
            if s == 1:
                centers.append(t.labels[ti.leaves_under[v][0]])
            continue
        u, w = ti.kids[v]
        tt = int(split[v][s])
        stack.append((u, tt))
        stack.append((w, s - tt))
    return ClusteringSolution(
        centers=tuple(sorted(centers, key=t.labels.index)),
        value=value,
        objective="ft_kmedian",
        params={"k": k},
        metric_tag="ultrametric",
    )


def solve_facility_ultrametric(t: UltrametricTree, profile, open_cost) -> ClusteringSolution:
    """Exact fault-tolerant facility location on an ultrametric tree.

    Same DP as the k-median solver with the opening cost charged at
    leaves and the center count unconstrained.
    """
    n = t.n
    j = profile_vector(t.labels, profile, n)
    ti = _TreeIndex(t)
    j_by_pos = np.empty(n, dtype=int)
    j_by_pos[:] = j
    pref = _j_prefix(ti, j_by_pos, ti.root)
    cost = {}
    split = {}
    for v in ti.postorder():
        hi = ti.size[v]
        if ti.kids[v] is None:
            lab = t.labels[ti.leaves_under[v][0]]
            cost[v] = np.array([0.0, float(open_cost[lab])])
            continue
        u, w = ti.kids[v]
        cu, cw = cost[u], cost[w]
        pu, pw = pref[u], pref[w]
        dv = ti.delta[v]
        c = np.empty(hi + 1)
        sp = np.empty(hi + 1, dtype=int)
        for s in range(hi + 1):
            lo = max(0, s - (len(cw) - 1))
            up = min(s, len(cu) - 1)
            tt = np.arange(lo, up + 1)
            vals = cu[tt] + cw[s - tt] + dv * ((pu[s] - pu[tt]) + (pw[s] - pw[s - tt]))
            best = int(np.argmin(vals))
            c[s] = vals[best]
            sp[s] = lo + best
        cost[v] = c
        split[v] = sp
    smin = int(j.max())
    root_cost = cost[ti.root]
    s_star = smin + int(np.argmin(root_cost[smin:]))
    value = float(root_cost[s_star])
    centers = []
    stack = [(ti.root, s_star)]
    while stack:
        v, s = stack.pop()
        if ti.kids[v] is None:
            if s == 1:
                centers.append(t.labels[ti.leaves_under[v][0]])
            continue
        u, w = ti.kids[v]
        tt = int(split[v][s])
        stack.append((u, tt))
        stack.append((w, s - tt))
    return ClusteringSolution(
        centers=tuple(sorted(centers, key=t.labels.index)),
        value=value,
        objective="facility",
        params={},
        metric_tag="ultrametric",
    )


# ---------------------------------------------------------------------------
# sum-of-lp-norms FPTAS
# ---------------------------------------------------------------------------


def _pnorm(tval: float, r: int, delta: float, p) -> float:
    """(t^p + r * delta^p)^(1/p), with the max(.) limit at p = inf."""
    if r == 0 or delta == 0.0:
        return tval
    if p == math.inf:
        return max(tval, delta)
    if p == 1:
        return tval + r * delta
    return (tval**p + r * delta**p) ** (1.0 / p)


class _Rounder:
    """Rounding to the grid {0, A/M, ..., A}; ties round down."""

    def __init__(self, A: float, M: int):
        self.A = A
        self.M = M
        self.step = A / M

    def index(self, x: float) -> int:
        q = x / self.step
        idx = math.ceil(q - 0.5)
        return min(max(idx, 0), self.M)

    def value(self, x: float) -> float:
        return self.index(x) * self.step


def _prune(frontier: dict) -> dict:
    """Keep only states not dominated by one with larger tau and no worse value."""
    best = INF
    keep = {}
    for tau in sorted(frontier, reverse=True):
        val, bp = frontier[tau]
        if val < best:
            keep[tau] = (val, bp)
            best = val
    return keep


def _subtree_dp(ti: _TreeIndex, top: int, k: int, p, dc, rd: _Rounder, prune=True):
    """Pseudo-cost tables for one low-level subtree.

    Returns, per node, a map (clusters, excluded) -> {tau_index: (value,
    backpointer)} where tau tracks the rounded cost of the most expensive
    cluster so far.
    """
    tables = {}
    tau_vals = np.arange(rd.M + 1) * rd.step
    for v in ti.postorder(top):
        if ti.kids[v] is None:
            tables[v] = {
                (1, 0): {0: (0.0, "center")},
                (1, 1): {0: (0.0, "center_excluded")},
                (0, 1): {0: (0.0, "excluded")},
            }
            continue
        u, w = ti.kids[v]
        dv = dc[v]
        # lifted tau values per receive count r
        maxr = ti.size[v]
        mval = {}
        for r in range(maxr + 1):
            if p == math.inf:
                mval[r] = np.maximum(tau_vals, dv) if r > 0 else tau_vals
            elif r == 0 or dv == 0.0:
                mval[r] = tau_vals
            elif p == 1:
                mval[r] = tau_vals + r * dv
            else:
                mval[r] = (tau_vals**p + r * dv**p) ** (1.0 / p)
        table = {}
        for (l1, s1), fr1 in tables[u].items():
            for (l2, s2), fr2 in tables[w].items():
                l = l1 + l2
                if l > k:
                    continue
                for r1 in range(s1 + 1):
                    if r1 > 0 and l2 == 0:
                        break  # nothing on the w side to attach to
                    for r2 in range(s2 + 1):
                        if r2 > 0 and l1 == 0:
                            break
                        s = s1 + s2 - r1 - r2
                        key = (l, s)
                        slot = table.setdefault(key, {})
                        m1v = mval[r2]
                        m2v = mval[r1]
                        for tau1, (b1, _) in fr1.items():
                            m1 = m1v[tau1]
                            inc1 = m1 - tau_vals[tau1]
                            for tau2, (b2, _) in fr2.items():
                                m2 = m2v[tau2]
                                inc = rd.value(inc1 + m2 - tau_vals[tau2])
                                tau = rd.index(max(m1, m2))
                                val = b1 + b2 + inc
                                cur = slot.get(tau)
                                if cur is None or val < cur[0]:
                                    slot[tau] = (
                                        val,
                                        (r1, r2, l1, s1, tau1, l2, s2, tau2),
                                    )
        if prune:
            table = {key: _prune(fr) for key, fr in table.items()}
        tables[v] = table
        # children tables are no longer needed beyond reconstruction
    return tables


class _Cluster:
    __slots__ = ("center", "members", "costp")

    def __init__(self, center):
        self.center = center
        self.members = [center]
        self.costp = 0.0


def _extract_clusters(ti: _TreeIndex, tables, node, l, s, tau, p, dc):
    """Rebuild (clusters, excluded points) from backpointers."""
    if ti.kids[node] is None:
        leafpos = ti.leaves_under[node][0]
        if (l, s) == (1, 0):
            return [_Cluster(leafpos)], []
        if (l, s) == (1, 1):
            c = _Cluster(leafpos)
            c.members = []
            return [c], [leafpos]
        return [], [leafpos]
    u, w = ti.kids[node]
    _, bp = tables[node][(l, s)][tau]
    r1, r2, l1, s1, tau1, l2, s2, tau2 = bp
    cu, eu = _extract_clusters(ti, tables, u, l1, s1, tau1, p, dc)
    cw, ew = _extract_clusters(ti, tables, w, l2, s2, tau2, p, dc)
    dv = dc[node]

    def attach(points, clusters):
        # attach to the currently most expensive cluster, matching the DP's
        # pseudo-cost bookkeeping
        target = max(clusters, key=lambda c: c.costp)
        target.members.extend(points)
        if p == math.inf:
            target.costp = max(target.costp, dv) if points else target.costp
        else:
            target.costp += len(points) * dv**p

    if r1:
        attach(eu[:r1], cw)
        eu = eu[r1:]
    if r2:
        attach(ew[:r2], cu)
        ew = ew[r2:]
    return cu + cw, eu + ew


def _solve_given_h(ti: _TreeIndex, k: int, p, eps: float, h: float):
    """One pass of the FPTAS pipeline for a fixed guess of the maximum
    served distance h.  Returns (centers, clusters) by leaf position, or
    None when no feasible split exists."""
    n = ti.size[ti.root]
    thr = eps * h / n**2
    dc = [0.0 if d <= thr else d for d in ti.delta]
    level = [
        v
        for v in range(len(ti.delta))
        if ti.delta[v] <= h < ti.parent_delta[v]
    ]
    level_set = set(level)
    M = math.ceil(n / eps)
    A = h if p == math.inf else h * n ** (1.0 / p)
    rd = _Rounder(A, M)
    tables = {}
    for v in level:
        tables[v] = _subtree_dp(ti, v, k, p, dc, rd)

    C = {}
    bp = {}

    def glue(v):
        if v in level_set:
            row = np.full(k + 1, INF)
            pick = [None] * (k + 1)
            for l in range(k + 1):
                fr = tables[v][v].get((l, 0)) if (l, 0) in tables[v][v] else None
                if fr:
                    tau = min(fr, key=lambda tt: fr[tt][0])
                    row[l] = fr[tau][0]
                    pick[l] = ("leaf", tau)
            C[v] = row
            bp[v] = pick
            return
        u, w = ti.kids[v]
        glue(u)
        glue(w)
        row = np.full(k + 1, INF)
        pick = [None] * (k + 1)
        for l in range(k + 1):
            for l1 in range(l + 1):
                val = C[u][l1] + C[w][l - l1]
                if val < row[l]:
                    row[l] = val
                    pick[l] = ("split", l1)
        C[v] = row
        bp[v] = pick

    glue(ti.root)
    root_row = C[ti.root]
    feasible = [l for l in range(1, k + 1) if root_row[l] < INF]
    if not feasible:
        return None
    l_star = min(feasible, key=lambda l: root_row[l])

    clusters = []

    def build(v, l):
        kind = bp[v][l]
        if kind[0] == "leaf":
            got, excluded = _extract_clusters(ti, tables[v], v, l, 0, kind[1], p, dc)
            assert not excluded
            clusters.extend(got)
        else:
            l1 = kind[1]
            u, w = ti.kids[v]
            build(u, l1)
            build(w, l - l1)

    build(ti.root, l_star)
    return [(c.center, c.members) for c in clusters]


def solve_sigma_lp_ultrametric(t: UltrametricTree, k: int, p, eps: float) -> ClusteringSolution:
    """Sum-of-lp-norms clustering on an ultrametric tree, within 1+O(eps)
    of the optimum.

    Tries every pairwise distance as the maximum served distance h,
    contracts everything below eps*h/n^2, runs the discretized
    pseudo-cost DP on each low-level subtree, glues subtree solutions,
    and finally re-evaluates the best reconstructed solution exactly
    (the reported value is never the rounded DP estimate).
    """
    n = t.n
    if not 1 <= k <= n:
        raise KTooLarge(f"k must lie in 1..{n}")
    if not 0 < eps < 1:
        raise BadEps("eps must lie in (0, 1)")
    if p != math.inf and not p >= 1:
        raise ValueError("p must be >= 1 or inf")
    metric = to_metric(t)
    if k == n:
        labs = metric.labels
        return ClusteringSolution(
            centers=labs,
            value=0.0,
            objective="sigma_lp",
            clusters=tuple((lab,) for lab in labs),
            params={"k": k, "p": p, "eps": eps},
            metric_tag="ultrametric",
        )
    ti = _TreeIndex(t)
    h_values = sorted({d for d, kk in zip(ti.delta, ti.kids) if kk and d > 0})
    best = None
    for h in h_values:
        res = _solve_given_h(ti, k, p, eps, h)
        if res is None:
            continue
        centers = [t.labels[c] for c, _ in res]
        clusters = [tuple(t.labels[x] for x in members) for _, members in res]
        val = eval_sigma_lp(metric, centers, clusters, p)
        if best is None or val < best[0]:
            best = (val, centers, clusters)
    assert best is not None, "at least the largest h admits a solution"
    val, centers, clusters = best
    # pad with empty clusters centered at unused points so |centers| == k
    unused = [lab for lab in t.labels if lab not in set(centers)]
    while len(centers) < k:
        centers.append(unused.pop())
        clusters.append(())
    return ClusteringSolution(
        centers=tuple(centers),
        value=val,
        objective="sigma_lp",
        clusters=tuple(clusters),
        params={"k": k, "p": p, "eps": eps},
        metric_tag="ultrametric",
    )
