"""Rough Cayley graphs: threshold graphs on quasi-lattices.

``build_graph`` connects lattice points at distance <= 2r + c + 1 (density
radius r, coarse-geodesic constant c), which makes the graph connected,
uniformly locally finite and quasi-isometric to the ambient space.
``certify_qi`` checks the two defining inequalities

    d(x, y) <= (2r + c + 1) d_graph(x, y)
    d_graph(x, y) <= d(x, y) + c + 1

on sampled interior vertex pairs.

Two implicit (infinite, window-free) graphs are also provided for analyses
that would otherwise drown in window-border effects: ``CayleyGraph`` over a
whole discrete group and ``HorocyclicGraph`` over the full horocyclic
lattice of the upper half-plane.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CertificationError,
    DisconnectedGraphError,
    DomainError,
    UnreachableError,
)
from .nets import HOROCYCLIC_DENSITY_RADIUS, QuasiLattice
from .serialize import point_to_json
from .spaces import (
    EuclideanModel,
    HyperbolicPlaneModel,
    QiConstants,
    TOL,
    ZdModel,
    hyperbolic_distance_arrays,
    word_ball,
)


def default_threshold(lattice: QuasiLattice) -> float:
    return 2.0 * lattice.density_radius_r + lattice.space.coarse_constant_c + 1.0


@dataclass
class RoughGraph:
    """Finite threshold graph over a windowed quasi-lattice."""

    lattice: QuasiLattice
    threshold: float
    adjacency: list
    degree_bound_M: int = field(default=0)

    @property
    def n(self):
        return len(self.lattice.points)

    @property
    def space(self):
        return self.lattice.space

    def point(self, i):
        return self.lattice.points[i]

    def neighbors(self, i):
        return self.adjacency[i]

    def edges(self):
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if j > i:
                    yield i, j

    def n_edges(self):
        return sum(len(a) for a in self.adjacency) // 2

    def border_vertices(self):
        """Vertices whose window slack is below the threshold; their true
        neighborhoods may be truncated by the window."""
        slacks = self.lattice.slacks()
        return [i for i in range(self.n) if slacks[i] < self.threshold - TOL]

    def border_depths(self) -> np.ndarray:
        """Graph distance of every vertex to the border vertex set."""
        border = self.border_vertices()
        depths = np.full(self.n, -1, dtype=np.int64)
        if not border:
            return np.full(self.n, np.iinfo(np.int64).max, dtype=np.int64)
        q = deque(border)
        for b in border:
            depths[b] = 0
        while q:
            u = q.popleft()
            for v in self.adjacency[u]:
                if depths[v] < 0:
                    depths[v] = depths[u] + 1
                    q.append(v)
        return depths

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "threshold": self.threshold,
            "degree_bound_M": self.degree_bound_M,
            "edges": [[i, j] for i, j in self.edges()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RoughGraph":
        lattice = QuasiLattice.from_json(obj["lattice"])
        adjacency = [[] for _ in lattice.points]
        for i, j in obj["edges"]:
            adjacency[i].append(j)
            adjacency[j].append(i)
        for nbrs in adjacency:
            nbrs.sort()
        return cls(
            lattice=lattice,
            threshold=float(obj["threshold"]),
            adjacency=adjacency,
            degree_bound_M=int(obj["degree_bound_M"]),
        )


# ---------------------------------------------------------------------------
# edge construction (bucketed candidate generation, then exact distances)


def _edges_grid(lattice, threshold):
    # uniform grid, cell = threshold; valid whenever coordinate gaps
    # lower-bound the metric (L1 and L2 both dominate Linf)
    pts = lattice.points
    space = lattice.space
    buckets = {}
    keys = []
    for i, p in enumerate(pts):
        key = tuple(int(math.floor(v / threshold)) for v in p)
        keys.append(key)
        buckets.setdefault(key, []).append(i)
    adjacency = [[] for _ in pts]
    for i, p in enumerate(pts):
        for nb in itertools.product(*[range(k - 1, k + 2) for k in keys[i]]):
            for j in buckets.get(nb, ()):
                if j > i and space.distance(p, pts[j]) <= threshold + TOL:
                    adjacency[i].append(j)
                    adjacency[j].append(i)
    return adjacency


def _edges_h2(lattice, threshold):
    pts = lattice.points
    us = np.array([p[0] for p in pts])
    as_ = np.array([p[1] for p in pts])
    las = np.log(as_)
    rows = {}
    for i, la in enumerate(las):
        rows.setdefault(int(math.floor(la / threshold)), []).append(i)
    row_arrays = {}
    for k, idxs in rows.items():
        idxs = np.array(idxs)
        order = np.argsort(us[idxs], kind="stable")
        row_arrays[k] = idxs[order]
    stretch = (math.exp(threshold) - 1.0) / 2.0  # |du| <= (a1+a2)*stretch
    adjacency = [[] for _ in pts]
    for i in range(len(pts)):
        k0 = int(math.floor(las[i] / threshold))
        for k in (k0 - 1, k0, k0 + 1):
            idxs = row_arrays.get(k)
            if idxs is None:
                continue
            amax = as_[idxs].max()
            w = (as_[i] + amax) * stretch
            lo = np.searchsorted(us[idxs], us[i] - w, side="left")
            hi = np.searchsorted(us[idxs], us[i] + w, side="right")
            cand = idxs[lo:hi]
            d = hyperbolic_distance_arrays(us[i], as_[i], us[cand], as_[cand])
            for j in cand[d <= threshold + TOL]:
                if j > i:
                    adjacency[i].append(int(j))
                    adjacency[int(j)].append(i)
    return adjacency


def _edges_group_ball(lattice, threshold):
    space = lattice.space
    hop_ball = [p for p in word_ball(space, int(math.floor(threshold + TOL)))
                if p != space.identity()]
    adjacency = [[] for _ in lattice.points]
    for i, p in enumerate(lattice.points):
        for g in hop_ball:
            q = space.multiply(p, g)
            if lattice.contains_point(q):
                j = lattice.index_of(q)
                if j != i:
                    adjacency[i].append(j)
    return adjacency


def build_graph(lattice: QuasiLattice, threshold=None) -> RoughGraph:
    """Threshold graph on the lattice; raises on a disconnected result.

    The default threshold is 2r + c + 1; ties at the threshold count as
    edges (1e-9 tolerance).  Disconnection signals an inadequate window or a
    wrong r/c, and the error carries the component sizes.
    """
    if threshold is None:
        threshold = default_threshold(lattice)
    space = lattice.space
    if isinstance(space, (ZdModel, EuclideanModel)):
        adjacency = _edges_grid(lattice, threshold)
    elif isinstance(space, HyperbolicPlaneModel):
        adjacency = _edges_h2(lattice, threshold)
    else:
        adjacency = _edges_group_ball(lattice, threshold)
    for nbrs in adjacency:
        nbrs.sort()
    graph = RoughGraph(
        lattice=lattice,
        threshold=float(threshold),
        adjacency=adjacency,
        degree_bound_M=max((len(a) for a in adjacency), default=0),
    )
    if graph.n:
        sizes = component_sizes(graph)
        if len(sizes) > 1:
            raise DisconnectedGraphError(sizes)
    return graph


def component_sizes(graph) -> list:
    seen = [False] * graph.n
    sizes = []
    for s in range(graph.n):
        if seen[s]:
            continue
        size = 0
        q = deque([s])
        seen[s] = True
        while q:
            u = q.popleft()
            size += 1
            for v in graph.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    q.append(v)
        sizes.append(size)
    return sizes


# ---------------------------------------------------------------------------
# graph metric


def bfs_distances(graph, source, max_nodes=None):
    """Hop distances from a source vertex.

    Returns ``(dist, completed_depth)`` where ``dist`` maps vertex -> hops.
    With ``max_nodes``, expansion stops after the last fully completed layer
    once the visit count exceeds the cap; distances of retained vertices are
    exact.
    """
    dist = {source: 0}
    frontier = [source]
    depth = 0
    while frontier:
        if max_nodes is not None and len(dist) > max_nodes:
            dist = {v: d for v, d in dist.items() if d <= depth}
            return dist, depth
        nxt = []
        depth += 1
        for u in frontier:
            for v in graph.neighbors(u):
                if v not in dist:
                    dist[v] = depth
                    nxt.append(v)
        frontier = nxt
    return dist, depth - 1


def graph_distance(graph, i, j) -> int:
    """BFS shortest-path length between two vertices."""
    if i == j:
        return 0
    dist = {i: 0}
    q = deque([i])
    while q:
        u = q.popleft()
        for v in graph.neighbors(u):
            if v == j:
                return dist[u] + 1
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    raise UnreachableError(f"vertices {i} and {j} are in different components")


# ---------------------------------------------------------------------------
# quasi-isometry certification


def certify_qi(graph: RoughGraph, n_pairs=1000, n_sources=50,
               max_nodes_per_source=4000, seed=0) -> QiConstants:
    """Verify both quasi-isometry inequalities on sampled interior pairs.

    A pair (x, y) is admitted when both endpoints keep boundary slack at
    least d(x,y)/2 + c + r, which guarantees that coarse geodesics between
    them, thickened by the density radius, stay inside the window.  Any
    violating pair raises ``CertificationError`` naming the pair.
    """
    lattice = graph.lattice
    space = graph.space
    c = space.coarse_constant_c
    r = lattice.density_radius_r
    C = 2.0 * r + c + 1.0
    slacks = lattice.slacks()
    rng = np.random.default_rng(seed)
    eligible = np.flatnonzero(slacks >= c + r - TOL)
    if len(eligible) == 0:
        raise CertificationError("no vertex clears the interior margin")
    # draw sources from the deepest-interior vertices, where admissible
    # partners are plentiful
    pool = sorted(eligible, key=lambda i: (-slacks[i], graph.point(int(i))))
    pool = pool[: max(4 * n_sources, 200)]
    pick = rng.permutation(len(pool))[: min(n_sources, len(pool))]
    sources = [pool[k] for k in pick]
    pairs = []
    per_source = max(1, -(-3 * n_pairs // len(sources)))
    for s in sources:
        dist, _ = bfs_distances(graph, int(s), max_nodes=max_nodes_per_source)
        cand = []
        ps = graph.point(int(s))
        for t, dg in dist.items():
            if t == s:
                continue
            d = space.distance(ps, graph.point(t))
            need = d / 2.0 + c + r
            if slacks[s] >= need - TOL and slacks[t] >= need - TOL:
                cand.append((t, d, dg))
        if not cand:
            continue
        take = rng.permutation(len(cand))[:per_source]
        for k in take:
            t, d, dg = cand[k]
            pairs.append((int(s), int(t), d, dg))
    if len(pairs) > n_pairs:
        keep = rng.permutation(len(pairs))[:n_pairs]
        pairs = [pairs[k] for k in keep]
    for s, t, d, dg in pairs:
        if d > C * dg + TOL:
            raise CertificationError(
                "ambient distance exceeds (2r+c+1) * graph distance",
                witness=(graph.point(s), graph.point(t), d, dg),
            )
        if dg > d + c + 1.0 + TOL:
            raise CertificationError(
                "graph distance exceeds ambient distance + c + 1",
                witness=(graph.point(s), graph.point(t), d, dg),
            )
    return QiConstants(
        C=C,
        r=c + 1.0,
        sample_size=len(pairs),
        certified_over=(
            f"{len(pairs)} interior vertex pairs of {space.model_id} graph "
            f"(threshold {graph.threshold:g}, seed {seed})"
        ),
    )


# ---------------------------------------------------------------------------
# exports


def graph_stats(graph: RoughGraph) -> dict:
    degs = [len(a) for a in graph.adjacency]
    return {
        "vertices": graph.n,
        "edges": graph.n_edges(),
        "threshold": graph.threshold,
        "max_degree": max(degs, default=0),
        "mean_degree": float(np.mean(degs)) if degs else 0.0,
        "components": len(component_sizes(graph)) if graph.n else 0,
    }


def to_dot(graph: RoughGraph) -> str:
    """DOT export; vertex labels are the serialized points."""
    lines = ["graph rough {"]
    for i, p in enumerate(graph.lattice.points):
        label = json.dumps(point_to_json(graph.space, p), sort_keys=True)
        lines.append(f'  v{i} [label={json.dumps(label)}];')
    for i, j in graph.edges():
        lines.append(f"  v{i} -- v{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def edge_csv(graph: RoughGraph) -> str:
    """CSV edge list with ambient distances: i, j, d."""
    rows = ["i,j,d"]
    for i, j in graph.edges():
        d = graph.space.distance(graph.point(i), graph.point(j))
        rows.append(f"{i},{j},{d!r}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# implicit infinite graphs


class CayleyGraph:
    """Implicit Cayley graph of a discrete group model (no window).

    Vertices are all group elements; x ~ y when the word distance is at most
    ``threshold`` (default 1: the standard Cayley graph).  Neighborhoods are
    generated on demand by right multiplication, so finite computations on
    it are exact, free of window-border effects.
    """

    def __init__(self, space, threshold=1):
        if not (space.is_discrete and space.is_group):
            raise DomainError("CayleyGraph needs a discrete group model")
        self.space = space
        self.threshold = int(threshold)
        self._hops = [p for p in word_ball(space, self.threshold)
                      if p != space.identity()]

    @property
    def base_vertex(self):
        return self.space.identity()

    def neighbors(self, p):
        mul = self.space.multiply
        return [mul(p, g) for g in self._hops]

    def point(self, p):
        return p

    def ambient_distance(self, p, q):
        return self.space.distance(p, q)


class HorocyclicGraph:
    """Implicit rough graph of the full horocyclic lattice in the half-plane.

    Vertices are coordinate pairs (m, n) standing for the point
    (e^n m, e^n); the edge rule is the usual distance threshold
    2r + c + 1 with r = 1.07, c = 0.  Adjacency has a closed form: with
    cosh d = 1 + |z - z'|^2 / (2 a a'), two vertices at level offset dn are
    adjacent exactly when (m - m' e^dn)^2 <= 2 e^dn (cosh t - cosh dn),
    so neighbor enumeration is pure integer-interval arithmetic.
    """

    def __init__(self, threshold=2 * HOROCYCLIC_DENSITY_RADIUS + 1.0):
        self.space = HyperbolicPlaneModel()
        self.threshold = float(threshold)
        cosht = math.cosh(self.threshold)
        self._dn_max = int(math.floor(self.threshold + TOL))
        self.reach = {}
        for dn in range(-self._dn_max, self._dn_max + 1):
            b2 = 2.0 * math.exp(dn) * (cosht - math.cosh(dn))
            self.reach[dn] = math.sqrt(max(0.0, b2))

    @property
    def base_vertex(self):
        return (0, 0)

    def point(self, v):
        m, n = v
        en = math.exp(n)
        return (en * m, en)

    def ambient_distance(self, v, w):
        return self.space.distance(self.point(v), self.point(w))

    def neighbors(self, v):
        m, n = v
        out = []
        for dn, b in self.reach.items():
            s = math.exp(dn)
            lo = math.ceil((m - b) / s - 1e-9)
            hi = math.floor((m + b) / s + 1e-9)
            for m2 in range(lo, hi + 1):
                if dn != 0 or m2 != m:
                    out.append((m2, n + dn))
        return out
