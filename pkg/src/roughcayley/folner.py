"""c-boundaries and Folner ratios on rough graphs.

The c-boundary of a vertex set A is {x : d(x, A) <= c and d(x, V\\A) <= c}
in the graph metric; the Folner ratio is |boundary| / |A|.  Scans evaluate
a candidate family in increasing size and stop once the ratio drops below
the target.  A finite search can only ever report "not achieved over the
tested family", never non-amenability.

On finite windowed graphs every candidate must keep graph distance > c
from the border vertices, so the windowed boundary equals the boundary in
the unwindowed object.  On the implicit infinite graphs (``CayleyGraph``,
``HorocyclicGraph``) boundaries are exact as computed; integer-coordinate
groups additionally get a vectorised packed-array engine that handles
candidate sets with millions of vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BorderError,
    DomainError,
    UndefinedRatioError,
    WindowTooSmallError,
)
from .graphs import CayleyGraph, HorocyclicGraph, RoughGraph
from .spaces import EuclideanModel, HeisenbergModel, TOL, ZdModel


@dataclass(frozen=True)
class FolnerReport:
    c: float
    family: str
    entries: tuple  # of (descriptor, size, boundary_size, ratio)
    best_ratio: float
    epsilon_target: float
    achieved: bool

    def __post_init__(self):
        if self.entries:
            best = min(e[3] for e in self.entries)
            if abs(best - self.best_ratio) > TOL:
                raise DomainError("best_ratio must be the minimum entry ratio")
        if self.achieved != (self.best_ratio < self.epsilon_target):
            raise DomainError("achieved flag contradicts best_ratio")

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "family": self.family,
            "epsilon_target": self.epsilon_target,
            "achieved": self.achieved,
            "best_ratio": self.best_ratio,
            "entries": [
                {"set": d, "size": s, "boundary": b, "ratio": r}
                for d, s, b, r in self.entries
            ],
        }

    def to_csv(self) -> str:
        rows = ["set,size,boundary,ratio"]
        rows += [f"{d},{s},{b},{r!r}" for d, s, b, r in self.entries]
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# finite windowed graphs


def _interior_check(graph: RoughGraph, A, c):
    depths = graph.border_depths()
    bad = [a for a in A if depths[a] <= c]
    if bad:
        raise BorderError(
            f"set vertices within graph distance {int(c)} of the window "
            f"border: {bad[:8]}{'...' if len(bad) > 8 else ''}"
        )


def _bfs_within(graph: RoughGraph, seeds, c):
    dist = {int(v): 0 for v in seeds}
    frontier = list(dist)
    for depth in range(1, int(c) + 1):
        nxt = []
        for u in frontier:
            for v in graph.neighbors(u):
                if v not in dist:
                    dist[v] = depth
                    nxt.append(v)
        frontier = nxt
    return set(dist)


def c_boundary(graph, A, c):
    """Exact c-boundary of A; vertices within c of both A and its complement.

    Finite graphs demand A inside the certified interior (graph distance
    > c from border vertices) and return sorted vertex ids; implicit graphs
    return a sorted list of vertex coordinates.
    """
    if isinstance(graph, RoughGraph):
        A = sorted(set(int(a) for a in A))
        if not A:
            return []
        _interior_check(graph, A, c)
        a_set = set(A)
        near_a = _bfs_within(graph, A, c)
        comp = [v for v in range(graph.n) if v not in a_set]
        near_comp = _bfs_within(graph, comp, c) if comp else set()
        return sorted(near_a & near_comp)
    return sorted(_implicit_boundary(graph, set(A), c))


def _implicit_boundary(graph, a_set, c):
    outer = set()
    frontier = set(a_set)
    seen = set(a_set)
    for _ in range(int(c)):
        nxt = set()
        for v in frontier:
            for w in graph.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        outer |= nxt - a_set
        frontier = nxt
    inner = set()
    frontier = set(outer)
    seen = set(outer)
    for _ in range(int(c)):
        nxt = set()
        for v in frontier:
            for w in graph.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    nxt.add(w)
        inner |= nxt & a_set
        frontier = nxt
    return outer | inner


def folner_ratio(graph, A, c) -> float:
    """|c-boundary of A| / |A| (the vertex set is its own quasi-lattice)."""
    A = list(A)
    if not A:
        raise UndefinedRatioError("Folner ratio of the empty set")
    return len(c_boundary(graph, A, c)) / len(A)


# ---------------------------------------------------------------------------
# packed engines for integer-coordinate Cayley graphs


class _ZdEngine:
    def __init__(self, d, word_span):
        self.d = d
        self.side = 2 * word_span + 3
        self.half = word_span + 1
        base = 1
        self.bases = []
        for _ in range(d):
            self.bases.append(base)
            base *= self.side
        self.shifts = np.array(
            [b for b in self.bases] + [-b for b in self.bases], dtype=np.int64
        )

    def pack(self, pts):
        arr = np.asarray(pts, dtype=np.int64).reshape(-1, self.d)
        out = np.zeros(len(arr), dtype=np.int64)
        for i, b in enumerate(self.bases):
            out += (arr[:, i] + self.half) * b
        return out

    def origin(self):
        return self.pack([(0,) * self.d])

    def expand(self, arr):
        return (arr[:, None] + self.shifts[None, :]).ravel()

    def box(self, n):
        axes = [np.arange(-n, n + 1)] * self.d
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return np.sort(self.pack(pts))


class _HeisenbergEngine:
    def __init__(self, word_span):
        self.L = word_span + 2
        self.Q = word_span * word_span // 4 + word_span + 2
        self.side = 2 * self.L + 1

    def pack(self, pts):
        arr = np.asarray(pts, dtype=np.int64).reshape(-1, 3)
        return ((arr[:, 0] + self.L)
                + self.side * ((arr[:, 1] + self.L)
                               + self.side * (arr[:, 2] + self.Q)))

    def origin(self):
        return self.pack([(0, 0, 0)])

    def expand(self, arr):
        a = arr % self.side - self.L
        # x moves shift the first coordinate; y moves shift the second and
        # add +-a to the third
        ystep = self.side * (1 + self.side * a)
        return np.concatenate([arr + 1, arr - 1, arr + ystep, arr - ystep])

    def box(self, n):
        h = max(1, n * n)
        a = np.arange(-n, n + 1)
        b = np.arange(-n, n + 1)
        cc = np.arange(-h, h + 1)
        g = np.meshgrid(a, b, cc, indexing="ij")
        pts = np.stack([x.ravel() for x in g], axis=1)
        return np.sort(self.pack(pts))


def _packed_engine(graph, word_span):
    if not isinstance(graph, CayleyGraph):
        return None
    if isinstance(graph.space, ZdModel):
        return _ZdEngine(graph.space.d, word_span)
    if isinstance(graph.space, HeisenbergModel):
        return _HeisenbergEngine(word_span)
    return None


def _packed_closure(engine, arr, steps):
    out = arr
    for _ in range(int(steps)):
        out = np.union1d(out, np.unique(engine.expand(out)))
    return out


def _packed_boundary_size(engine, a_sorted, word_steps):
    grown = _packed_closure(engine, a_sorted, word_steps)
    outer = np.setdiff1d(grown, a_sorted, assume_unique=True)
    igrow = _packed_closure(engine, outer, word_steps)
    inner = np.intersect1d(igrow, a_sorted, assume_unique=True)
    return len(outer) + len(inner)


def _packed_ball(engine, word_radius):
    visited = engine.origin()
    frontier = visited.copy()
    for _ in range(int(word_radius)):
        nb = np.unique(engine.expand(frontier))
        new = nb[~np.isin(nb, visited, assume_unique=True)]
        visited = np.union1d(visited, new)
        frontier = new
    return visited


# ---------------------------------------------------------------------------
# vectorised engine for the horocyclic implicit graph: vertex sets live as
# {level n: sorted array of m}; one hop expands each level through the
# closed-form integer intervals of the adjacency rule


class _HoroEngine:
    def __init__(self, graph: HorocyclicGraph):
        self.reach = graph.reach

    @staticmethod
    def from_vertices(vertices):
        levels = {}
        for m, n in vertices:
            levels.setdefault(n, []).append(m)
        return {n: np.unique(np.asarray(ms, dtype=np.int64))
                for n, ms in levels.items()}

    @staticmethod
    def size(levels):
        return sum(len(a) for a in levels.values())

    def expand(self, levels):
        out = {n: [arr] for n, arr in levels.items()}
        for n, arr in levels.items():
            if not len(arr):
                continue
            for dn, b in self.reach.items():
                s = math.exp(dn)
                lo = np.ceil((arr - b) / s - 1e-9).astype(np.int64)
                hi = np.floor((arr + b) / s + 1e-9).astype(np.int64)
                wmax = int((hi - lo).max())
                if wmax < 0:
                    continue
                offs = np.arange(wmax + 1, dtype=np.int64)
                cand = lo[:, None] + offs[None, :]
                vals = cand[cand <= hi[:, None]]
                if len(vals):
                    out.setdefault(n + dn, []).append(vals)
        return {n: np.unique(np.concatenate(parts))
                for n, parts in out.items()}

    @staticmethod
    def diff(A, B):
        empty = np.empty(0, dtype=np.int64)
        out = {}
        for n, arr in A.items():
            d = np.setdiff1d(arr, B.get(n, empty), assume_unique=True)
            if len(d):
                out[n] = d
        return out

    @staticmethod
    def intersect(A, B):
        empty = np.empty(0, dtype=np.int64)
        out = {}
        for n, arr in A.items():
            d = np.intersect1d(arr, B.get(n, empty), assume_unique=True)
            if len(d):
                out[n] = d
        return out

    def ball(self, k):
        levels = {0: np.zeros(1, dtype=np.int64)}
        for _ in range(int(k)):
            levels = self.expand(levels)
        return levels

    def box(self, j):
        out = {}
        for n in range(-j, j + 1):
            m_max = int(math.floor(math.exp(j - n) + TOL))
            out[n] = np.arange(-m_max, m_max + 1, dtype=np.int64)
        return out

    def boundary_size(self, A, c):
        grown = A
        for _ in range(int(c)):
            grown = self.expand(grown)
        outer = self.diff(grown, A)
        igrow = outer
        for _ in range(int(c)):
            igrow = self.expand(igrow)
        inner = self.intersect(igrow, A)
        return self.size(outer) + self.size(inner)


# ---------------------------------------------------------------------------
# candidate families


def _implicit_ball(graph, center, radius):
    dist = {center: 0}
    frontier = [center]
    for depth in range(1, radius + 1):
        nxt = []
        for u in frontier:
            for v in graph.neighbors(u):
                if v not in dist:
                    dist[v] = depth
                    nxt.append(v)
        frontier = nxt
    return set(dist)


def _finite_center(graph: RoughGraph):
    depths = graph.border_depths()
    best = max(depths)
    return min((i for i in range(graph.n) if depths[i] == best),
               key=lambda i: graph.point(i))


def _finite_ball(graph: RoughGraph, center, radius):
    return sorted(_implicit_ball(graph, center, radius))


def _finite_box(graph: RoughGraph, center, n):
    space = graph.space
    if not isinstance(space, (ZdModel, EuclideanModel)):
        raise DomainError(f"box candidates are undefined for {space.model_id}")
    c0 = graph.point(center)
    out = [i for i, p in enumerate(graph.lattice.points)
           if max(abs(v - w) for v, w in zip(p, c0)) <= n + TOL]
    return out


def folner_scan(graph, c, family, epsilon, schedule, center=None,
                swap_budget_factor=10) -> FolnerReport:
    """Evaluate a Folner candidate family in increasing size.

    ``family`` is one of ``metric_balls``, ``boxes``, ``greedy_improved``;
    the schedule lists ball radii or box sizes.  Evaluation stops early once
    a ratio beats epsilon.  Candidates that do not fit the certified
    interior of a finite graph are skipped; if none fits at all the scan
    raises ``WindowTooSmallError``.
    """
    if family not in ("metric_balls", "boxes", "greedy_improved"):
        raise DomainError(f"unknown Folner family {family!r}")
    schedule = sorted(int(s) for s in schedule)
    if not schedule:
        raise WindowTooSmallError("empty candidate schedule")
    if isinstance(graph, RoughGraph):
        entries = _scan_finite(graph, c, family, epsilon, schedule, center,
                               swap_budget_factor)
    else:
        entries = _scan_implicit(graph, c, family, epsilon, schedule, center)
    if not entries:
        raise WindowTooSmallError(
            "no candidate of the requested family fits the certified interior"
        )
    best = min(e[3] for e in entries)
    return FolnerReport(
        c=float(c),
        family=family,
        entries=tuple(entries),
        best_ratio=best,
        epsilon_target=float(epsilon),
        achieved=best < epsilon,
    )


def _scan_finite(graph, c, family, epsilon, schedule, center, swap_factor):
    if center is None:
        center = _finite_center(graph)
    depths = graph.border_depths()
    entries = []
    base_family = "metric_balls" if family == "greedy_improved" else family
    best_set = None
    for size in schedule:
        if base_family == "metric_balls":
            A = _finite_ball(graph, center, size)
            desc = f"ball:{size}"
        else:
            A = _finite_box(graph, center, size)
            desc = f"box:{size}"
        if not A or any(depths[a] <= c for a in A):
            continue  # candidate leaks past the certified interior
        ratio = folner_ratio(graph, A, c)
        entries.append((desc, len(A), len(c_boundary(graph, A, c)), ratio))
        if best_set is None or ratio < min(e[3] for e in entries[:-1]):
            best_set = A
        if ratio < epsilon:
            break
    if family == "greedy_improved" and entries and best_set is not None:
        entries.append(_greedy_improve(graph, c, best_set, swap_factor, depths))
    return entries


def _greedy_improve(graph, c, A, swap_factor, depths):
    """Single-vertex hill climbing from the best ball: first-improvement
    swaps (drop a boundary vertex or adopt an outer one) in deterministic
    vertex order, with a 10|A| attempt budget."""
    current = set(A)
    ratio = folner_ratio(graph, sorted(current), c)
    budget = swap_factor * len(current)
    improved = True
    while improved and budget > 0:
        improved = False
        boundary = c_boundary(graph, sorted(current), c)
        inner = [v for v in boundary if v in current and len(current) > 1]
        outer = [v for v in boundary
                 if v not in current and depths[v] > c]
        for v in inner + outer:
            if budget <= 0:
                break
            budget -= 1
            trial = set(current)
            if v in trial:
                trial.remove(v)
            else:
                trial.add(v)
            try:
                trial_ratio = folner_ratio(graph, sorted(trial), c)
            except (BorderError, UndefinedRatioError):
                continue
            if trial_ratio < ratio - TOL:
                current = trial
                ratio = trial_ratio
                improved = True
                break
    size = len(current)
    bsize = len(c_boundary(graph, sorted(current), c))
    return (f"greedy:{size}", size, bsize, ratio)


def _scan_implicit(graph, c, family, epsilon, schedule, center):
    if family == "greedy_improved":
        raise DomainError("greedy_improved needs a finite windowed graph")
    if isinstance(graph, HorocyclicGraph):
        return _scan_horocyclic(graph, c, family, epsilon, schedule)
    word_hop = getattr(graph, "threshold", 1)
    engine = None
    if isinstance(graph, CayleyGraph):
        span = (max(schedule) + int(c) + 2) * int(word_hop)
        engine = _packed_engine(graph, span)
    entries = []
    if center is None:
        center = graph.base_vertex
    for size in schedule:
        if family == "metric_balls":
            desc = f"ball:{size}"
            if engine is not None:
                A = _packed_ball(engine, size * int(word_hop))
                bsize = _packed_boundary_size(engine, A,
                                              int(c) * int(word_hop))
                entries.append((desc, len(A), bsize, bsize / len(A)))
                if bsize / len(A) < epsilon:
                    break
                continue
            A = _implicit_ball(graph, center, size)
        else:
            if engine is None:
                raise DomainError(
                    "box candidates are undefined for this implicit graph"
                )
            Ap = engine.box(size)
            bsize = _packed_boundary_size(engine, Ap, int(c) * int(word_hop))
            entries.append((f"box:{size}", len(Ap), bsize, bsize / len(Ap)))
            if bsize / len(Ap) < epsilon:
                break
            continue
        boundary = _implicit_boundary(graph, A, c)
        ratio = len(boundary) / len(A)
        entries.append((desc, len(A), len(boundary), ratio))
        if ratio < epsilon:
            break
    return entries


def _scan_horocyclic(graph, c, family, epsilon, schedule):
    engine = _HoroEngine(graph)
    entries = []
    for size in schedule:
        if family == "metric_balls":
            A = engine.ball(size)
            desc = f"ball:{size}"
        else:
            A = engine.box(size)
            desc = f"box:{size}"
        n = engine.size(A)
        bsize = engine.boundary_size(A, c)
        entries.append((desc, n, bsize, bsize / n))
        if bsize / n < epsilon:
            break
    return entries
