import math

import numpy as np
import pytest

from roughcayley import (
    BallWindow,
    CayleyGraph,
    FreeGroupModel,
    HeisenbergModel,
    HorocyclicGraph,
    ZdModel,
    build_graph,
    c_boundary,
    folner_ratio,
    folner_scan,
    group_ball_lattice,
)
from roughcayley.errors import (
    BorderError,
    DomainError,
    UndefinedRatioError,
    WindowTooSmallError,
)
from roughcayley.folner import FolnerReport, _implicit_boundary

from conftest import make_even_lattice
from oracles import literal_c_boundary


@pytest.fixture(scope="module")
def z_line():
    # unit integer lattice with nearest-neighbour edges
    return build_graph(group_ball_lattice(ZdModel(1), 20), threshold=1.0)


def test_z_line_boundary_example(z_line):
    g = z_line
    lat = g.lattice
    A = [lat.index_of((k,)) for k in range(-10, 11)]
    boundary = c_boundary(g, A, 1)
    assert sorted(g.point(i) for i in boundary) == [(-11,), (-10,), (10,), (11,)]
    assert folner_ratio(g, A, 1) == pytest.approx(4 / 21)


def test_empty_set_semantics(z_line):
    assert c_boundary(z_line, [], 1) == []
    with pytest.raises(UndefinedRatioError):
        folner_ratio(z_line, [], 1)


def test_single_vertex_ratio(z_line):
    lat = z_line.lattice
    assert folner_ratio(z_line, [lat.index_of((0,))], 1) >= 1.0


def test_boundary_monotone_in_c(z_line):
    lat = z_line.lattice
    A = [lat.index_of((k,)) for k in range(-8, 9)]
    b1 = set(c_boundary(z_line, A, 1))
    b2 = set(c_boundary(z_line, A, 2))
    assert b1 <= b2


def test_boundary_complement_symmetry(z_line):
    g = z_line
    lat = g.lattice
    A = [lat.index_of((k,)) for k in range(-6, 7)]
    comp = [i for i in range(g.n) if i not in set(A)]
    interior = {i for i in range(g.n)
                if abs(g.point(i)[0]) <= 17}  # depth > c from the border
    ours = set(c_boundary(g, A, 2)) & interior
    theirs = set(literal_c_boundary(g, comp, 2)) & interior
    assert ours == theirs


def test_boundary_preconditions(z_line):
    lat = z_line.lattice
    with pytest.raises(BorderError):
        c_boundary(z_line, [lat.index_of((20,))], 1)


def test_matches_literal_double_loop():
    rng = np.random.default_rng(17)
    graphs = [
        build_graph(group_ball_lattice(ZdModel(1), 12), threshold=1.0),
        build_graph(make_even_lattice(30)),
        build_graph(group_ball_lattice(ZdModel(2), 7)),
    ]
    checked = 0
    while checked < 6:
        g = graphs[rng.integers(0, len(graphs))]
        c = int(rng.integers(1, 3))
        depths = g.border_depths()
        deep = [i for i in range(g.n) if depths[i] > c]
        if len(deep) < 2:
            continue
        size = int(rng.integers(1, max(2, len(deep) // 2)))
        A = sorted(int(v) for v in rng.choice(deep, size=size, replace=False))
        assert c_boundary(g, A, c) == literal_c_boundary(g, A, c)
        checked += 1


def test_translation_invariance_on_implicit_lattice():
    cay = CayleyGraph(ZdModel(2))
    box = {(x, y) for x in range(-4, 5) for y in range(-4, 5)}
    shifted = {(x + 3, y + 5) for x, y in box}
    r1 = len(_implicit_boundary(cay, box, 1)) / len(box)
    r2 = len(_implicit_boundary(cay, shifted, 1)) / len(shifted)
    assert r1 == r2


def test_free_group_closed_form_ratios():
    cay = CayleyGraph(FreeGroupModel(2))
    report = folner_scan(cay, 1, "metric_balls", 0.4, range(1, 7))
    for desc, size, boundary, ratio in report.entries:
        j = int(desc.split(":")[1])
        assert size == 2 * 3 ** j - 1
        expected = 16 * 3 ** (j - 1)
        assert boundary == expected
        assert ratio == expected / size
    assert not report.achieved
    entry5 = report.entries[4]
    assert entry5[2] >= entry5[1] / 2  # tree boundary dominance at radius 5


def test_packed_engine_matches_python_sets():
    cay = CayleyGraph(ZdModel(2))
    report = folner_scan(cay, 1, "boxes", 1e-9, [4])
    desc, size, boundary, _ = report.entries[0]
    box = {(x, y) for x in range(-4, 5) for y in range(-4, 5)}
    assert size == len(box)
    assert boundary == len(_implicit_boundary(cay, box, 1))
    heis = CayleyGraph(HeisenbergModel())
    rep_b = folner_scan(heis, 1, "metric_balls", 1e-9, [3])
    ball = rep_b.entries[0]
    dist = {(0, 0, 0): 0}
    frontier = [(0, 0, 0)]
    for _ in range(3):
        nxt = []
        for p in frontier:
            for q in heis.neighbors(p):
                if q not in dist:
                    dist[q] = 1
                    nxt.append(q)
        frontier = nxt
    assert ball[1] == len(dist) == 53
    assert ball[2] == len(_implicit_boundary(heis, set(dist), 1))


def test_horocyclic_engine_matches_python_sets():
    hg = HorocyclicGraph()
    report = folner_scan(hg, 1, "metric_balls", 1e-9, [1, 2])
    sizes = {int(d.split(":")[1]): (s, b) for d, s, b, _ in report.entries}
    ball1 = set(hg.neighbors((0, 0))) | {(0, 0)}
    assert sizes[1][0] == len(ball1)
    assert sizes[1][1] == len(_implicit_boundary(hg, ball1, 1))


def test_scan_achieved_and_early_stop(z_line):
    report = folner_scan(z_line, 1, "metric_balls", 0.3, range(1, 18))
    assert report.achieved
    # stops at the first radius k with 4/(2k+1) < 0.3, i.e. k = 7
    assert report.entries[-1][0] == "ball:7"
    assert report.best_ratio == pytest.approx(4 / 15)


def test_scan_window_too_small(z_line):
    with pytest.raises(WindowTooSmallError):
        folner_scan(z_line, 25, "metric_balls", 0.1, [1, 2, 3])


def test_greedy_improved_does_not_worsen():
    g = build_graph(group_ball_lattice(ZdModel(2), 12), threshold=1.0)
    balls = folner_scan(g, 1, "metric_balls", 1e-9, range(1, 7))
    improved = folner_scan(g, 1, "greedy_improved", 1e-9, range(1, 7))
    assert improved.best_ratio <= balls.best_ratio + 1e-12


def test_report_invariants():
    with pytest.raises(DomainError):
        FolnerReport(c=1.0, family="boxes", entries=(("box:1", 9, 8, 8 / 9),),
                     best_ratio=0.5, epsilon_target=1.0, achieved=True)
    with pytest.raises(DomainError):
        FolnerReport(c=1.0, family="boxes", entries=(("box:1", 9, 8, 8 / 9),),
                     best_ratio=8 / 9, epsilon_target=1.0, achieved=False)


def test_greedy_improved_rejected_on_implicit():
    with pytest.raises(DomainError):
        folner_scan(CayleyGraph(ZdModel(2)), 1, "greedy_improved", 0.1, [2])