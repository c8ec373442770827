import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from roughcayley import (
    BallWindow,
    QuasiLattice,
    ZdModel,
    build_graph,
)


def make_even_lattice(radius):
    """Even integers in a zd(1) ball window, with the exact density radius 1."""
    z1 = ZdModel(1)
    return QuasiLattice(
        space=z1,
        window=BallWindow(radius),
        points=[(k,) for k in range(-radius, radius + 1) if k % 2 == 0],
        separation_delta=2.0,
        density_radius_r=1.0,
        construction="greedy",
    )


@pytest.fixture(scope="session")
def even_graph_100():
    return build_graph(make_even_lattice(100))
