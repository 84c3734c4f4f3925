import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crnlap import build_digraph, build_network

SAMPLE_DIR = Path(__file__).parent.parent / "sample_networks"


def running_example_graph(k12=1, k21=1, k23=1, k31=1):
    """Three-vertex strongly connected graph: 1->2, 2->1, 2->3, 3->1."""
    return build_digraph(
        ["1", "2", "3"],
        [
            ("1", "2", Fraction(k12)),
            ("2", "1", Fraction(k21)),
            ("2", "3", Fraction(k23)),
            ("3", "1", Fraction(k31)),
        ],
    )


PLANAR_Y = [[2, 0, 1], [1, 2, 0]]  # y(1)=(2,1), y(2)=(0,2), y(3)=(1,0)


@pytest.fixture
def running_graph():
    return running_example_graph()


@pytest.fixture
def cycle3_net():
    """Unit-rate 3-cycle 1->2->3->1 carrying the planar complexes."""
    g = build_digraph(
        ["1", "2", "3"],
        [("1", "2", Fraction(1)), ("2", "3", Fraction(1)), ("3", "1", Fraction(1))],
    )
    return build_network(["X1", "X2"], PLANAR_Y, g)


@pytest.fixture
def triangle_net():
    """Running example graph with the planar complexes, unit rates."""
    return build_network(["X1", "X2"], PLANAR_Y, running_example_graph())


@pytest.fixture
def two_component_net():
    """Planar complexes plus a second linkage class 4 <-> 5."""
    g = build_digraph(
        ["1", "2", "3", "4", "5"],
        [
            ("1", "2", Fraction(1)),
            ("2", "3", Fraction(1)),
            ("3", "1", Fraction(1)),
            ("4", "5", Fraction(1)),
            ("5", "4", Fraction(1)),
        ],
    )
    y = [[2, 0, 1, 0, 1], [1, 2, 0, 0, 1]]
    return build_network(["X1", "X2"], y, g)


@pytest.fixture
def xy_net():
    """X1 <-> X2: one conservation law (dim S = 1 < n = 2)."""
    g = build_digraph(["1", "2"], [("1", "2", Fraction(1)), ("2", "1", Fraction(1))])
    return build_network(["X1", "X2"], [[1, 0], [0, 1]], g)


@pytest.fixture
def dimer_net():
    """X <-> 2X with unit rates; S = R, equilibrium at x = 1."""
    g = build_digraph(["1", "2"], [("1", "2", Fraction(1)), ("2", "1", Fraction(1))])
    return build_network(["X"], [[1, 2]], g)
