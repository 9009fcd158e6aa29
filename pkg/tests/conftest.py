import pytest

from ralp.encoder import DegreeDistribution
from ralp.interleaver import build_matching, matching_to_interleaver


@pytest.fixture(scope="session")
def built_256():
    """Greedy (q=4, n=256) matching: (graph, measured girth, interleaver)."""
    graph, meas = build_matching(4, 64, policy="paper_greedy")
    return graph, meas, matching_to_interleaver(graph)


@pytest.fixture(scope="session")
def built_1024():
    """Greedy (q=4, n=1024) matching, girth 4: deeper witness windows."""
    graph, meas = build_matching(4, 256, policy="paper_greedy")
    return graph, meas, matching_to_interleaver(graph)


@pytest.fixture(scope="session")
def dd_q4_k64():
    return DegreeDistribution.regular(4, 64)
