import math

import numpy as np
import pytest

from ralp.encoder import GroupedInterleaver
from ralp.interleaver import (
    HyperGraphLine,
    ball_size_bound_covered,
    ball_size_bound_uncovered,
    build_matching,
    girth,
    interleaver_to_line,
    load_interleaver,
    matching_to_interleaver,
    no_short_cycle_through,
    random_interleaver,
    restricted_distance_ball,
    save_interleaver,
)


def test_ball_on_plain_line():
    g = HyperGraphLine(9)
    ball = restricted_distance_ball(g, 5, 2)
    assert ball == {3, 4, 5, 6, 7}
    assert len(ball) == 5


def test_ball_no_uturn():
    # From an endpoint the only depth-2 vertex is straight ahead.
    g = HyperGraphLine(5)
    assert restricted_distance_ball(g, 1, 2) == {1, 2, 3}


def test_ball_through_hyperedge():
    g = HyperGraphLine(12, hyperedges=[(1, 6, 11)])
    ball = restricted_distance_ball(g, 1, 2)
    # 1 -line- 2 -line- 3, 1 -hyper- {6,11} then one line step each way.
    assert ball == {1, 2, 3, 6, 11, 5, 7, 10, 12}


def test_girth_pure_cycle_is_n():
    g = HyperGraphLine(17, cyclic=True)
    assert girth(g) == 17


def test_girth_line_acyclic():
    assert girth(HyperGraphLine(9)) == math.inf


def test_girth_adjacent_pair_hyperedge():
    g = HyperGraphLine(9, hyperedges=[(4, 5)])
    assert girth(g) == 2


def test_girth_spread_hyperedges():
    # 1-X-7, line 7..8, X 8..2, line 2..1 closes in 4.
    g = HyperGraphLine(24, hyperedges=[(1, 7, 13, 19), (2, 8, 14, 20),
                                       (3, 9, 15, 21), (4, 10, 16, 22),
                                       (5, 11, 17, 23), (6, 12, 18, 24)])
    assert girth(g) == 4
    assert girth(g, upper=4) == math.inf
    assert girth(g, upper=5) == 4


def test_girth_upper_cap():
    g = HyperGraphLine(9, hyperedges=[(4, 5)])
    assert girth(g, upper=2) == math.inf
    assert girth(g, upper=3) == 2


def test_no_short_cycle_through_matches_girth():
    g = HyperGraphLine(24, hyperedges=[(1, 7, 13, 19), (2, 8, 14, 20)])
    t = 0
    assert no_short_cycle_through(g, t, 4)
    assert not no_short_cycle_through(HyperGraphLine(9, hyperedges=[(4, 5)]), 0, 3)


def test_matching_bookkeeping():
    g = HyperGraphLine(9, hyperedges=[(1, 4, 7)])
    assert g.cover_of(4) == 0 and g.cover_of(2) == -1
    assert g.is_matching()
    with pytest.raises(ValueError):
        g.add_hyperedge((4, 8, 9))  # 4 already covered
    g.add_hyperedge((2, 5, 8))
    g.remove_hyperedge(0)
    assert g.cover_of(1) == -1 and g.cover_of(5) == 0  # swapped into slot 0
    assert g.uncovered() == [1, 3, 4, 6, 7, 9]


@pytest.mark.parametrize("q,k", [(3, 27), (4, 64)])
def test_greedy_construction_girth(q, k):
    n = q * k
    target = 0
    m = n
    while q ** (target + 1) <= n:
        target += 1
    target -= 1
    graph, meas = build_matching(q, k, policy="paper_greedy")
    assert len(graph.hyperedges) == k
    assert graph.is_matching()
    assert not graph.cyclic
    assert meas >= target
    # Independent oracle agrees with the reported girth.
    assert girth(graph) == meas


def test_greedy_validated_small():
    # Per-step validation (condition 1 + incremental girth) on the smallest case.
    graph, meas = build_matching(3, 27, policy="paper_greedy", validate=True)
    assert meas >= 3


def test_greedy_edge_removal_kept_girth():
    graph, meas = build_matching(3, 27, policy="paper_greedy")
    cyc = graph.copy()
    cyc.cyclic = True
    assert girth(cyc) <= meas  # removing the cycle edge never lowered girth


def test_greedy_ball_bounds_hold():
    q = 3
    graph, _ = build_matching(q, 27, policy="paper_greedy")
    g = 3
    for v in range(1, graph.n + 1):
        ball = restricted_distance_ball(graph, v, g - 1)
        if graph.cover_of(v) == -1:
            assert len(ball) <= ball_size_bound_uncovered(q, g)
        else:
            assert len(ball) <= ball_size_bound_covered(q, g)


def test_greedy_preconditions():
    with pytest.raises(ValueError):
        build_matching(2, 100, policy="paper_greedy")
    with pytest.raises(ValueError):
        build_matching(3, 8, policy="paper_greedy")  # n < q^4
    with pytest.raises(ValueError):
        build_matching(3, 27, policy="nonsense")


def test_random_policy_reports_girth():
    graph, meas = build_matching(4, 8, policy="random",
                                 rng=np.random.default_rng(9))
    assert len(graph.hyperedges) == 8
    assert graph.is_matching()
    assert meas == girth(graph)


def test_matching_to_interleaver_round_trip():
    graph = HyperGraphLine(9, hyperedges=[(2, 6, 7), (3, 4, 8), (1, 5, 9)])
    il = matching_to_interleaver(graph)
    assert il.groups == ((1, 5, 9), (2, 6, 7), (3, 4, 8))
    back = interleaver_to_line(il)
    assert matching_to_interleaver(back).groups == il.groups
    assert sorted(v for grp in il.groups for v in grp) == list(range(1, 10))


def test_matching_to_interleaver_requires_cover():
    g = HyperGraphLine(9, hyperedges=[(1, 4, 7)])
    with pytest.raises(ValueError):
        matching_to_interleaver(g)


def test_random_interleaver_irregular():
    il, meas = random_interleaver([2, 4, 4, 2], np.random.default_rng(3))
    assert tuple(len(grp) for grp in il.groups) == (2, 4, 4, 2)
    assert meas >= 2


def test_interleaver_file_round_trip(tmp_path):
    graph, meas = build_matching(3, 27, policy="paper_greedy")
    il = matching_to_interleaver(graph)
    path = tmp_path / "il.txt"
    save_interleaver(il, meas, path)
    il2, g2 = load_interleaver(path)
    assert il2.groups == il.groups
    assert g2 == meas
    header = path.read_text().splitlines()[0]
    assert header == f"RA-IL v1 k=27 n=81 girth={meas}"


def test_interleaver_file_rejects_non_partition(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("RA-IL v1 k=2 n=4 girth=2\n2 1 2\n2 2 3\n")
    with pytest.raises(ValueError):
        load_interleaver(path)
    path.write_text("garbage\n")
    with pytest.raises(ValueError):
        load_interleaver(path)


def test_grouped_interleaver_compat():
    graph, _ = build_matching(3, 27, policy="paper_greedy")
    il = matching_to_interleaver(graph)
    assert isinstance(il, GroupedInterleaver)
    assert il.degrees.degrees == (3,) * 27
