"""High-girth hyperedge matchings on a Hamiltonian line.

A hypergraph here is a line (or cycle, while under construction) of n
vertices g_1..g_n plus q-tuples of vertices ("hyperedges") forming a
matching: no vertex in more than one hyperedge.  Paths never traverse the
same (hyper)edge twice in a row: no U-turns on line edges and no roundabouts
inside a hyperedge.  Girth is the length of the shortest cycle under that
rule, counting every edge (line or hyper) as length 1.

The greedy construction grows the matching one hyperedge per step, keeping
girth >= g = floor(log_q n) - 1 throughout; when no q uncovered vertices are
pairwise far apart it rewires q existing hyperedges against fresh far-apart
vertices before adding the new edge.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .encoder import GroupedInterleaver

_BIG = 1 << 30


class HyperGraphLine:
    """Hamiltonian line/cycle plus a (partial) matching of hyperedges.

    Vertices are 1-based.  Line edge i joins g_i and g_{i+1}; in cyclic mode
    edge n joins g_n and g_1.  Edge ids: line edge i -> i, hyperedge with
    list index t -> n + 1 + t.
    """

    def __init__(self, n: int, cyclic: bool = False, hyperedges=()):
        if n < 2:
            raise ValueError("need at least two vertices")
        self.n = int(n)
        self.cyclic = bool(cyclic)
        self.hyperedges: list[tuple[int, ...]] = []
        self._cover = [-1] * (self.n + 1)
        for edge in hyperedges:
            self.add_hyperedge(edge)

    def copy(self) -> "HyperGraphLine":
        return HyperGraphLine(self.n, self.cyclic, list(self.hyperedges))

    def add_hyperedge(self, edge):
        edge = tuple(sorted(int(v) for v in edge))
        if len(set(edge)) != len(edge) or len(edge) < 2:
            raise ValueError(f"bad hyperedge {edge}")
        for v in edge:
            if not 1 <= v <= self.n:
                raise ValueError(f"vertex {v} out of range")
            if self._cover[v] != -1:
                raise ValueError(f"vertex {v} already covered by a hyperedge")
        idx = len(self.hyperedges)
        self.hyperedges.append(edge)
        for v in edge:
            self._cover[v] = idx

    def remove_hyperedge(self, idx: int):
        last = len(self.hyperedges) - 1
        for v in self.hyperedges[idx]:
            self._cover[v] = -1
        if idx != last:
            moved = self.hyperedges[last]
            self.hyperedges[idx] = moved
            for v in moved:
                self._cover[v] = idx
        self.hyperedges.pop()

    def cover_of(self, v: int) -> int:
        """Index of the hyperedge covering v, or -1."""
        return self._cover[v]

    def uncovered(self) -> list[int]:
        return [v for v in range(1, self.n + 1) if self._cover[v] == -1]

    def line_neighbors(self, v: int):
        """(neighbor, line-edge id) pairs of v."""
        out = []
        if v > 1:
            out.append((v - 1, v - 1))
        elif self.cyclic:
            out.append((self.n, self.n))
        if v < self.n:
            out.append((v + 1, v))
        elif self.cyclic:
            out.append((1, self.n))
        return out

    def neighbors(self, v: int):
        """All (neighbor, edge id) moves from v, hyperedge members included."""
        out = self.line_neighbors(v)
        t = self._cover[v]
        if t != -1:
            eid = self.n + 1 + t
            out.extend((u, eid) for u in self.hyperedges[t] if u != v)
        return out

    def is_matching(self) -> bool:
        """Condition 1: no vertex on more than one hyperedge (cover consistency)."""
        seen = [0] * (self.n + 1)
        for edge in self.hyperedges:
            for v in edge:
                seen[v] += 1
        if any(c > 1 for c in seen[1:]):
            return False
        for v in range(1, self.n + 1):
            t = self._cover[v]
            if t == -1:
                if seen[v] != 0:
                    return False
            elif v not in self.hyperedges[t]:
                return False
        return True


def restricted_distances(graph: HyperGraphLine, z: int, radius: int) -> dict[int, int]:
    """Shortest no-immediate-edge-reuse distances from z, up to ``radius``.

    BFS over (vertex, last edge used) states; a vertex's distance is the
    first level at which any such state reaches it.
    """
    dist = {z: 0}
    if radius <= 0:
        return dist
    frontier = [(z, -1)]
    seen = {(z, -1)}
    depth = 0
    while frontier and depth < radius:
        depth += 1
        nxt = []
        for v, last in frontier:
            for u, eid in graph.neighbors(v):
                if eid == last:
                    continue
                state = (u, eid)
                if state in seen:
                    continue
                seen.add(state)
                if u not in dist:
                    dist[u] = depth
                nxt.append(state)
        frontier = nxt
    return dist


def restricted_distance_ball(graph: HyperGraphLine, z: int, r: int) -> set[int]:
    """All vertices within restricted distance r of z."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    return set(restricted_distances(graph, z, r))


def _shortest_cycle_from(graph: HyperGraphLine, root: int, first_eid: int,
                         starts, cap: int):
    """Shortest valid closed walk root -> root starting with edge ``first_eid``.

    ``starts`` lists the vertices reached by that first step.  The closing
    edge must differ from the last edge used and from the first edge (the
    cycle is rotation-valid).  Only cycles shorter than ``cap`` are reported.
    """
    frontier = [(u, first_eid) for u in starts]
    seen = set(frontier)
    depth = 1
    while frontier and depth + 1 < cap:
        depth += 1
        nxt = []
        for v, last in frontier:
            for u, eid in graph.neighbors(v):
                if eid == last:
                    continue
                if u == root and eid != first_eid:
                    return depth
                state = (u, eid)
                if state not in seen:
                    seen.add(state)
                    nxt.append(state)
        frontier = nxt
    return None


def girth(graph: HyperGraphLine, upper: int | None = None):
    """Length of the shortest cycle, or math.inf when the graph is acyclic.

    With ``upper`` given, only cycles strictly shorter than ``upper`` are
    searched; math.inf means "no cycle shorter than upper".
    """
    if not graph.hyperedges:
        if not graph.cyclic:
            return math.inf
        if upper is not None and graph.n >= upper:
            return math.inf
        return graph.n
    # Seed the search: a hyperedge plus the line arc between two members.
    best = math.inf
    for edge in graph.hyperedges:
        for a, b in zip(edge, edge[1:]):
            best = min(best, b - a + 1)
        if graph.cyclic:
            best = min(best, graph.n - (edge[-1] - edge[0]) + 1)
    cap = best + 1 if upper is None else min(best + 1, upper)
    for root in range(1, graph.n + 1):
        moves = graph.neighbors(root)
        for eid in sorted({e for _, e in moves}):
            starts = [u for u, e in moves if e == eid]
            found = _shortest_cycle_from(graph, root, eid, starts, cap)
            if found is not None:
                best = min(best, found)
                cap = min(cap, found)
    if upper is not None and best >= upper:
        return math.inf
    return best


def no_short_cycle_through(graph: HyperGraphLine, t: int, g: int) -> bool:
    """True when no cycle shorter than g passes through hyperedge index t.

    For each member a, walk away from the hyperedge (state starts with the
    hyperedge as last edge used) for up to g-2 steps; reaching another member
    via a different closing edge closes a cycle of length <= g-1.
    """
    edge = graph.hyperedges[t]
    eid = graph.n + 1 + t
    members = set(edge)
    for a in edge:
        frontier = [(a, eid)]
        seen = {(a, eid)}
        depth = 0
        while frontier and depth < g - 2:
            depth += 1
            nxt = []
            for v, last in frontier:
                for u, e2 in graph.neighbors(v):
                    if e2 == last:
                        continue
                    if u in members and u != a and e2 != eid:
                        return False
                    state = (u, e2)
                    if state not in seen:
                        seen.add(state)
                        nxt.append(state)
            frontier = nxt
    return True


class ConstructionError(RuntimeError):
    pass


def _floor_log(n: int, q: int) -> int:
    e = 0
    while q ** (e + 1) <= n:
        e += 1
    return e


def ball_size_bound_uncovered(q: int, g: int) -> int:
    """Max size of a radius-(g-1) ball around a degree-2 vertex."""
    return 1 + 2 * (q ** (g - 1) - 1) // (q - 1)


def ball_size_bound_covered(q: int, g: int) -> int:
    """Max size of a radius-(g-1) ball around a hyperedge-covered vertex."""
    return 1 + (1 + q) * (q ** (g - 1) - 1) // (q - 1)


def build_matching(q: int, k: int, policy: str = "paper_greedy",
                   rng: np.random.Generator | None = None,
                   validate: bool = False):
    """Build a q-hyperedge matching covering all n = qk vertices of a line.

    policy "paper_greedy": greedy high-girth construction; the returned graph
    has girth >= floor(log_q n) - 1.  Requires q >= 3 and n >= q**4.  All
    free choices take the lowest vertex index unless ``rng`` is given, which
    only randomizes the scan order of equivalent candidates.

    policy "random": uniform random partition into q-sets, no girth guarantee.

    Returns (line-mode HyperGraphLine, measured girth).  With validate=True
    the matching condition and the girth floor are asserted after every
    augmentation step (slow; meant for desk-scale runs).
    """
    q, k = int(q), int(k)
    n = q * k
    if policy == "random":
        if rng is None:
            rng = np.random.default_rng(0)
        perm = [int(v) for v in rng.permutation(n) + 1]
        graph = HyperGraphLine(n, cyclic=False)
        for t in range(k):
            graph.add_hyperedge(perm[t * q:(t + 1) * q])
        return graph, girth(graph)
    if policy != "paper_greedy":
        raise ValueError(f"unknown policy {policy!r}")
    if q < 3:
        raise ValueError("greedy construction needs q >= 3")
    if n < q ** 4:
        raise ValueError(f"greedy construction needs n >= q^4 = {q ** 4}, got n={n}")
    g = _floor_log(n, q) - 1
    graph = HyperGraphLine(n, cyclic=True)
    while len(graph.hyperedges) < k:
        _augment(graph, q, g, rng, validate)
        if validate:
            _check_step(graph, q, g)
    graph.cyclic = False  # drop the cycle edge (g_n, g_1); girth cannot drop
    meas = girth(graph)
    if meas < g:
        raise ConstructionError(f"girth {meas} below target {g}")
    return graph, meas


def _scan_order(n: int, rng):
    if rng is None:
        return range(1, n + 1)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    return order


def _augment(graph: HyperGraphLine, q: int, g: int, rng, validate: bool):
    """One augmentation step: grow the matching by exactly one hyperedge."""
    n = graph.n
    uncovered = set(graph.uncovered())
    if len(uncovered) < q:
        raise ConstructionError("fewer than q uncovered vertices")
    balls: dict[int, dict[int, int]] = {}

    def ball(v):
        if v not in balls:
            balls[v] = restricted_distances(graph, v, g - 1)
        return balls[v]

    # Greedily grow a set of uncovered vertices pairwise >= g-1 apart.  The
    # scan is exhaustive, so a short result is maximal (non-extendable).
    chosen = []
    for v in _scan_order(n, rng):
        if v not in uncovered:
            continue
        if all(ball(u).get(v, _BIG) >= g - 1 for u in chosen):
            chosen.append(v)
            if len(chosen) == q:
                break
    if len(chosen) == q:
        graph.add_hyperedge(chosen)
        return

    # Rewiring branch: every uncovered vertex sits near one of the chosen.
    t = len(chosen)
    if validate:
        u_prime = set()
        for p in chosen:
            u_prime |= set(ball(p))
        missing = uncovered - u_prime
        if missing:
            raise ConstructionError(f"maximal set not covering V2: {sorted(missing)[:5]}")
    pads = [v for v in _scan_order(n, rng) if v in uncovered and v not in chosen]
    p_set = chosen + pads[: q - t]
    union = set()
    for p in p_set:
        union |= set(ball(p))
    w_set = [v for v in range(1, n + 1) if v not in union]
    if validate:
        w_floor = q ** (g + 1) - q - 2 * q * (q ** (g - 1) - 1) // (q - 1)
        if len(w_set) < w_floor:
            raise ConstructionError(f"|W|={len(w_set)} below floor {w_floor}")
    if rng is None:
        w_scan = w_set
    else:
        members = set(w_set)
        w_scan = [v for v in _scan_order(n, rng) if v in members]
    s_set = []
    for v in w_scan:
        if all(ball(s).get(v, _BIG) >= g for s in s_set):
            s_set.append(v)
            if len(s_set) == q:
                break
    if len(s_set) < q:
        raise ConstructionError("could not select q far-apart vertices in W")

    old_idx = [graph.cover_of(s) for s in s_set]
    if -1 in old_idx or len(set(old_idx)) != q:
        raise ConstructionError("rewiring vertices not on distinct hyperedges")
    old_edges = [graph.hyperedges[i] for i in old_idx]
    new_edges = [
        tuple(sorted({p} | (set(old) - {s})))
        for p, s, old in zip(p_set, s_set, old_edges)
    ]
    # Remove by membership (indices shift as edges are removed).
    for old in old_edges:
        graph.remove_hyperedge(graph.hyperedges.index(old))
    for edge in new_edges:
        graph.add_hyperedge(edge)
    graph.add_hyperedge(s_set)


def _check_step(graph: HyperGraphLine, q: int, g: int):
    if not graph.is_matching():
        raise ConstructionError("matching condition violated")
    # New cycles can only pass through edges added this step; checking every
    # hyperedge keeps the assertion independent of which those were.
    for t in range(len(graph.hyperedges)):
        if not no_short_cycle_through(graph, t, g):
            raise ConstructionError(f"cycle shorter than {g} through hyperedge {t}")


def matching_to_interleaver(graph: HyperGraphLine) -> GroupedInterleaver:
    """Read the matching as interleaver groups, ordered by smallest member."""
    if graph.cyclic:
        raise ValueError("interleaver wants a line-mode graph")
    if graph.uncovered():
        raise ValueError(f"uncovered vertices: {graph.uncovered()[:5]}")
    groups = sorted(graph.hyperedges, key=min)
    return GroupedInterleaver(tuple(groups))


def interleaver_to_line(il: GroupedInterleaver) -> HyperGraphLine:
    return HyperGraphLine(il.n, cyclic=False, hyperedges=il.groups)


def random_interleaver(degrees, rng: np.random.Generator):
    """Random grouping for an (ir)regular degree list; measured girth attached.

    Group order follows the degree list so that group t keeps size q_t.
    Returns (GroupedInterleaver, girth).
    """
    degrees = [int(d) for d in degrees]
    n = sum(degrees)
    perm = [int(v) for v in rng.permutation(n) + 1]
    groups, pos = [], 0
    for d in degrees:
        groups.append(tuple(sorted(perm[pos:pos + d])))
        pos += d
    il = GroupedInterleaver(tuple(groups))
    return il, girth(interleaver_to_line(il))


# --- interleaver file format -------------------------------------------------
#
# Header:  RA-IL v1 k=<k> n=<n> girth=<g>
# Then k lines, line t:  q_t p_1 p_2 ... p_{q_t}   (1-based, ascending)

def save_interleaver(il: GroupedInterleaver, girth_value, path):
    g = int(girth_value) if girth_value != math.inf else -1
    lines = [f"RA-IL v1 k={il.k} n={il.n} girth={g}"]
    for grp in il.groups:
        lines.append(" ".join(str(x) for x in (len(grp), *grp)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_interleaver(path):
    """Parse an interleaver file; returns (GroupedInterleaver, header girth)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("RA-IL v1"):
        raise ValueError("not an RA-IL v1 file")
    header = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
    try:
        k, n, g = int(header["k"]), int(header["n"]), int(header["girth"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad RA-IL header: {lines[0]!r}") from exc
    if len(lines) != k + 1:
        raise ValueError(f"expected {k} group lines, found {len(lines) - 1}")
    groups = []
    for ln in lines[1:]:
        parts = [int(x) for x in ln.split()]
        if len(parts) != parts[0] + 1:
            raise ValueError(f"bad group line: {ln!r}")
        grp = parts[1:]
        if grp != sorted(grp):
            raise ValueError(f"group not ascending: {ln!r}")
        groups.append(tuple(grp))
    il = GroupedInterleaver(tuple(groups))  # rejects non-partitions
    if il.n != n:
        raise ValueError(f"header n={n} but groups cover {il.n} positions")
    return il, g
