"""Analysis graph for LP decoding failures: costed line plus zero-cost hyperedges.

The graph has n vertices on a line; line edge i carries cost gamma_i(1-2x_i),
the cost a decoder pays for flipping code bit i.  The interleaver groups are
zero-cost hyperedges.  An atom path mu(sigma, tau) walks line edges from
g_sigma to g_tau.  A multiset of atoms is a hyperpromenade when, within every
group, all members appear as atom endpoints equally often; a nonpositive-cost
hyperpromenade certifies decoder failure, and this module extracts from one a
short simple witness path via an Euler tour of the contracted endpoint graph.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .channels import LlrVector
from .encoder import Codeword, GroupedInterleaver
from .interleaver import HyperGraphLine, girth as hypergraph_girth


@dataclass(eq=False)
class AuxGraph:
    """Costed Hamiltonian line with the interleaver groups as hyperedges.

    ham_costs[i-1] is the cost of line edge i (between g_i and g_{i+1}),
    i = 1..n-1.  groups may be empty for analysis-only graphs (window
    enumeration on a bare line); when present they must partition 1..n.
    """

    n: int
    ham_costs: np.ndarray
    groups: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        self.ham_costs = np.asarray(self.ham_costs, dtype=float)
        if len(self.ham_costs) != self.n - 1:
            raise ValueError(f"need {self.n - 1} edge costs, got {len(self.ham_costs)}")
        self.groups = tuple(tuple(sorted(g)) for g in self.groups)
        self._group_of = np.full(self.n + 1, -1, dtype=int)
        if self.groups:
            seen = set()
            for t, grp in enumerate(self.groups):
                for v in grp:
                    if not 1 <= v <= self.n or v in seen:
                        raise ValueError("groups must partition 1..n")
                    seen.add(v)
                    self._group_of[v] = t
            if len(seen) != self.n:
                raise ValueError("groups must cover every vertex exactly once")

    def group_of(self, v: int) -> int:
        return int(self._group_of[v])

    def atom_cost(self, sigma: int, tau: int) -> float:
        if not (1 <= sigma <= tau <= self.n):
            raise ValueError(f"atom endpoints out of range: ({sigma}, {tau})")
        return float(self.ham_costs[sigma - 1:tau - 1].sum())

    def edge_cost(self, i: int) -> float:
        if not 1 <= i <= self.n - 1:
            raise ValueError(f"line edge {i} out of range")
        return float(self.ham_costs[i - 1])

    def to_hypergraph(self) -> HyperGraphLine:
        return HyperGraphLine(self.n, cyclic=False, hyperedges=self.groups)


def build_aux_graph(codeword: Codeword, llrs: LlrVector,
                    il: GroupedInterleaver) -> AuxGraph:
    """Costs gamma_i(1-2x_i) from a transmitted codeword and its LLRs.

    Accepts n or n+1 LLRs (the termination observation carries no line edge
    and is ignored).  Code bit n carries no line edge either: an n-vertex
    line has n-1 edges.
    """
    n = codeword.n
    if il.n != n:
        raise ValueError(f"interleaver covers {il.n} positions, codeword has {n}")
    vals = llrs.values
    if len(vals) not in (n, n + 1):
        raise ValueError(f"need {n} or {n + 1} LLRs, got {len(vals)}")
    signs = 1.0 - 2.0 * np.asarray(codeword.bits[:n - 1], dtype=float)
    return AuxGraph(n=n, ham_costs=vals[:n - 1] * signs, groups=il.groups)


@dataclass(frozen=True)
class Hyperpromenade:
    """Multiset of atom paths, stored as sorted (sigma, tau) pairs."""

    atoms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "atoms",
            tuple(sorted((int(s), int(t)) for s, t in self.atoms)))

    def endpoint_counts(self) -> Counter:
        counts: Counter = Counter()
        for s, t in self.atoms:
            counts[s] += 1
            counts[t] += 1
        return counts


@dataclass(frozen=True)
class HyperpromenadeCheck:
    valid: bool
    cost: float
    reason: str | None = None


def validate_hyperpromenade(theta: AuxGraph, psi: Hyperpromenade) -> HyperpromenadeCheck:
    """Check the equal-endpoint-count condition groupwise; cost = sum of atoms.

    Zero-length atoms (sigma == tau) are rejected: they would inflate
    endpoint counts at zero cost.
    """
    if not psi.atoms:
        return HyperpromenadeCheck(False, 0.0, "empty multiset")
    cost = 0.0
    for s, t in psi.atoms:
        if s == t:
            return HyperpromenadeCheck(False, 0.0, f"zero-length atom at {s}")
        cost += theta.atom_cost(s, t)  # raises on out-of-range endpoints
    counts = psi.endpoint_counts()
    for grp in theta.groups:
        sizes = {counts.get(v, 0) for v in grp}
        if len(sizes) > 1:
            return HyperpromenadeCheck(
                False, cost, f"unequal endpoint counts {sorted(sizes)} in group {grp}")
    return HyperpromenadeCheck(True, cost, None)


@dataclass(frozen=True)
class HyperpromenadeGraph:
    """Endpoint multigraph of a hyperpromenade plus the matching hyperedges."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, float], ...]      # (sigma, tau, cost) per atom
    hyperedges: tuple[tuple[int, tuple[int, ...]], ...]  # (group id, members)
    component_of: dict[int, int]                   # vertex -> component id

    @property
    def num_components(self) -> int:
        return len(set(self.component_of.values()))

    def total_cost(self) -> float:
        return float(sum(c for _, _, c in self.edges))


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def build_hyperpromenade_graph(theta: AuxGraph, psi: Hyperpromenade):
    """The endpoint multigraph and its connected components.

    Returns (HyperpromenadeGraph, [sub-hyperpromenades]): vertices are atom
    endpoints merged by label, one parallel edge per atom, plus every group
    with endpoints present (validity makes groups all-present or all-absent).
    Hyperedges count as connectors for the components, and component costs
    add up to the hyperpromenade cost.
    """
    check = validate_hyperpromenade(theta, psi)
    if not check.valid:
        raise ValueError(f"invalid hyperpromenade: {check.reason}")
    counts = psi.endpoint_counts()
    vertices = tuple(sorted(counts))
    dsu = _DSU(vertices)
    edges = []
    for s, t in psi.atoms:
        edges.append((s, t, theta.atom_cost(s, t)))
        dsu.union(s, t)
    hyperedges = []
    for t_id, grp in enumerate(theta.groups):
        present = tuple(v for v in grp if counts.get(v, 0) > 0)
        if not present:
            continue
        hyperedges.append((t_id, present))
        for v in present[1:]:
            dsu.union(present[0], v)
    roots = sorted({dsu.find(v) for v in vertices})
    comp_id = {r: i for i, r in enumerate(roots)}
    component_of = {v: comp_id[dsu.find(v)] for v in vertices}
    graph = HyperpromenadeGraph(vertices, tuple(edges), tuple(hyperedges),
                                component_of)
    parts: list[list[tuple[int, int]]] = [[] for _ in roots]
    for s, t in psi.atoms:
        parts[component_of[s]].append((s, t))
    subs = [Hyperpromenade(tuple(p)) for p in parts]
    return graph, subs


# --- witness extraction (Euler tour of the contracted endpoint graph) --------


@dataclass(frozen=True)
class Witness:
    """A simple path/cycle: line edges with optional hyperedges between them.

    steps: ("H", i, u, v) for line edge i traversed u->v, or
           ("X", t, u, v) for hyperedge (group) t crossed u->v (1-based t).
    """

    steps: tuple
    cost: float

    def ham_edges(self) -> list[int]:
        return [s[1] for s in self.steps if s[0] == "H"]

    def dump(self) -> str:
        lines = [f"cost={self.cost!r}"]
        for kind, idx, _, _ in self.steps:
            lines.append(f"{kind} {idx}")
        return "\n".join(lines) + "\n"


def check_witness(theta: AuxGraph, witness: Witness, ham_count: int) -> bool:
    """Independent validity check: connected, no repeated line edge, no
    immediate edge reuse, exactly ham_count line edges, cost consistent."""
    steps = witness.steps
    if not steps or steps[0][0] != "H" or steps[-1][0] != "H":
        return False
    hams = []
    cost = 0.0
    prev_edge = None
    prev_v = None
    for kind, idx, u, v in steps:
        if prev_v is not None and u != prev_v:
            return False
        if kind == "H":
            if idx in hams:
                return False
            if {u, v} != {idx, idx + 1}:
                return False
            hams.append(idx)
            cost += theta.edge_cost(idx)
            edge = ("H", idx)
        else:
            grp = theta.groups[idx - 1]
            if u not in grp or v not in grp or u == v:
                return False
            edge = ("X", idx)
        if edge == prev_edge:
            return False
        prev_edge = edge
        prev_v = v
    if len(hams) != ham_count:
        return False
    return abs(cost - witness.cost) <= 1e-9 * (1.0 + abs(cost))


def _euler_tour(num_edges: int, edge_ends: list[tuple[int, int]]):
    """Eulerian circuit over a connected even-degree multigraph.

    edge_ends[e] = (node_u, node_v) (loops allowed).  Returns the circuit as
    a list of (edge id, forward?) with forward meaning u->v.
    """
    adj: dict[int, list[tuple[int, int, bool]]] = {}
    for e, (u, v) in enumerate(edge_ends):
        adj.setdefault(u, []).append((e, v, True))
        adj.setdefault(v, []).append((e, u, False))
    ptr = {u: 0 for u in adj}
    used = [False] * num_edges
    start = min(adj)
    stack: list[tuple[int, tuple[int, bool] | None]] = [(start, None)]
    out: list[tuple[int, bool]] = []
    while stack:
        v, via = stack[-1]
        lst = adj[v]
        advanced = False
        while ptr[v] < len(lst):
            e, w, fwd = lst[ptr[v]]
            ptr[v] += 1
            if not used[e]:
                used[e] = True
                stack.append((w, (e, fwd)))
                advanced = True
                break
        if not advanced:
            stack.pop()
            if via is not None:
                out.append(via)
    out.reverse()
    if len(out) != num_edges:
        raise ValueError("multigraph is not connected")
    return out


def _junction(prev_atom, prev_fwd, next_atom, next_fwd):
    """(arrival label, departure label) across a tour junction."""
    arr = prev_atom[1] if prev_fwd else prev_atom[0]
    dep = next_atom[0] if next_fwd else next_atom[1]
    return arr, dep


def _end_key(atom, label):
    """(label, side) of an atom's end; side tells which way the atom leaves."""
    other = atom[0] if atom[1] == label else atom[1]
    return (label, "L" if other < label else "R")


def _fix_uturns(tour, atoms, group_of):
    """Re-pair tour junctions so no atom leaves a junction along the same
    line edge the previous atom arrived by (same label, same side).

    Reversing the tour segment between two junctions of the same contracted
    node swaps their pairings without touching any other junction; a partner
    junction avoiding the offending (label, side) always exists because at
    most b of the q*b atom ends at a node share one (label, side).
    """
    def ends_of(t, j):
        m = len(t)
        pe, pf = t[(j - 1) % m]
        ne, nf = t[j % m]
        arr, dep = _junction(atoms[pe], pf, atoms[ne], nf)
        return _end_key(atoms[pe], arr), _end_key(atoms[ne], dep)

    guard = 2 * len(tour) + 4
    while guard:
        guard -= 1
        m = len(tour)
        bad = next((j for j in range(m) if ends_of(tour, j)[0] == ends_of(tour, j)[1]),
                   None)
        if bad is None:
            return tour
        tour = tour[bad:] + tour[:bad]  # offender now at the wrap junction 0
        key = ends_of(tour, 0)[0]
        node = group_of(key[0])
        partner = None
        for j in range(1, m):
            a, b = ends_of(tour, j)
            if group_of(a[0]) == node and a != key and b != key:
                partner = j
                break
        if partner is None:
            raise ValueError("no junction re-pairing available")
        tour = [(e, not f) for e, f in reversed(tour[:partner])] + tour[partner:]
    raise ValueError("junction fixing did not converge")


def extract_witness(theta: AuxGraph, psi: Hyperpromenade, g: int) -> Witness:
    """Extract a simple path/cycle with g/2 line edges and cost <= 0.

    Pipeline: contract the matching hyperedges of the endpoint graph, walk an
    Eulerian circuit (degrees are even because group sizes are even), expand
    it back to a closed walk in the graph, and scan the g/2-edge windows of
    its line-edge sequence; the window costs average to (g/2) * cost(psi)
    <= 0, so a nonpositive window exists.  Disconnected multisets are
    decomposed first and a nonpositive component is used.
    """
    if g < 2 or g % 2:
        raise ValueError(f"need even g >= 2, got {g}")
    if any(len(grp) % 2 for grp in theta.groups):
        raise ValueError("all group sizes must be even")
    check = validate_hyperpromenade(theta, psi)
    if not check.valid:
        raise ValueError(f"invalid hyperpromenade: {check.reason}")
    if check.cost > 0:
        raise ValueError(f"hyperpromenade cost {check.cost} > 0")
    meas = hypergraph_girth(theta.to_hypergraph(), upper=g)
    if meas != math.inf:
        raise ValueError(f"graph girth {meas} below g={g}")

    _, subs = build_hyperpromenade_graph(theta, psi)
    costs_by_sub = [(validate_hyperpromenade(theta, s).cost, i)
                    for i, s in enumerate(subs)]
    sub_cost, sub_idx = min(costs_by_sub)
    if sub_cost > 1e-9:
        raise ValueError("no connected component with nonpositive cost")
    psi_c = subs[sub_idx]

    atoms = list(psi_c.atoms)
    edge_ends = [(theta.group_of(s), theta.group_of(t)) for s, t in atoms]
    tour = _euler_tour(len(atoms), edge_ends)
    tour = _fix_uturns(tour, atoms, theta.group_of)

    steps = _expand_tour(theta, tour, atoms)
    ham_pos = [i for i, st in enumerate(steps) if st[0] == "H"]
    costs = [theta.edge_cost(steps[i][1]) for i in ham_pos]
    H = len(ham_pos)
    L = g // 2
    if H < L:
        raise ValueError(f"walk has only {H} line edges, need {L}")
    best_start, best_cost = 0, math.inf
    for s0 in range(H):
        c = sum(costs[(s0 + j) % H] for j in range(L))
        if c < best_cost - 1e-15:
            best_start, best_cost = s0, c
    if best_cost > 1e-9:
        raise AssertionError("no nonpositive window found (should be impossible)")
    picked = [(best_start + j) % H for j in range(L)]
    first, last = ham_pos[picked[0]], ham_pos[picked[-1]]
    total = len(steps)
    span = (last - first) % total + 1
    witness_steps = tuple(steps[(first + j) % total] for j in range(span))
    return Witness(steps=witness_steps, cost=float(best_cost))


def _expand_tour(theta: AuxGraph, tour, atoms):
    """Closed walk in the line graph: atoms expanded to their line edges,
    with hyperedge steps inserted where consecutive endpoint labels differ."""
    steps = []
    m = len(tour)
    for i, (e, fwd) in enumerate(tour):
        s, t = atoms[e]
        if fwd:
            steps.extend(("H", j, j, j + 1) for j in range(s, t))
        else:
            steps.extend(("H", j, j + 1, j) for j in range(t - 1, s - 1, -1))
        ne, nf = tour[(i + 1) % m]
        arr, dep = _junction(atoms[e], fwd, atoms[ne], nf)
        if arr != dep:
            t_id = theta.group_of(arr)
            if t_id != theta.group_of(dep):
                raise AssertionError("junction labels in different groups")
            steps.append(("X", t_id + 1, arr, dep))
    return steps


def min_cost_simple_window(theta: AuxGraph, L: int, work_limit: float = 5e6):
    """Exhaustive scan of simple paths/cycles with exactly L line edges.

    Walks alternate line edges with optional hyperedge hops; no line edge
    repeats (leading/trailing hyperedges are excluded: they add no cost).
    Returns (min cost, count of distinct undirected walks).  Desk scale only:
    raises when the branching estimate exceeds ``work_limit``.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    qmax = max((len(g) for g in theta.groups), default=1)
    estimate = theta.n * 2.0 * (2 * qmax - 1) ** max(L - 1, 0)
    if estimate > work_limit:
        raise ValueError(f"search too large: ~{estimate:.2e} walks > {work_limit:.2e}")

    n = theta.n
    seen: set[tuple] = set()
    best = math.inf

    def canon(steps, closed):
        fwd = tuple((k, i) for k, i, _, _ in steps)
        bwd = tuple(reversed(fwd))
        if not closed:
            return min(fwd, bwd)
        rots = [fwd[i:] + fwd[:i] for i in range(len(fwd))]
        rots += [bwd[i:] + bwd[:i] for i in range(len(bwd))]
        return min(rots)

    def record(steps, start, v, cost):
        nonlocal best
        key = canon(steps, closed=v == start)
        seen.add(key)
        if cost < best:
            best = cost

    def walk(start, v, steps, used, hams, cost):
        if hams == L:
            record(steps, start, v, cost)
            return
        # line edge continuations
        if v > 1 and (v - 1) not in used:
            e = v - 1
            steps.append(("H", e, v, v - 1))
            used.add(e)
            walk(start, v - 1, steps, used, hams + 1, cost + theta.edge_cost(e))
            used.discard(e)
            steps.pop()
        if v < n and v not in used:
            e = v
            steps.append(("H", e, v, v + 1))
            used.add(e)
            walk(start, v + 1, steps, used, hams + 1, cost + theta.edge_cost(e))
            used.discard(e)
            steps.pop()
        # hyperedge hop, then a line edge; walks are delimited by line edges
        # (a leading hyperedge changes neither cost nor simplicity), and
        # consecutive hyperedges are impossible: each vertex touches one.
        if not steps:
            return
        t = theta.group_of(v)
        if t == -1:
            return
        for w in theta.groups[t]:
            if w == v:
                continue
            for e in ((w - 1,) if w > 1 else ()) + ((w,) if w < n else ()):
                if e in used:
                    continue
                w2 = w + 1 if e == w else w - 1
                steps.append(("X", t + 1, v, w))
                steps.append(("H", e, w, w2))
                used.add(e)
                walk(start, w2, steps, used, hams + 1, cost + theta.edge_cost(e))
                used.discard(e)
                steps.pop()
                steps.pop()

    for v0 in range(1, n + 1):
        walk(v0, v0, [], set(), 0, 0.0)
    return best, len(seen)
